// Copyright 2026 The AMS Strands Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <ams/strand.hpp>

#include <ams/errors.hpp>

#include <cmath>
#include <string>

namespace ams {

double SpringStiffness::of(SpringKind kind) const {
  switch (kind) {
    case SpringKind::Edge:
      return edge;
    case SpringKind::Bending:
      return bending;
    case SpringKind::Torsion:
      return torsion;
  }
  return edge;
}

SpringNetwork SpringNetwork::build(std::span<const Vec3> rest, const SpringStiffness& stiffness) {
  SpringNetwork net;
  const int n = static_cast<int>(rest.size());
  for (int i = 0; i < n; ++i) {
    for (SpringKind kind : {SpringKind::Edge, SpringKind::Bending, SpringKind::Torsion}) {
      const int j = i + spring_offset(kind);
      if (j >= n) continue;
      net.entries_.push_back({i, j, kind, stiffness.of(kind), (rest[j] - rest[i]).norm()});
    }
  }
  return net;
}

void SpringNetwork::set_stiffness(const SpringStiffness& stiffness) {
  for (Spring& s : entries_) s.stiffness = stiffness.of(s.kind);
}

Strand::Strand(Vec3List rest_positions, std::vector<double> masses, const SpringStiffness& stiffness)
    : rest_positions_(std::move(rest_positions)), masses_(std::move(masses)) {
  if (rest_positions_.size() < 2) throw InvalidArgument("strand needs at least two particles");
  if (masses_.size() != rest_positions_.size()) throw InvalidArgument("mass count does not match particle count");
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) throw InvalidArgument("particle masses must be positive");
  }
  for (std::size_t i = 0; i + 1 < rest_positions_.size(); ++i) {
    if (!rest_positions_[i].allFinite()) throw InvalidArgument("non-finite rest position");
    if ((rest_positions_[i + 1] - rest_positions_[i]).norm() <= 0.0) {
      throw InvalidArgument("coincident rest positions at edge " + std::to_string(i));
    }
  }
  springs_ = SpringNetwork::build(rest_positions_, stiffness);
}

Strand Strand::uniform(Vec3List rest_positions, double particle_mass, const SpringStiffness& stiffness) {
  std::vector<double> masses(rest_positions.size(), particle_mass);
  return Strand(std::move(rest_positions), std::move(masses), stiffness);
}

double Strand::rest_length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < particle_count(); ++i) total += rest_edge_length(i);
  return total;
}

StrandState StrandState::at_rest(const Strand& strand, const RigidTransform& head) {
  StrandState s;
  s.positions.reserve(strand.particle_count());
  for (const Vec3& p : strand.rest_positions()) s.positions.push_back(head.apply(p));
  s.velocities.assign(strand.particle_count(), Vec3::Zero());
  s.plasticity.assign(strand.particle_count(), 1.0);
  return s;
}

bool StrandState::finite() const {
  for (const Vec3& p : positions)
    if (!p.allFinite()) return false;
  for (const Vec3& v : velocities)
    if (!v.allFinite()) return false;
  return true;
}

GhostConfig GhostConfig::from_rest(const Strand& strand, Vec3List preload_offsets) {
  GhostConfig g;
  if (preload_offsets.empty()) preload_offsets.assign(strand.particle_count(), Vec3::Zero());
  if (preload_offsets.size() != strand.particle_count())
    throw InvalidArgument("preload offset count does not match particle count");
  g.preload_offsets = std::move(preload_offsets);
  g.place(strand, RigidTransform::identity());
  return g;
}

void GhostConfig::place(const Strand& strand, const RigidTransform& pose) {
  const auto& rest = strand.rest_positions();
  const std::size_t n = rest.size();
  positions.resize(n);
  shape_positions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    shape_positions[i] = pose.apply(rest[i]);
    positions[i] = pose.apply(rest[i] + preload_offsets[i]);
  }
  velocities.assign(n, Vec3::Zero());
}

void GhostConfig::update(const Strand& strand, const RigidTransform& pose, double dt) {
  const Vec3List previous = positions;
  place(strand, pose);
  if (previous.size() != positions.size()) return;
  for (std::size_t i = 0; i < positions.size(); ++i) velocities[i] = (positions[i] - previous[i]) / dt;
}

void NonHookeanCurve::validate() const {
  if (points.empty()) throw InvalidArgument("non-Hookean curve needs at least one control point");
  if (points.front().first != 0.0 || points.front().second != 1.0)
    throw InvalidArgument("non-Hookean curve must start at (0, 1)");
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double m = points[k].second;
    if (!(m > 0.0 && m <= 1.0)) throw InvalidArgument("non-Hookean multipliers must lie in (0, 1]");
    if (k > 0 && !(points[k].first > points[k - 1].first))
      throw InvalidArgument("non-Hookean elongations must be strictly increasing");
  }
  if (yield_elongation < 0.0) throw InvalidArgument("yield elongation must be non-negative");
}

double NonHookeanCurve::evaluate(double d) const {
  if (d <= points.front().first) return points.front().second;
  for (std::size_t k = 1; k < points.size(); ++k) {
    if (d <= points[k].first) {
      const auto [d0, m0] = points[k - 1];
      const auto [d1, m1] = points[k];
      const double t = (d - d0) / (d1 - d0);
      return m0 + t * (m1 - m0);
    }
  }
  return points.back().second;
}

SpringStiffness SimParams::stiffness() const {
  return {kappa_edge.value_or(kappa_L), kappa_bending.value_or(kappa_L), kappa_torsion.value_or(kappa_L)};
}

void SimParams::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (substeps < 1) throw InvalidArgument("substep count must be at least 1");
  const SpringStiffness k = stiffness();
  if (k.edge < 0.0 || k.bending < 0.0 || k.torsion < 0.0 || kappa_I < 0.0 || kappa_alpha < 0.0)
    throw InvalidArgument("stiffnesses must be non-negative");
  if (damping < 0.0) throw InvalidArgument("damping must be non-negative");
  if (friction < 0.0) throw InvalidArgument("friction must be non-negative");
  if (flip_blend < 0.0 || flip_blend > 1.0) throw InvalidArgument("flip blend must lie in [0, 1]");
  if (!(inextensibility_tolerance > 0.0)) throw InvalidArgument("inextensibility tolerance must be positive");
  non_hookean.validate();
}

}  // namespace ams
