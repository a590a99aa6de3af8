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

#include <ams/forces.hpp>

#include <ams/errors.hpp>

#include <algorithm>
#include <cmath>

namespace ams {

Vec3 integrity_force(const Vec3& x, const Vec3& y, double kappa_I, double multiplier) {
  const Vec3 d = y - x;
  if (d.squaredNorm() == 0.0) return Vec3::Zero();
  return (multiplier * kappa_I) * d;
}

Vec3 angular_force(const Vec3& x_prev, const Vec3& x, const Vec3& ghost, double kappa_alpha,
                   ForceDiagnostics* diagnostics) {
  const Vec3 to_ghost = ghost - x;
  const double reach = to_ghost.norm();
  if (reach == 0.0) return Vec3::Zero();
  const Vec3 segment = x - x_prev;
  const Vec3 ghost_segment = ghost - x_prev;
  const double len = segment.norm();
  const double ghost_len = ghost_segment.norm();
  if (len < kDegenerateLength || ghost_len < kDegenerateLength || reach < kDegenerateLength) {
    if (diagnostics) ++diagnostics->degenerate_angular;
    return Vec3::Zero();
  }
  const double cosine = std::clamp(segment.dot(ghost_segment) / (len * ghost_len), -1.0, 1.0);
  const double angle = std::acos(cosine);
  return (kappa_alpha * angle / reach) * to_ghost;
}

Vec3List local_spring_forces(std::span<const Vec3> positions, const SpringNetwork& network,
                             ForceDiagnostics* diagnostics) {
  Vec3List forces(positions.size(), Vec3::Zero());
  for (const Spring& s : network.entries()) {
    const Vec3 d = positions[s.j] - positions[s.i];
    const double len = d.norm();
    if (len < kDegenerateLength) {
      if (diagnostics) ++diagnostics->degenerate_springs;
      continue;
    }
    const Vec3 f = (s.stiffness * (len - s.rest_length) / len) * d;
    forces[s.i] += f;
    forces[s.j] -= f;
  }
  return forces;
}

Vec3List biphasic_forces(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                         double kappa_I, double kappa_alpha, ForceDiagnostics* diagnostics) {
  const std::size_t n = strand.particle_count();
  Vec3List forces(n, Vec3::Zero());
  for (std::size_t i = 1; i < n; ++i) {
    if (kappa_I != 0.0)
      forces[i] += integrity_force(state.positions[i], ghosts.positions[i], kappa_I, state.plasticity[i]);
    if (kappa_alpha != 0.0)
      forces[i] += angular_force(state.positions[i - 1], state.positions[i], ghosts.shape_positions[i],
                                 kappa_alpha, diagnostics);
  }
  return forces;
}

Vec3List total_forces(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                      const SimParams& params, std::span<const Vec3> external, ForceDiagnostics* diagnostics) {
  Vec3List forces = local_spring_forces(state.positions, strand.springs(), diagnostics);
  if (params.kappa_I != 0.0 || params.kappa_alpha != 0.0) {
    const Vec3List bi = biphasic_forces(strand, state, ghosts, params.kappa_I, params.kappa_alpha, diagnostics);
    for (std::size_t i = 0; i < forces.size(); ++i) forces[i] += bi[i];
  }
  for (std::size_t i = 0; i < forces.size() && i < external.size(); ++i) forces[i] += external[i];
  return forces;
}

void non_hookean_update(StrandState& state, const GhostConfig& ghosts, const NonHookeanCurve& curve) {
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    const double elongation = (state.positions[i] - ghosts.positions[i]).norm();
    const double m = curve.evaluate(elongation);
    if (curve.plastic) {
      if (elongation >= curve.yield_elongation) state.plasticity[i] = std::min(state.plasticity[i], m);
    } else {
      state.plasticity[i] = m;
    }
  }
}

Vec3List integrity_preload(const Strand& strand, double kappa_I, const Vec3& gravity) {
  if (!(kappa_I > 0.0)) throw InvalidArgument("integrity preload requires kappa_I > 0");
  Vec3List offsets(strand.particle_count(), Vec3::Zero());
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] = (strand.masses()[i] / kappa_I) * gravity;
  return offsets;
}

Vec3List preload_ghost_offsets(const Strand& strand, double kappa_I, const Vec3& gravity,
                               const Quat& head_rotation) {
  Vec3List offsets = integrity_preload(strand, kappa_I, gravity);
  const Quat to_local = head_rotation.conjugate();
  for (Vec3& o : offsets) o = to_local * (-o);
  return offsets;
}

}  // namespace ams
