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

#include <ams/integrator.hpp>

#include <ams/errors.hpp>

#include <algorithm>
#include <cmath>

namespace ams {

Mat3 direction_matrix(const Vec3& d) {
  const double len = d.norm();
  if (len == 0.0) return Mat3::Zero();
  const Vec3 u = d / len;
  return u * u.transpose();
}

BandedSystem assemble(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                      const SimParams& params, double dt, const StepContext& context,
                      ForceDiagnostics* diagnostics) {
  if (!(dt > 0.0)) throw InvalidArgument("substep length must be positive");
  if (!state.finite()) throw DivergenceError(context.strand_id, "non-finite state passed to assemble");

  const std::size_t n = strand.particle_count();
  const auto& x = state.positions;
  const auto& masses = strand.masses();
  const double dt2 = dt * dt;
  BandedSystem system(n);

  Vec3List force = local_spring_forces(x, strand.springs(), diagnostics);
  const bool biphasic = params.kappa_I != 0.0 || params.kappa_alpha != 0.0;
  if (biphasic) {
    const Vec3List bi = biphasic_forces(strand, state, ghosts, params.kappa_I, params.kappa_alpha, diagnostics);
    for (std::size_t i = 0; i < n; ++i) force[i] += bi[i];
  }
  for (std::size_t i = 0; i < n && i < context.external.size(); ++i) force[i] += context.external[i];
  for (const AnchorSpring& a : context.anchors) force[a.particle] += a.stiffness * (a.target - x[a.particle]);

  const Mat3 base = (1.0 + dt * params.damping) * Mat3::Identity();
  for (std::size_t i = 0; i < n; ++i) system.block(i, i) = base;

  for (const Spring& s : strand.springs().entries()) {
    const std::size_t i = static_cast<std::size_t>(s.i);
    const std::size_t j = static_cast<std::size_t>(s.j);
    const Mat3 k = s.stiffness * direction_matrix(x[j] - x[i]);
    const Mat3 ki = (dt2 / masses[i]) * k;
    const Mat3 kj = (dt2 / masses[j]) * k;
    system.block(i, i) += ki;
    system.block(j, j) += kj;
    system.block(i, j) -= ki;
    system.block(j, i) -= kj;
  }

  Vec3List& b = system.rhs();
  for (std::size_t i = 0; i < n; ++i) b[i] = state.velocities[i] + (dt / masses[i]) * force[i];

  if (biphasic) {
    for (std::size_t i = 1; i < n; ++i) {
      Mat3 k = Mat3::Zero();
      if (params.kappa_I != 0.0)
        k += (params.kappa_I * state.plasticity[i]) * direction_matrix(ghosts.positions[i] - x[i]);
      if (params.kappa_alpha != 0.0) {
        // Linearised angular tension, ~kappa_alpha / arm: along the ghost
        // direction, plus the transverse part from the tension direction
        // turning with the segment.
        const double arm = (ghosts.shape_positions[i] - x[i - 1]).norm();
        if (arm >= kDegenerateLength) {
          const Mat3 transverse = Mat3::Identity() - direction_matrix(x[i] - x[i - 1]);
          k += (params.kappa_alpha / arm) * (direction_matrix(ghosts.shape_positions[i] - x[i]) + transverse);
        }
      }
      const Mat3 scaled = (dt2 / masses[i]) * k;
      system.block(i, i) += scaled;
      b[i] += scaled * ghosts.velocities[i];
    }
  }

  for (const AnchorSpring& a : context.anchors) {
    const double c = dt2 / masses[a.particle] * a.stiffness;
    system.block(a.particle, a.particle) += c * Mat3::Identity();
    b[a.particle] += c * a.target_velocity;
  }

  // Kinematic root.
  const Vec3 root_velocity = ghosts.velocities[0];
  const std::size_t reach = std::min<std::size_t>(n - 1, BandedSystem::kHalfBand);
  for (std::size_t j = 1; j <= reach; ++j) {
    b[j] -= system.block(j, 0) * root_velocity;
    system.block(j, 0).setZero();
    system.block(0, j).setZero();
  }
  system.block(0, 0) = Mat3::Identity();
  b[0] = root_velocity;
  return system;
}

void check_divergence(const StrandState& state, const SimParams& params, std::size_t strand_id) {
  for (std::size_t i = 0; i < state.positions.size(); ++i) {
    const Vec3& p = state.positions[i];
    const Vec3& v = state.velocities[i];
    if (!p.allFinite() || !v.allFinite())
      throw DivergenceError(strand_id, "non-finite state at particle " + std::to_string(i));
    if (p.cwiseAbs().maxCoeff() > params.divergence_position_limit)
      throw DivergenceError(strand_id, "position limit exceeded at particle " + std::to_string(i));
    if (v.cwiseAbs().maxCoeff() > params.divergence_velocity_limit)
      throw DivergenceError(strand_id, "velocity limit exceeded at particle " + std::to_string(i));
  }
}

void substep_integrate(const Strand& strand, StrandState& state, const GhostConfig& ghosts,
                       const SimParams& params, double dt, const StepContext& context,
                       ForceDiagnostics* diagnostics) {
  if (params.substeps < 1) throw InvalidArgument("substep count must be at least 1");
  const double sub_dt = dt / params.substeps;
  const std::size_t n = strand.particle_count();
  for (int k = 0; k < params.substeps; ++k) {
    const BandedSystem system = assemble(strand, state, ghosts, params, sub_dt, context, diagnostics);
    state.velocities = solve_banded(system, context.strand_id);
    for (std::size_t i = 0; i < n; ++i) state.positions[i] += sub_dt * state.velocities[i];
    check_divergence(state, params, context.strand_id);
  }
  state.positions[0] = ghosts.shape_positions[0];
  state.velocities[0] = ghosts.velocities[0];
}

int apply_inextensibility(const Strand& strand, StrandState& state, double dt, double tolerance) {
  const std::size_t n = strand.particle_count();
  constexpr int kMaxPasses = 8;
  int passes = 0;
  while (passes < kMaxPasses && max_edge_strain(strand, state.positions) > tolerance) {
    ++passes;
    for (std::size_t i = 1; i < n; ++i) {
      const double rest = strand.rest_edge_length(i - 1);
      Vec3 d = state.positions[i] - state.positions[i - 1];
      double len = d.norm();
      if (len < kDegenerateLength) {
        d = strand.rest_positions()[i] - strand.rest_positions()[i - 1];
        len = d.norm();
      }
      const Vec3 projected = state.positions[i - 1] + (rest / len) * d;
      state.velocities[i] += (projected - state.positions[i]) / dt;
      state.positions[i] = projected;
    }
  }
  return passes;
}

double max_edge_strain(const Strand& strand, std::span<const Vec3> positions) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
    const double rest = strand.rest_edge_length(i);
    worst = std::max(worst, std::abs((positions[i + 1] - positions[i]).norm() / rest - 1.0));
  }
  return worst;
}

}  // namespace ams
