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

#pragma once

#include <ams/strand.hpp>
#include <ams/types.hpp>

#include <cstddef>
#include <span>

namespace ams {

// Segment lengths below this are treated as degenerate.
inline constexpr double kDegenerateLength = 1e-12;

struct ForceDiagnostics {
  std::size_t degenerate_springs = 0;
  std::size_t degenerate_angular = 0;
};

// Zero-rest-length spring from particle x to its ghost y, scaled by the
// non-Hookean multiplier.
Vec3 integrity_force(const Vec3& x, const Vec3& y, double kappa_I, double multiplier);

// Force on particle i+1 from the angle between segment x_i -> x_{i+1} and
// segment x_i -> ghost_{i+1}. Acts along (ghost - x_{i+1}) only.
Vec3 angular_force(const Vec3& x_prev, const Vec3& x, const Vec3& ghost, double kappa_alpha,
                   ForceDiagnostics* diagnostics = nullptr);

// Explicit elastic force of every spring, accumulated per particle.
Vec3List local_spring_forces(std::span<const Vec3> positions, const SpringNetwork& network,
                             ForceDiagnostics* diagnostics = nullptr);

// Explicit biphasic (integrity + angular) force per particle. The root gets none.
Vec3List biphasic_forces(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                         double kappa_I, double kappa_alpha, ForceDiagnostics* diagnostics = nullptr);

// Local + biphasic + external. Terms with zero stiffness are skipped entirely.
Vec3List total_forces(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                      const SimParams& params, std::span<const Vec3> external,
                      ForceDiagnostics* diagnostics = nullptr);

// Updates the stored plasticity multipliers from the current elongations.
void non_hookean_update(StrandState& state, const GhostConfig& ghosts, const NonHookeanCurve& curve);

// Offsets dr_i = (m_i / kappa_I) g balancing each particle's weight; zero at the root.
// Throws InvalidArgument when kappa_I is not positive.
Vec3List integrity_preload(const Strand& strand, double kappa_I, const Vec3& gravity);

// Head-local ghost displacement that realises the preload: the ghost sits
// opposite to gravity so the integrity tension carries the weight.
Vec3List preload_ghost_offsets(const Strand& strand, double kappa_I, const Vec3& gravity,
                               const Quat& head_rotation = Quat::Identity());

}  // namespace ams
