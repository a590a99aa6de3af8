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

#include <ams/banded_system.hpp>
#include <ams/forces.hpp>
#include <ams/strand.hpp>
#include <ams/types.hpp>

#include <cstddef>
#include <span>

namespace ams {

// D = d d^T for the normalised direction of `d`; zero matrix when d = 0.
Mat3 direction_matrix(const Vec3& d);

// Zero-rest-length spring from one particle to a moving handle (grab edits).
struct AnchorSpring {
  std::size_t particle = 0;
  Vec3 target = Vec3::Zero();
  Vec3 target_velocity = Vec3::Zero();
  double stiffness = 0.0;  // N/m
};

struct StepContext {
  std::span<const Vec3> external;  // per-particle external force, N (may be empty)
  std::span<const AnchorSpring> anchors;
  std::size_t strand_id = 0;
};

// Semi-implicit system for one substep of length dt. The root row is the
// identity with the kinematic root velocity as its right-hand side; the root
// column is folded into the right-hand side so the matrix keeps its symmetry.
BandedSystem assemble(const Strand& strand, const StrandState& state, const GhostConfig& ghosts,
                      const SimParams& params, double dt, const StepContext& context = {},
                      ForceDiagnostics* diagnostics = nullptr);

// Runs params.substeps assemble/solve/advance iterations over dt.
// Throws DivergenceError when the state leaves the configured bounds.
void substep_integrate(const Strand& strand, StrandState& state, const GhostConfig& ghosts,
                       const SimParams& params, double dt, const StepContext& context = {},
                       ForceDiagnostics* diagnostics = nullptr);

// Follow-the-leader projection of every edge to its rest length, root to tip.
// Velocities absorb the projection displacement over dt. Returns the number
// of passes used.
int apply_inextensibility(const Strand& strand, StrandState& state, double dt, double tolerance);

double max_edge_strain(const Strand& strand, std::span<const Vec3> positions);

// Throws DivergenceError if any component is non-finite or beyond the limits.
void check_divergence(const StrandState& state, const SimParams& params, std::size_t strand_id);

}  // namespace ams
