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

#include <ams/types.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace ams {

enum class SpringKind { Edge = 1, Bending = 2, Torsion = 3 };

// Index offset |j - i| of a spring kind. The band width of the system follows from this.
constexpr int spring_offset(SpringKind kind) { return static_cast<int>(kind); }

struct Spring {
  int i = 0;
  int j = 0;
  SpringKind kind = SpringKind::Edge;
  double stiffness = 0.0;    // N/m
  double rest_length = 0.0;  // m
};

struct SpringStiffness {
  double edge = 1e6;
  double bending = 1e6;
  double torsion = 1e6;

  static SpringStiffness uniform(double kappa) { return {kappa, kappa, kappa}; }
  double of(SpringKind kind) const;
};

// Edge (i,i+1), bending (i,i+2) and torsion (i,i+3) springs of one strand.
// Entries are ordered by first index, then by kind.
class SpringNetwork {
 public:
  SpringNetwork() = default;

  static SpringNetwork build(std::span<const Vec3> rest_positions, const SpringStiffness& stiffness);

  const std::vector<Spring>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void set_stiffness(const SpringStiffness& stiffness);

 private:
  std::vector<Spring> entries_;
};

// Rest configuration of one strand. Particle 0 is the kinematic root.
class Strand {
 public:
  Strand() = default;

  // Throws InvalidArgument for fewer than two particles, non-positive masses,
  // or coincident consecutive rest positions.
  Strand(Vec3List rest_positions, std::vector<double> masses, const SpringStiffness& stiffness);

  static Strand uniform(Vec3List rest_positions, double particle_mass, const SpringStiffness& stiffness);

  std::size_t particle_count() const { return rest_positions_.size(); }
  const Vec3List& rest_positions() const { return rest_positions_; }
  const std::vector<double>& masses() const { return masses_; }
  const SpringNetwork& springs() const { return springs_; }
  SpringNetwork& springs() { return springs_; }
  double rest_edge_length(std::size_t i) const {
    return (rest_positions_[i + 1] - rest_positions_[i]).norm();
  }
  double rest_length() const;

 private:
  Vec3List rest_positions_;
  std::vector<double> masses_;
  SpringNetwork springs_;
};

struct StrandState {
  Vec3List positions;
  Vec3List velocities;
  std::vector<double> plasticity;  // integrity stiffness multiplier in (0, 1]

  static StrandState at_rest(const Strand& strand, const RigidTransform& head = {});
  std::size_t size() const { return positions.size(); }
  bool finite() const;
};

// Rigid ghost copy of the rest shape. `positions` are the integrity targets
// (rest shape plus preload offset), `shape_positions` the plain rest shape
// used as the angular target. Both move only with the head transform.
struct GhostConfig {
  Vec3List positions;
  Vec3List shape_positions;
  Vec3List velocities;
  Vec3List preload_offsets;  // head-local frame

  static GhostConfig from_rest(const Strand& strand, Vec3List preload_offsets = {});

  // Moves the ghost to `pose`; velocities are the finite difference over dt
  // from the previous placement.
  void update(const Strand& strand, const RigidTransform& pose, double dt);
  void place(const Strand& strand, const RigidTransform& pose);
};

// Piecewise-linear integrity stiffness multiplier as a function of the
// particle-ghost elongation.
struct NonHookeanCurve {
  std::vector<std::pair<double, double>> points{{0.0, 1.0}};  // (elongation m, multiplier)
  double yield_elongation = 0.0;  // plastic memory only records beyond this elongation
  bool plastic = false;

  void validate() const;
  double evaluate(double elongation) const;
};

struct SimParams {
  double kappa_L = 1e6;      // N/m
  std::optional<double> kappa_edge;
  std::optional<double> kappa_bending;
  std::optional<double> kappa_torsion;
  double kappa_I = 1e2;      // N/m
  double kappa_alpha = 1e2;  // N/rad
  double damping = 0.0;      // G_i = damping * m_i
  Vec3 gravity{0.0, -9.81, 0.0};
  double dt = 1.0 / 60.0;
  int substeps = 4;
  double friction = 0.3;
  double flip_blend = 0.95;
  NonHookeanCurve non_hookean;
  double inextensibility_tolerance = 1e-4;
  double divergence_position_limit = 1e6;   // m
  double divergence_velocity_limit = 1e3;   // m/s
  bool preload = true;

  SpringStiffness stiffness() const;
  // Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

}  // namespace ams
