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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ams {

struct GridSpec {
  std::array<int, 3> resolution{32, 32, 32};
  Vec3 origin{-0.5, -0.5, -0.5};  // head-local lower corner, m
  double cell_size = 1.0 / 32.0;  // m
};

// Cell-centred mass/velocity grid that moves rigidly with the head.
// Velocities are stored in world coordinates.
class EulerianGrid {
 public:
  static constexpr double kMassEpsilon = 1e-14;

  EulerianGrid() = default;
  explicit EulerianGrid(const GridSpec& spec, const RigidTransform& anchor = {});

  const GridSpec& spec() const { return spec_; }
  const RigidTransform& anchor() const { return anchor_; }
  void set_anchor(const RigidTransform& anchor) { anchor_ = anchor; }

  std::size_t cell_count() const { return mass_.size(); }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(spec_.resolution[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(spec_.resolution[1]) * static_cast<std::size_t>(k));
  }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < spec_.resolution[0] && j < spec_.resolution[1] && k < spec_.resolution[2];
  }
  Vec3 cell_center(int i, int j, int k) const;  // world

  std::vector<double>& mass() { return mass_; }
  const std::vector<double>& mass() const { return mass_; }
  Vec3List& velocity() { return velocity_; }
  const Vec3List& velocity() const { return velocity_; }

  void clear();
  Vec3 total_momentum() const;

  // Eight trilinear stencil cells of a world point; false if any lies outside.
  struct Stencil {
    std::array<std::size_t, 8> cells{};
    std::array<double, 8> weights{};
  };
  bool stencil(const Vec3& world, Stencil& out) const;

 private:
  GridSpec spec_;
  RigidTransform anchor_;
  std::vector<double> mass_;
  Vec3List velocity_;
};

struct RasterizeOptions {
  int segment_samples = 1;  // interior samples per segment
};

struct RasterizeStats {
  std::size_t samples = 0;
  std::size_t out_of_bounds = 0;
  Vec3 sample_momentum = Vec3::Zero();  // over in-bounds samples
};

// Scatters particle and segment-interior samples with trilinear weights.
// Per-strand contributions are merged in strand order.
RasterizeStats rasterize(std::span<const Strand> strands, std::span<const StrandState> states, EulerianGrid& grid,
                         const RasterizeOptions& options = {});

// Mass-weighted diffusion between face neighbours, applied as disjoint
// pairwise exchanges (even then odd faces along each axis). Conserves grid
// momentum; strength 0 is the identity.
void grid_regularize(EulerianGrid& grid, double strength, int iterations);

// Optional Jacobi pressure projection over occupied cells.
void grid_project_divergence(EulerianGrid& grid, int iterations);

// FLIP/PIC gather onto particles. The root particle of each strand is skipped.
void transfer_back(const EulerianGrid& before, const EulerianGrid& after, std::span<StrandState> states,
                   double flip_blend);

struct PairwiseStats {
  std::size_t pairs = 0;
  Vec3 momentum_change = Vec3::Zero();
};

// Separating velocity impulses between particles of different strands closer
// than `radius`. Equal and opposite per pair; roots are excluded.
PairwiseStats resolve_pairwise(std::span<const Strand> strands, std::span<StrandState> states, double radius,
                               double stiffness, double dt);

}  // namespace ams
