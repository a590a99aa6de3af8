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

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace ams {

// Block matrix with 3x3 blocks on offsets -3..+3 and a block right-hand side.
// Blocks outside the band cannot be addressed.
class BandedSystem {
 public:
  static constexpr int kHalfBand = 3;
  static constexpr int kBands = 2 * kHalfBand + 1;

  BandedSystem() = default;
  explicit BandedSystem(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t dimension() const { return 3 * n_; }

  static bool in_band(std::size_t i, std::size_t j) {
    return (i > j ? i - j : j - i) <= static_cast<std::size_t>(kHalfBand);
  }

  // Throws InvalidArgument outside the band or the matrix.
  Mat3& block(std::size_t i, std::size_t j);
  const Mat3& block(std::size_t i, std::size_t j) const;

  Vec3List& rhs() { return rhs_; }
  const Vec3List& rhs() const { return rhs_; }

  void set_zero();

  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd rhs_dense() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<Mat3> blocks_;
  Vec3List rhs_;
};

// Exact solve by one forward (factor + L^-1 b) and one backward (U^-1) sweep.
// Throws SingularBlockError if a pivot block is singular.
Vec3List solve_banded(const BandedSystem& system, std::size_t strand_id = 0);

// max_i ||(A v - b)_i|| over block rows.
double block_residual(const BandedSystem& system, const Vec3List& v);

}  // namespace ams
