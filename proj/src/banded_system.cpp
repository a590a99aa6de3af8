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

#include <ams/banded_system.hpp>

#include <ams/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace ams {

BandedSystem::BandedSystem(std::size_t n) : n_(n), blocks_(n * kBands, Mat3::Zero()), rhs_(n, Vec3::Zero()) {}

std::size_t BandedSystem::index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_ || !in_band(i, j)) throw InvalidArgument("block index outside the heptadiagonal band");
  return i * kBands + static_cast<std::size_t>(static_cast<long>(j) - static_cast<long>(i) + kHalfBand);
}

Mat3& BandedSystem::block(std::size_t i, std::size_t j) { return blocks_[index(i, j)]; }
const Mat3& BandedSystem::block(std::size_t i, std::size_t j) const { return blocks_[index(i, j)]; }

void BandedSystem::set_zero() {
  std::fill(blocks_.begin(), blocks_.end(), Mat3::Zero());
  std::fill(rhs_.begin(), rhs_.end(), Vec3::Zero());
}

Eigen::MatrixXd BandedSystem::to_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n_, 3 * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= kHalfBand ? i - kHalfBand : 0;
    const std::size_t hi = std::min(n_ - 1, i + kHalfBand);
    for (std::size_t j = lo; j <= hi; ++j) a.block<3, 3>(3 * i, 3 * j) = block(i, j);
  }
  return a;
}

Eigen::VectorXd BandedSystem::rhs_dense() const {
  Eigen::VectorXd b(3 * n_);
  for (std::size_t i = 0; i < n_; ++i) b.segment<3>(3 * i) = rhs_[i];
  return b;
}

namespace {

// Row-pivoted LU of one 3x3 pivot block. Solving through the factors keeps
// full accuracy on stiff, nearly rank-one blocks where an explicit inverse
// does not.
struct PivotLU {
  Mat3 lu;
  std::array<int, 3> perm{0, 1, 2};

  // False when the block is numerically singular (Hadamard-relative test).
  bool factor(const Mat3& m) {
    lu = m;
    for (int k = 0; k < 3; ++k) {
      int p = k;
      for (int r = k + 1; r < 3; ++r)
        if (std::abs(lu(r, k)) > std::abs(lu(p, k))) p = r;
      if (p != k) {
        lu.row(k).swap(lu.row(p));
        std::swap(perm[k], perm[p]);
      }
      if (lu(k, k) == 0.0) return false;
      for (int r = k + 1; r < 3; ++r) {
        lu(r, k) /= lu(k, k);
        for (int c = k + 1; c < 3; ++c) lu(r, c) -= lu(r, k) * lu(k, c);
      }
    }
    const double det = std::abs(lu(0, 0) * lu(1, 1) * lu(2, 2));
    // Hadamard bound: |det| <= product of column norms, with equality for orthogonal columns.
    const double hadamard = m.col(0).norm() * m.col(1).norm() * m.col(2).norm();
    return std::isfinite(det) && hadamard > 0.0 && det > 1e-13 * hadamard;
  }

  Vec3 solve(const Vec3& b) const {
    Vec3 x(b[perm[0]], b[perm[1]], b[perm[2]]);
    x[1] -= lu(1, 0) * x[0];
    x[2] -= lu(2, 0) * x[0] + lu(2, 1) * x[1];
    x[2] /= lu(2, 2);
    x[1] = (x[1] - lu(1, 2) * x[2]) / lu(1, 1);
    x[0] = (x[0] - lu(0, 1) * x[1] - lu(0, 2) * x[2]) / lu(0, 0);
    return x;
  }

  Mat3 solve(const Mat3& b) const {
    Mat3 x;
    for (int c = 0; c < 3; ++c) x.col(c) = solve(Vec3(b.col(c)));
    return x;
  }
};

}  // namespace

Vec3List solve_banded(const BandedSystem& system, std::size_t strand_id) {
  constexpr std::size_t kH = BandedSystem::kHalfBand;
  const std::size_t n = system.size();
  // lower[i][k] holds L(i, i - kH + k) for k = 0..kH; upper[i][k] holds U(i, i + 1 + k).
  std::vector<std::array<Mat3, kH + 1>> lower(n);
  std::vector<std::array<Mat3, kH>> upper(n);
  std::vector<PivotLU> pivot(n);
  Vec3List y(n);

  auto L = [&](std::size_t i, std::size_t j) -> Mat3& { return lower[i][j + kH - i]; };
  auto U = [&](std::size_t i, std::size_t j) -> Mat3& { return upper[i][j - i - 1]; };

  // Forward sweep: factor row i and solve L y = b.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= kH ? i - kH : 0;
    for (std::size_t j = lo; j <= i; ++j) {
      Mat3 acc = system.block(i, j);
      const std::size_t k0 = std::max(lo, j >= kH ? j - kH : 0);
      for (std::size_t k = k0; k < j; ++k) acc.noalias() -= L(i, k) * U(k, j);
      L(i, j) = acc;
    }
    if (!pivot[i].factor(L(i, i))) throw SingularBlockError(strand_id, i);

    Vec3 r = system.rhs()[i];
    for (std::size_t j = lo; j < i; ++j) r.noalias() -= L(i, j) * y[j];
    y[i] = pivot[i].solve(r);

    const std::size_t hi = std::min(n - 1, i + kH);
    for (std::size_t j = i + 1; j <= hi; ++j) {
      Mat3 acc = system.block(i, j);
      const std::size_t k0 = std::max(lo, j >= kH ? j - kH : 0);
      for (std::size_t k = k0; k < i; ++k) acc.noalias() -= L(i, k) * U(k, j);
      U(i, j) = pivot[i].solve(acc);
    }
  }

  // Backward sweep: U v = y with unit diagonal blocks.
  Vec3List v(n);
  for (std::size_t ii = n; ii-- > 0;) {
    Vec3 r = y[ii];
    const std::size_t hi = std::min(n - 1, ii + kH);
    for (std::size_t j = ii + 1; j <= hi; ++j) r.noalias() -= U(ii, j) * v[j];
    v[ii] = r;
  }
  return v;
}

double block_residual(const BandedSystem& system, const Vec3List& v) {
  const std::size_t n = system.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 r = -system.rhs()[i];
    const std::size_t lo = i >= BandedSystem::kHalfBand ? i - BandedSystem::kHalfBand : 0;
    const std::size_t hi = std::min(n - 1, i + BandedSystem::kHalfBand);
    for (std::size_t j = lo; j <= hi; ++j) r += system.block(i, j) * v[j];
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace ams
