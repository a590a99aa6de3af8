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

// Independent reference implementations used by the tests. None of these
// call into the code they check.

#include <ams/banded_system.hpp>
#include <ams/rng.hpp>
#include <ams/scene.hpp>
#include <ams/strand.hpp>
#include <ams/strand_io.hpp>

#include <Eigen/Dense>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace amstest {

using ams::Mat3;
using ams::Vec3;
using ams::Vec3List;

// Textbook semi-implicit mass-spring system, written out independently.
inline ams::BandedSystem plain_mass_spring(const ams::Strand& strand, const ams::StrandState& state, const Vec3& root_velocity,
                               double damping, double dt, const Vec3List& external) {
  const std::size_t n = strand.particle_count();
  ams::BandedSystem sys(n);
  for (std::size_t i = 0; i < n; ++i) sys.block(i, i) = (1.0 + dt * damping) * Mat3::Identity();
  Vec3List force(n, Vec3::Zero());
  for (const ams::Spring& s : strand.springs().entries()) {
    const Vec3 d = state.positions[s.j] - state.positions[s.i];
    const double len = d.norm();
    const Vec3 f = (s.stiffness * (len - s.rest_length) / len) * d;
    force[s.i] += f;
    force[s.j] -= f;
  }
  for (std::size_t i = 0; i < n; ++i) force[i] += external[i];
  for (const ams::Spring& s : strand.springs().entries()) {
    const Vec3 u = (state.positions[s.j] - state.positions[s.i]) / (state.positions[s.j] - state.positions[s.i]).norm();
    const Mat3 direction = u * u.transpose();
    const Mat3 k = s.stiffness * direction;
    const Mat3 ki = (dt * dt / strand.masses()[s.i]) * k;
    const Mat3 kj = (dt * dt / strand.masses()[s.j]) * k;
    sys.block(s.i, s.i) += ki;
    sys.block(s.j, s.j) += kj;
    sys.block(s.i, s.j) -= ki;
    sys.block(s.j, s.i) -= kj;
  }
  for (std::size_t i = 0; i < n; ++i) sys.rhs()[i] = state.velocities[i] + (dt / strand.masses()[i]) * force[i];
  for (std::size_t j = 1; j < n && j <= 3; ++j) {  // kinematic root
    sys.rhs()[j] -= sys.block(j, 0) * root_velocity;
    sys.block(j, 0).setZero();
    sys.block(0, j).setZero();
  }
  sys.block(0, 0) = Mat3::Identity();
  sys.rhs()[0] = root_velocity;
  return sys;
}

// Gaussian elimination with partial pivoting on a dense copy.
inline Eigen::VectorXd dense_solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(p, k))) p = r;
    if (a(p, k) == 0.0) throw std::runtime_error("dense oracle: singular matrix");
    a.row(k).swap(a.row(p));
    std::swap(b(k), b(p));
    for (Eigen::Index r = k + 1; r < n; ++r) {
      const double f = a(r, k) / a(k, k);
      if (f == 0.0) continue;
      for (Eigen::Index c = k; c < n; ++c) a(r, c) -= f * a(k, c);
      b(r) -= f * b(k);
    }
  }
  Eigen::VectorXd x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double s = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return x;
}

inline Eigen::VectorXd stack(const Vec3List& v) {
  Eigen::VectorXd out(3 * static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out.segment<3>(3 * static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline Vec3 random_unit(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 d(n(gen), n(gen), n(gen));
  return d.normalized();
}

// Heptadiagonal system shaped like a strand solve: identity-plus-damping
// diagonal and dt^2/m * kappa * d d^T couplings on offsets 1..3, with
// stiffness and step at the magnitudes of a production run.
inline ams::BandedSystem random_heptadiagonal(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ams::BandedSystem sys(n);
  std::vector<double> mass(n);
  for (double& m : mass) m = std::pow(10.0, -3.0 + 2.0 * u(gen));  // 1e-3 .. 1e-1 kg
  const double dt = 1.0 / (60.0 * (1 + static_cast<int>(4 * u(gen))));
  const double damping = 2.0 * u(gen);
  for (std::size_t i = 0; i < n; ++i) sys.block(i, i) = (1.0 + dt * damping) * Mat3::Identity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t off = 1; off <= 3 && i + off < n; ++off) {
      const double kappa = std::pow(10.0, 5.0 + 2.0 * u(gen));  // 1e5 .. 1e7 N/m
      const Vec3 d = random_unit(gen);
      const Mat3 k = kappa * d * d.transpose();
      const std::size_t j = i + off;
      sys.block(i, i) += dt * dt / mass[i] * k;
      sys.block(j, j) += dt * dt / mass[j] * k;
      sys.block(i, j) -= dt * dt / mass[i] * k;
      sys.block(j, i) -= dt * dt / mass[j] * k;
    }
  std::normal_distribution<double> nrm(0.0, 1.0);
  for (Vec3& b : sys.rhs()) b = Vec3(nrm(gen), nrm(gen), nrm(gen));
  return sys;
}

// Mean distance between corresponding points after the best rigid alignment
// of `points` onto `reference` (Kabsch).
inline double aligned_mean_deviation(const Vec3List& points, const Vec3List& reference) {
  const std::size_t n = points.size();
  Vec3 cp = Vec3::Zero(), cr = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    cp += points[i];
    cr += reference[i];
  }
  cp /= static_cast<double>(n);
  cr /= static_cast<double>(n);
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) h += (points[i] - cp) * (reference[i] - cr).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) d(2, 2) = -1.0;
  const Mat3 r = svd.matrixV() * d * svd.matrixU().transpose();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (r * (points[i] - cp) + cr - reference[i]).norm();
  return sum / static_cast<double>(n);
}

inline double polyline_length(const Vec3List& p) {
  double l = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) l += (p[i] - p[i - 1]).norm();
  return l;
}

inline Vec3List straight_strand(std::size_t n, const Vec3& root, const Vec3& step) {
  Vec3List p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(root + static_cast<double>(i) * step);
  return p;
}

// Helical strand used by the shape-retention and stability scenes.
inline Vec3List helix(std::size_t n, const Vec3& root, double radius, double angle_step, double drop, double phase = 0.0) {
  Vec3List p;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = phase + angle_step * static_cast<double>(i);
    p.push_back(root + Vec3(radius * (std::cos(a) - std::cos(phase)), -drop * static_cast<double>(i),
                            radius * (std::sin(a) - std::sin(phase))));
  }
  return p;
}

// 480 helical strands rooted in a 1 cm disc.
inline ams::StrandAsset wisp_asset(std::size_t strands = 480, std::size_t particles = 30) {
  ams::Rng rng(7);
  ams::StrandAsset asset;
  for (std::size_t s = 0; s < strands; ++s) {
    const double r = 0.01 * std::sqrt(rng.uniform01()), a = rng.uniform(0.0, 6.283);
    const double phase = rng.uniform(0.0, 6.283);
    asset.add_strand(helix(particles, Vec3(r * std::cos(a), 0.0, r * std::sin(a)), 0.004, 0.8, 0.005, phase));
  }
  return asset;
}

// Wisp scene at a coarse 1/8 s step: the head jumps between x = -5 cm and
// +5 cm every half second.
inline ams::SceneConfig wisp_scene(double kappa_alpha) {
  ams::SceneConfig scene;
  scene.particle_mass = 1e-7;
  scene.params.kappa_L = 1e6;
  scene.params.kappa_I = 0.0;
  scene.params.kappa_alpha = kappa_alpha;
  scene.params.dt = 1.0 / 8.0;
  scene.params.substeps = 1;
  scene.params.preload = false;
  std::vector<ams::TransformKeyframe> keys;
  for (int k = 0; k <= 200; ++k) {
    ams::RigidTransform pose;
    pose.translation = Vec3(k % 2 == 0 ? -0.05 : 0.05, 0.0, 0.0);
    keys.push_back({0.5 * k, pose});
  }
  scene.head = ams::TransformTrack(keys);
  scene.stages.collisions = false;
  scene.grid.spec.origin = Vec3(-0.25, -0.4, -0.25);
  scene.grid.spec.cell_size = 0.5 / 32.0;
  scene.grid.spec.resolution = {32, 32, 32};
  return scene;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("ams-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

}  // namespace amstest

