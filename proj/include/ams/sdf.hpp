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

#include <ams/mesh.hpp>
#include <ams/types.hpp>

#include <array>
#include <filesystem>
#include <vector>

namespace ams {

enum class SignMode { FloodFill, WindingNumber };

struct SdfBuildOptions {
  int resolution = 32;   // nodes along the longest axis
  double padding = 0.1;  // m added on every side of the mesh bounds
  SignMode sign = SignMode::FloodFill;
};

// Node-sampled signed distance (negative inside) in the solid's local frame,
// with central-difference gradients and the solid's current rigid motion.
class SdfField {
 public:
  SdfField() = default;
  SdfField(std::array<int, 3> dims, const Vec3& origin, double cell_size, std::vector<double> phi);

  const std::array<int, 3>& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  double cell_size() const { return cell_size_; }
  const std::vector<double>& values() const { return phi_; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
  }
  double node_value(int i, int j, int k) const { return phi_[index(i, j, k)]; }
  Vec3 node_position(int i, int j, int k) const { return origin_ + cell_size_ * Vec3(i, j, k); }  // local

  const RigidMotion& motion() const { return motion_; }
  void set_motion(const RigidMotion& motion) { motion_ = motion; }

  // World-space queries (trilinear in the local frame).
  double distance(const Vec3& world) const;
  Vec3 gradient(const Vec3& world) const;  // unnormalised, world frame
  // Unit outward normal; falls back to the nearest node with a non-zero
  // gradient. Returns false if none is found.
  bool normal(const Vec3& world, Vec3& out) const;

  double local_distance(const Vec3& local) const;
  Vec3 local_gradient(const Vec3& local) const;

  void save(const std::filesystem::path& path) const;
  static SdfField load(const std::filesystem::path& path);

 private:
  void compute_gradient();
  Vec3 clamp_local(const Vec3& local) const;

  std::array<int, 3> dims_{0, 0, 0};
  Vec3 origin_ = Vec3::Zero();
  double cell_size_ = 1.0;
  std::vector<double> phi_;
  Vec3List grad_;
  RigidMotion motion_;
};

// Throws InvalidArgument for an empty mesh.
SdfField build_sdf(const TriangleMesh& mesh, const SdfBuildOptions& options = {});

// Generalised winding number of a closed mesh around p (about 1 inside, 0 outside).
double winding_number(const TriangleMesh& mesh, const Vec3& p);

// Rigid velocity of the solid at a world point.
Vec3 rigid_velocity_at(const SdfField& sdf, const Vec3& p);

// Predictive friction response for a particle whose advected position
// x + dt v would lie inside the solid.
Vec3 collide_velocity(const Vec3& x, const Vec3& v, double dt, const SdfField& sdf, double friction);

// Advects x by dt v' and projects the result back to the zero level set if
// it is inside.
Vec3 collide_position(const Vec3& x, const Vec3& v, double dt, const SdfField& sdf);

}  // namespace ams
