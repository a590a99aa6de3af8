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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <vector>

namespace ams {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

using Vec3List = std::vector<Vec3>;

// Rigid transform x -> rotation * x + translation.
struct RigidTransform {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& p) const { return rotation.conjugate() * (p - translation); }
  Vec3 rotate(const Vec3& d) const { return rotation * d; }
  Vec3 rotate_inverse(const Vec3& d) const { return rotation.conjugate() * d; }

  static RigidTransform identity() { return {}; }
};

// Rigid motion sample: pose plus linear/angular velocity about the pose origin.
struct RigidMotion {
  RigidTransform pose;
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();

  Vec3 velocity_at(const Vec3& p) const {
    return linear_velocity + angular_velocity.cross(p - pose.translation);
  }
};

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace ams
