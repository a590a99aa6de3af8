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

#include <vector>

namespace ams {

struct TransformKeyframe {
  double time = 0.0;  // s
  RigidTransform pose;
};

// Keyframed rigid transform: linear translation, spherical rotation, held
// constant outside the keyframe range. An empty track is the identity.
class TransformTrack {
 public:
  TransformTrack() = default;
  // Throws InvalidArgument unless times are strictly increasing.
  explicit TransformTrack(std::vector<TransformKeyframe> keys);

  const std::vector<TransformKeyframe>& keyframes() const { return keys_; }
  bool empty() const { return keys_.empty(); }
  RigidTransform sample(double t) const;
  // Pose at t with velocities from the backward difference over dt.
  RigidMotion motion(double t, double dt) const;

 private:
  std::vector<TransformKeyframe> keys_;
};

struct VectorKeyframe {
  double time = 0.0;
  Vec3 value = Vec3::Zero();
};

// Piecewise-linear vector track, constant outside its range; empty is zero.
class VectorTrack {
 public:
  VectorTrack() = default;
  explicit VectorTrack(std::vector<VectorKeyframe> keys);
  const std::vector<VectorKeyframe>& keyframes() const { return keys_; }
  Vec3 sample(double t) const;

 private:
  std::vector<VectorKeyframe> keys_;
};

}  // namespace ams
