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

#include <ams/transform_track.hpp>

#include <ams/errors.hpp>

#include <algorithm>

namespace ams {

namespace {

template <typename Key>
void require_increasing(const std::vector<Key>& keys) {
  for (std::size_t k = 1; k < keys.size(); ++k)
    if (!(keys[k].time > keys[k - 1].time)) throw InvalidArgument("keyframe times must be strictly increasing");
}

// Index of the last key with time <= t, and the blend factor towards the next.
template <typename Key>
std::pair<std::size_t, double> locate(const std::vector<Key>& keys, double t) {
  if (t <= keys.front().time) return {0, 0.0};
  if (t >= keys.back().time) return {keys.size() - 1, 0.0};
  const auto it = std::upper_bound(keys.begin(), keys.end(), t, [](double v, const Key& k) { return v < k.time; });
  const std::size_t hi = static_cast<std::size_t>(it - keys.begin());
  const double span = keys[hi].time - keys[hi - 1].time;
  return {hi - 1, (t - keys[hi - 1].time) / span};
}

}  // namespace

TransformTrack::TransformTrack(std::vector<TransformKeyframe> keys) : keys_(std::move(keys)) {
  require_increasing(keys_);
  for (auto& k : keys_) k.pose.rotation.normalize();
}

RigidTransform TransformTrack::sample(double t) const {
  if (keys_.empty()) return {};
  const auto [k, f] = locate(keys_, t);
  if (f == 0.0) return keys_[k].pose;
  const RigidTransform& a = keys_[k].pose;
  const RigidTransform& b = keys_[k + 1].pose;
  RigidTransform out;
  out.translation = (1.0 - f) * a.translation + f * b.translation;
  out.rotation = a.rotation.slerp(f, b.rotation).normalized();
  return out;
}

RigidMotion TransformTrack::motion(double t, double dt) const {
  RigidMotion m;
  m.pose = sample(t);
  if (keys_.size() < 2 || !(dt > 0.0)) return m;
  const RigidTransform prev = sample(t - dt);
  m.linear_velocity = (m.pose.translation - prev.translation) / dt;
  const Eigen::AngleAxisd delta(m.pose.rotation * prev.rotation.conjugate());
  m.angular_velocity = delta.axis() * (delta.angle() / dt);
  if (!m.angular_velocity.allFinite()) m.angular_velocity.setZero();
  return m;
}

VectorTrack::VectorTrack(std::vector<VectorKeyframe> keys) : keys_(std::move(keys)) { require_increasing(keys_); }

Vec3 VectorTrack::sample(double t) const {
  if (keys_.empty()) return Vec3::Zero();
  const auto [k, f] = locate(keys_, t);
  if (f == 0.0) return keys_[k].value;
  return (1.0 - f) * keys_[k].value + f * keys_[k + 1].value;
}

}  // namespace ams
