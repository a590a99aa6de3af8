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

#include <ams/scene.hpp>
#include <ams/types.hpp>

#include <cstdint>
#include <vector>

namespace ams {

// Acceleration field: keyframed uniform part plus a divergence-free sum of
// plane waves (each term is cos(k.x + s t + phase) (k x a)).
class WindField {
 public:
  WindField() = default;
  WindField(const WindConfig& config, std::uint64_t seed);

  Vec3 uniform(double t) const { return config_.uniform.sample(t); }
  Vec3 at(const Vec3& x, double t) const;
  const WindConfig& config() const { return config_; }

 private:
  struct Wave {
    Vec3 k;       // wave vector, 1/m
    Vec3 curl;    // unit(k) x a
    double phase = 0.0;
    double weight = 0.0;
  };
  WindConfig config_;
  std::vector<Wave> waves_;
};

}  // namespace ams
