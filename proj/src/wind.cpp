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

#include <ams/wind.hpp>

#include <ams/rng.hpp>

#include <cmath>
#include <numbers>

namespace ams {

namespace {

Vec3 random_unit(Rng& rng) {
  // Uniform on the sphere via z and azimuth.
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

WindField::WindField(const WindConfig& config, std::uint64_t seed) : config_(config) {
  Rng rng(splitmix64(seed ^ 0x77696e64ULL));
  double total = 0.0;
  for (int o = 0; o < config_.noise.octaves; ++o) {
    Wave w;
    const double scale = std::ldexp(1.0, o);
    const Vec3 dir = random_unit(rng);
    w.k = config_.noise.frequency * scale * dir;
    w.curl = dir.cross(random_unit(rng));
    w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    w.weight = 1.0 / scale;
    total += w.weight;
    waves_.push_back(w);
  }
  for (Wave& w : waves_) w.weight /= total;
}

Vec3 WindField::at(const Vec3& x, double t) const {
  Vec3 a = uniform(t);
  if (config_.noise.amplitude == 0.0) return a;
  for (const Wave& w : waves_)
    a += (config_.noise.amplitude * w.weight * std::cos(w.k.dot(x) + config_.noise.speed * t + w.phase)) * w.curl;
  return a;
}

}  // namespace ams
