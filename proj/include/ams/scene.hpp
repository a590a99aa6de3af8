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

#include <ams/errors.hpp>
#include <ams/grid.hpp>
#include <ams/sdf.hpp>
#include <ams/strand.hpp>
#include <ams/strand_io.hpp>
#include <ams/transform_track.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ams {

inline constexpr const char* kSceneFormat = "ams-scene/1";

enum class SceneErrorCode {
  MalformedDocument,
  UnsupportedVersion,
  NonPositiveTimestep,
  InvalidSubsteps,
  NegativeStiffness,
  NonMonotoneKeyframes,
  MissingFile,
  InvalidValue,
};
const char* to_string(SceneErrorCode code);

struct SceneIssue {
  SceneErrorCode code;
  std::string message;
};

// Carries every validation problem found in a scene document.
class SceneError : public Error {
 public:
  explicit SceneError(std::vector<SceneIssue> issues);
  const std::vector<SceneIssue>& issues() const { return issues_; }
  bool has(SceneErrorCode code) const;

 private:
  std::vector<SceneIssue> issues_;
};

struct SphereShape {
  double radius = 0.1;
  int subdivisions = 3;
  Vec3 center = Vec3::Zero();
};

struct SolidConfig {
  std::string name;
  std::filesystem::path mesh;       // OBJ-style mesh, or
  std::optional<SphereShape> sphere;  // a generated sphere
  SdfBuildOptions sdf;
  TransformTrack track;
};

struct GridConfig {
  GridSpec spec;
  double regularize_strength = 0.5;
  int regularize_iterations = 1;
  int pressure_iterations = 0;
  int segment_samples = 1;
};

struct PairwiseConfig {
  double radius = 0.002;   // m
  double stiffness = 0.5;  // fraction of the overlap removed per frame
};

struct CurlNoiseConfig {
  double amplitude = 0.0;  // m/s^2
  double frequency = 4.0;  // 1/m
  double speed = 1.0;      // rad/s
  int octaves = 4;
};

// Wind is an acceleration field (m/s^2): keyframed uniform part plus curl noise.
struct WindConfig {
  VectorTrack uniform;
  CurlNoiseConfig noise;
};

struct StageToggles {
  bool grid = true;
  bool pairwise = false;
  bool collisions = true;
  bool non_hookean = true;
};

struct OutputConfig {
  int frame_stride = 1;
  std::string format = "amsf";
};

struct StrandOverride {
  std::size_t strand = 0;
  std::optional<double> kappa_I;
  std::optional<double> kappa_alpha;
  std::optional<double> particle_mass;
};

struct SceneConfig {
  std::filesystem::path base_dir;            // relative paths resolve here
  std::vector<std::filesystem::path> strand_files;
  double particle_mass = 1e-6;               // kg per particle
  SimParams params;
  TransformTrack head;
  std::vector<SolidConfig> solids;
  GridConfig grid;
  PairwiseConfig pairwise;
  WindConfig wind;
  StageToggles stages;
  OutputConfig output;
  std::uint64_t seed = 0;
  std::vector<StrandOverride> overrides;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

// Parses and validates a scene document; throws SceneError listing every issue.
SceneConfig parse_scene(const std::string& text, const std::filesystem::path& base_dir = {});
SceneConfig load_scene(const std::filesystem::path& path);
// Validation of an in-memory config (file checks only when check_files).
std::vector<SceneIssue> validate_scene(const SceneConfig& scene, bool check_files = true);

// Concatenates the scene's strand files.
StrandAsset load_scene_strands(const SceneConfig& scene);

}  // namespace ams
