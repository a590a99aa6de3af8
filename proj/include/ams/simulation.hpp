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

#include <ams/frame_io.hpp>
#include <ams/grid.hpp>
#include <ams/integrator.hpp>
#include <ams/parallel.hpp>
#include <ams/scene.hpp>
#include <ams/sdf.hpp>
#include <ams/strand.hpp>
#include <ams/wind.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ams {

struct SolidBody {
  SolidConfig config;
  SdfField sdf;
};

struct FrameDiagnostics {
  std::uint32_t frame = 0;  // index of the frame this step produced
  double time = 0.0;
  double max_velocity = 0.0;
  double max_edge_strain = 0.0;
  int inextensibility_passes = 0;  // worst strand
  std::size_t collisions = 0;
  std::size_t pairwise_pairs = 0;
  std::size_t grid_out_of_bounds = 0;
  bool diverged = false;
  std::optional<std::size_t> divergent_strand;
  std::string divergence_reason;
  std::vector<std::string> stage_trace;
  std::vector<std::pair<std::string, double>> stage_seconds;
  double kappa_L = 0.0, kappa_I = 0.0, kappa_alpha = 0.0;  // live values used by this step
};

// Owns every strand's state and advances the whole scene one frame at a time.
// A frame either completes and commits, or throws DivergenceError and leaves
// the previous state untouched.
class Simulation {
 public:
  Simulation(SceneConfig scene, const StrandAsset& asset, int threads = 0);
  // Loads the strand files and builds the solids' SDFs.
  static Simulation from_scene(const SceneConfig& scene, int threads = 0);

  const FrameDiagnostics& step_frame();
  const FrameDiagnostics& last_diagnostics() const { return diagnostics_; }

  std::uint32_t frame() const { return frame_; }
  double time() const { return time_; }
  const SceneConfig& scene() const { return scene_; }
  const SimParams& params() const { return params_; }
  SimParams strand_params(std::size_t strand) const;
  StageToggles& stages() { return scene_.stages; }
  const StageToggles& stages() const { return scene_.stages; }

  std::size_t strand_count() const { return strands_.size(); }
  std::span<const Strand> strands() const { return strands_; }
  std::span<const StrandState> states() const { return states_; }
  std::span<const GhostConfig> ghosts() const { return ghosts_; }
  std::span<const SolidBody> solids() const { return solids_; }
  std::vector<std::uint32_t> topology() const;
  Frame capture() const;

  // Live edits; callers apply them between frames.
  void set_params(const SimParams& params);
  // Keys: kappa_L, kappa_I, kappa_alpha, damping, friction, flip_blend,
  // substeps, gravity_x/y/z. Throws InvalidArgument on unknown keys/values.
  void set_param(const std::string& key, double value);
  void set_wind(const WindConfig& wind);
  // Keeps the particles whose rest arc length is within fraction * length.
  void trim(std::size_t strand, double fraction);
  void grab(std::size_t strand, std::size_t particle, const Vec3& target, double stiffness);
  void move_grab(std::size_t strand, const Vec3& target);
  void release(std::size_t strand);
  std::span<const AnchorSpring> anchors(std::size_t strand) const { return anchors_.at(strand); }
  // Back to the initial asset, parameters and frame 0.
  void reset();

 private:
  void build_strands();
  void rebuild_ghosts(std::size_t strand);
  void check_strand(std::size_t strand) const;

  SceneConfig scene_;
  SceneConfig initial_scene_;
  StrandAsset asset_;
  StrandAsset initial_asset_;
  SimParams params_;
  std::vector<SolidBody> solids_;
  WindField wind_;
  WorkerPool pool_;

  std::vector<Strand> strands_;
  std::vector<StrandState> states_;
  std::vector<GhostConfig> ghosts_;
  std::vector<std::vector<AnchorSpring>> anchors_;
  EulerianGrid grid_before_, grid_after_;

  std::uint32_t frame_ = 0;
  double time_ = 0.0;
  FrameDiagnostics diagnostics_;
};

// Stage names in execution order, as they appear in the stage trace.
inline constexpr const char* kStageNames[] = {"ghost_update",     "substep_integrate", "inextensibility",
                                              "rasterize",        "grid_regularize",   "transfer_back",
                                              "resolve_pairwise", "collide_velocity",  "collide_position",
                                              "non_hookean_update"};

}  // namespace ams
