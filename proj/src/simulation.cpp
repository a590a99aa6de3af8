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

#include <ams/simulation.hpp>

#include <ams/errors.hpp>
#include <ams/mesh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ams {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct StageTimer {
  FrameDiagnostics& diag;
  Clock::time_point start = Clock::now();
  void mark(const char* name) {
    diag.stage_trace.emplace_back(name);
    diag.stage_seconds.emplace_back(name, seconds_since(start));
    start = Clock::now();
  }
};

SolidBody make_solid(const SceneConfig& scene, const SolidConfig& config) {
  TriangleMesh mesh;
  if (config.sphere)
    mesh = make_icosphere(config.sphere->subdivisions, config.sphere->radius, config.sphere->center);
  else
    mesh = load_mesh(scene.resolve(config.mesh));
  SolidBody body{config, build_sdf(mesh, config.sdf)};
  body.sdf.set_motion(config.track.motion(0.0, scene.params.dt));
  return body;
}

}  // namespace

Simulation::Simulation(SceneConfig scene, const StrandAsset& asset, int threads)
    : scene_(std::move(scene)), asset_(asset), params_(scene_.params), pool_(threads) {
  if (auto issues = validate_scene(scene_, false); !issues.empty()) throw SceneError(std::move(issues));
  asset_.validate();
  initial_asset_ = asset_;
  for (const auto& o : scene_.overrides)
    if (o.strand >= asset_.strand_count())
      throw InvalidArgument("override refers to missing strand " + std::to_string(o.strand));
  initial_scene_ = scene_;
  for (const auto& solid : scene_.solids) solids_.push_back(make_solid(scene_, solid));
  build_strands();
}

Simulation Simulation::from_scene(const SceneConfig& scene, int threads) {
  return Simulation(scene, load_scene_strands(scene), threads);
}

void Simulation::build_strands() {
  const std::size_t count = asset_.strand_count();
  wind_ = WindField(scene_.wind, scene_.seed);
  strands_.clear();
  states_.clear();
  ghosts_.clear();
  anchors_.assign(count, {});
  const RigidTransform head = scene_.head.sample(0.0);
  const SpringStiffness stiffness = params_.stiffness();
  for (std::size_t s = 0; s < count; ++s) {
    double mass = scene_.particle_mass;
    for (const auto& o : scene_.overrides)
      if (o.strand == s && o.particle_mass) mass = *o.particle_mass;
    strands_.push_back(Strand::uniform(asset_.strand_positions(s), mass, stiffness));
    states_.push_back(StrandState::at_rest(strands_.back(), head));
    ghosts_.emplace_back();
    rebuild_ghosts(s);
  }
  grid_before_ = EulerianGrid(scene_.grid.spec, head);
  grid_after_ = grid_before_;
  frame_ = 0;
  time_ = 0.0;
  diagnostics_ = {};
}

SimParams Simulation::strand_params(std::size_t strand) const {
  SimParams p = params_;
  for (const auto& o : scene_.overrides) {
    if (o.strand != strand) continue;
    if (o.kappa_I) p.kappa_I = *o.kappa_I;
    if (o.kappa_alpha) p.kappa_alpha = *o.kappa_alpha;
  }
  return p;
}

void Simulation::rebuild_ghosts(std::size_t s) {
  const SimParams p = strand_params(s);
  const RigidTransform head = scene_.head.sample(time_);
  Vec3List offsets;
  if (p.preload && p.kappa_I > 0.0) offsets = preload_ghost_offsets(strands_[s], p.kappa_I, p.gravity, head.rotation);
  ghosts_[s] = GhostConfig::from_rest(strands_[s], std::move(offsets));
  ghosts_[s].place(strands_[s], head);
}

std::vector<std::uint32_t> Simulation::topology() const {
  std::vector<std::uint32_t> counts;
  for (const Strand& s : strands_) counts.push_back(static_cast<std::uint32_t>(s.particle_count()));
  return counts;
}

Frame Simulation::capture() const {
  Frame frame;
  frame.index = frame_;
  for (const StrandState& s : states_)
    for (const Vec3& p : s.positions)
      for (int a = 0; a < 3; ++a) frame.positions.push_back(static_cast<float>(p[a]));
  return frame;
}

const FrameDiagnostics& Simulation::step_frame() {
  const double dt = params_.dt;
  const double t0 = time_;
  const double t1 = time_ + dt;
  const std::size_t count = strands_.size();

  FrameDiagnostics diag;
  diag.frame = frame_ + 1;
  diag.time = t1;
  diag.kappa_L = params_.kappa_L;
  diag.kappa_I = params_.kappa_I;
  diag.kappa_alpha = params_.kappa_alpha;
  StageTimer timer{diag};

  auto fail = [&](std::size_t strand, const std::string& why) {
    diag.diverged = true;
    diag.divergent_strand = strand;
    diag.divergence_reason = why;
    diagnostics_ = diag;
    throw DivergenceError(strand, why);
  };

  // Ghosts and solids follow their tracks before any real particle moves.
  const RigidTransform head = scene_.head.sample(t1);
  std::vector<GhostConfig> ghosts = ghosts_;
  for (std::size_t s = 0; s < count; ++s) ghosts[s].update(strands_[s], head, dt);
  std::vector<RigidMotion> solid_motion;
  for (const SolidBody& b : solids_) solid_motion.push_back(b.config.track.motion(t1, dt));
  timer.mark("ghost_update");

  std::vector<StrandState> next = states_;
  std::vector<std::string> errors(count);
  pool_.run([&] {
    parallel_for(count, [&](std::size_t s) {
      const Strand& strand = strands_[s];
      const SimParams p = strand_params(s);
      Vec3List external(strand.particle_count());
      for (std::size_t i = 0; i < external.size(); ++i)
        external[i] = strand.masses()[i] * (p.gravity + wind_.at(states_[s].positions[i], t0));
      StepContext context{external, anchors_[s], s};
      try {
        substep_integrate(strand, next[s], ghosts[s], p, dt, context);
      } catch (const DivergenceError& e) {
        errors[s] = e.what();
      } catch (const SingularBlockError& e) {
        errors[s] = e.what();
      }
    });
  });
  for (std::size_t s = 0; s < count; ++s)
    if (!errors[s].empty()) fail(s, errors[s]);
  timer.mark("substep_integrate");

  std::vector<int> passes(count, 0);
  pool_.run([&] {
    parallel_for(count, [&](std::size_t s) {
      passes[s] = apply_inextensibility(strands_[s], next[s], dt, params_.inextensibility_tolerance);
    });
  });
  for (int p : passes) diag.inextensibility_passes = std::max(diag.inextensibility_passes, p);
  timer.mark("inextensibility");

  if (scene_.stages.grid) {
    grid_before_.set_anchor(head);
    RasterizeStats stats;
    pool_.run([&] {
      stats = rasterize(strands_, next, grid_before_, RasterizeOptions{scene_.grid.segment_samples});
    });
    diag.grid_out_of_bounds = stats.out_of_bounds;
    timer.mark("rasterize");
    grid_after_ = grid_before_;
    grid_regularize(grid_after_, scene_.grid.regularize_strength, scene_.grid.regularize_iterations);
    if (scene_.grid.pressure_iterations > 0) grid_project_divergence(grid_after_, scene_.grid.pressure_iterations);
    timer.mark("grid_regularize");
    pool_.run([&] { transfer_back(grid_before_, grid_after_, next, params_.flip_blend); });
    timer.mark("transfer_back");
  }

  if (scene_.stages.pairwise && scene_.pairwise.radius > 0.0) {
    const PairwiseStats stats =
        pool_.run([&] { return resolve_pairwise(strands_, next, scene_.pairwise.radius, scene_.pairwise.stiffness, dt); });
    diag.pairwise_pairs = stats.pairs;
    timer.mark("resolve_pairwise");
  }

  if (scene_.stages.collisions && !solids_.empty()) {
    std::vector<SdfField> fields;
    for (std::size_t b = 0; b < solids_.size(); ++b) {
      fields.push_back(solids_[b].sdf);
      fields.back().set_motion(solid_motion[b]);
    }
    // The integrated position is the predicted target; corrections restart
    // from the frame-start position.
    auto nearest = [&](const Vec3& p, double& phi) {
      const SdfField* best = &fields.front();
      phi = best->distance(p);
      for (const SdfField& f : fields) {
        const double d = f.distance(p);
        if (d < phi) {
          best = &f;
          phi = d;
        }
      }
      return best;
    };
    std::vector<std::vector<std::size_t>> colliding(count);
    std::vector<Vec3List> corrected(count);
    pool_.run([&] {
      parallel_for(count, [&](std::size_t s) {
        const StrandState& st = next[s];
        for (std::size_t i = 1; i < st.positions.size(); ++i) {
          double phi;
          const SdfField* solid = nearest(st.positions[i], phi);
          if (phi >= 0.0) continue;
          const Vec3& start = states_[s].positions[i];
          colliding[s].push_back(i);
          corrected[s].push_back(collide_velocity(start, (st.positions[i] - start) / dt, dt, *solid, params_.friction));
        }
      });
    });
    timer.mark("collide_velocity");
    pool_.run([&] {
      parallel_for(count, [&](std::size_t s) {
        StrandState& st = next[s];
        for (std::size_t k = 0; k < colliding[s].size(); ++k) {
          const std::size_t i = colliding[s][k];
          const Vec3& start = states_[s].positions[i];
          double phi;
          const SdfField* solid = nearest(start + dt * corrected[s][k], phi);
          st.velocities[i] = corrected[s][k];
          st.positions[i] = collide_position(start, corrected[s][k], dt, *solid);
        }
      });
    });
    std::vector<std::size_t> hits(count);
    for (std::size_t s = 0; s < count; ++s) hits[s] = colliding[s].size();
    for (std::size_t h : hits) diag.collisions += h;
    timer.mark("collide_position");
  }

  if (scene_.stages.non_hookean) {
    pool_.run([&] {
      parallel_for(count, [&](std::size_t s) { non_hookean_update(next[s], ghosts[s], params_.non_hookean); });
    });
    timer.mark("non_hookean_update");
  }

  for (std::size_t s = 0; s < count; ++s) {
    try {
      check_divergence(next[s], strand_params(s), s);
    } catch (const DivergenceError& e) {
      fail(s, e.what());
    }
    for (std::size_t i = 0; i < next[s].size(); ++i)
      diag.max_velocity = std::max(diag.max_velocity, next[s].velocities[i].norm());
    diag.max_edge_strain = std::max(diag.max_edge_strain, max_edge_strain(strands_[s], next[s].positions));
  }

  states_ = std::move(next);
  ghosts_ = std::move(ghosts);
  for (auto& list : anchors_)
    for (AnchorSpring& a : list) a.target_velocity.setZero();
  ++frame_;
  time_ = t1;
  diagnostics_ = std::move(diag);
  return diagnostics_;
}

void Simulation::set_params(const SimParams& params) {
  params.validate();
  const bool reload = params.kappa_I != params_.kappa_I || params.preload != params_.preload ||
                      params.gravity != params_.gravity;
  params_ = params;
  scene_.params = params;
  const SpringStiffness stiffness = params_.stiffness();
  for (Strand& s : strands_) s.springs().set_stiffness(stiffness);
  if (reload)
    for (std::size_t s = 0; s < strands_.size(); ++s) {
      const Vec3List velocities = ghosts_[s].velocities;
      rebuild_ghosts(s);
      ghosts_[s].velocities = velocities;
    }
}

void Simulation::set_param(const std::string& key, double value) {
  if (!std::isfinite(value)) throw InvalidArgument("parameter value must be finite");
  SimParams p = params_;
  if (key == "kappa_L") {
    p.kappa_L = value;
    p.kappa_edge.reset();
    p.kappa_bending.reset();
    p.kappa_torsion.reset();
  } else if (key == "kappa_I") p.kappa_I = value;
  else if (key == "kappa_alpha") p.kappa_alpha = value;
  else if (key == "damping") p.damping = value;
  else if (key == "friction") p.friction = value;
  else if (key == "flip_blend") p.flip_blend = value;
  else if (key == "substeps") {
    if (value != std::floor(value)) throw InvalidArgument("substeps must be an integer");
    p.substeps = static_cast<int>(value);
  } else if (key == "gravity_x") p.gravity.x() = value;
  else if (key == "gravity_y") p.gravity.y() = value;
  else if (key == "gravity_z") p.gravity.z() = value;
  else throw InvalidArgument("unknown parameter '" + key + "'");
  set_params(p);
}

void Simulation::set_wind(const WindConfig& wind) {
  scene_.wind = wind;
  wind_ = WindField(wind, scene_.seed);
}

void Simulation::check_strand(std::size_t strand) const {
  if (strand >= strands_.size()) throw InvalidArgument("unknown strand " + std::to_string(strand));
}

void Simulation::trim(std::size_t s, double fraction) {
  check_strand(s);
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("trim fraction must lie in (0, 1]");
  const Strand& old = strands_[s];
  const double limit = fraction * old.rest_length();
  const double slack = 1e-12 * old.rest_length();
  std::size_t keep = 1;
  double arc = 0.0;
  for (std::size_t i = 1; i < old.particle_count(); ++i) {
    arc += old.rest_edge_length(i - 1);
    if (arc > limit + slack) break;
    keep = i + 1;
  }
  keep = std::max<std::size_t>(keep, 2);
  if (keep == old.particle_count()) return;

  Vec3List rest(old.rest_positions().begin(), old.rest_positions().begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<double> masses(old.masses().begin(), old.masses().begin() + static_cast<std::ptrdiff_t>(keep));
  strands_[s] = Strand(std::move(rest), std::move(masses), params_.stiffness());
  StrandState& st = states_[s];
  st.positions.resize(keep);
  st.velocities.resize(keep);
  st.plasticity.resize(keep);
  rebuild_ghosts(s);
  auto& list = anchors_[s];
  list.erase(std::remove_if(list.begin(), list.end(), [&](const AnchorSpring& a) { return a.particle >= keep; }),
             list.end());

  // Keep the asset in sync so reset-free captures and topology agree.
  StrandAsset updated;
  for (std::size_t k = 0; k < strands_.size(); ++k) updated.add_strand(k == s ? strands_[k].rest_positions() : asset_.strand_positions(k));
  asset_ = std::move(updated);
}

void Simulation::grab(std::size_t s, std::size_t particle, const Vec3& target, double stiffness) {
  check_strand(s);
  if (particle == 0 || particle >= strands_[s].particle_count())
    throw InvalidArgument("particle " + std::to_string(particle) + " cannot be grabbed on strand " + std::to_string(s));
  if (!(stiffness > 0.0) || !target.allFinite()) throw InvalidArgument("grab needs a finite target and positive stiffness");
  anchors_[s] = {AnchorSpring{particle, target, Vec3::Zero(), stiffness}};
}

void Simulation::move_grab(std::size_t s, const Vec3& target) {
  check_strand(s);
  if (anchors_[s].empty()) throw InvalidArgument("strand " + std::to_string(s) + " is not grabbed");
  if (!target.allFinite()) throw InvalidArgument("grab target must be finite");
  AnchorSpring& a = anchors_[s].front();
  a.target_velocity = (target - a.target) / params_.dt;
  a.target = target;
}

void Simulation::release(std::size_t s) {
  check_strand(s);
  anchors_[s].clear();
}

void Simulation::reset() {
  scene_ = initial_scene_;
  params_ = scene_.params;
  asset_ = initial_asset_;
  build_strands();
}

}  // namespace ams
