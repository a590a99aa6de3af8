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

#include "cli.hpp"

#include <ams/banded_system.hpp>
#include <ams/errors.hpp>
#include <ams/growth.hpp>
#include <ams/integrator.hpp>
#include <ams/mesh.hpp>
#include <ams/rng.hpp>
#include <ams/scene.hpp>
#include <ams/server.hpp>
#include <ams/session.hpp>
#include <ams/simulation.hpp>
#include <ams/strand_io.hpp>

#include <CLI11.hpp>
#include <Eigen/LU>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace ams::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kOutputEnv = "AMS_OUTPUT_DIR";
constexpr const char* kDiagnosticsSchema = "# ams-diagnostics/1";
constexpr const char* kBenchSchema = "# ams-bench/1";

struct UsageError : Error {
  using Error::Error;
};

// Inputs named on the command line must exist; a missing one is a usage error.
void require_input(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + " " + path + ": no such file");
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return "out";
}

std::vector<int> parse_region(const std::string& spec, std::size_t faces) {
  std::vector<int> region;
  if (spec.empty() || spec == "all") {
    for (std::size_t f = 0; f < faces; ++f) region.push_back(static_cast<int>(f));
    return region;
  }
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      const auto dash = part.find('-');
      std::size_t used = 0;
      if (dash == std::string::npos) {
        region.push_back(std::stoi(part, &used));
        if (used != part.size()) throw UsageError("bad region entry '" + part + "'");
      } else {
        const int lo = std::stoi(part.substr(0, dash));
        const int hi = std::stoi(part.substr(dash + 1));
        if (hi < lo) throw UsageError("bad region range '" + part + "'");
        for (int f = lo; f <= hi; ++f) region.push_back(f);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad region entry '" + part + "'");
    }
  }
  for (int f : region)
    if (f < 0 || static_cast<std::size_t>(f) >= faces)
      throw UsageError("region triangle " + std::to_string(f) + " is not in the mesh");
  return region;
}

GrowthParams read_growth_params(const std::string& path) {
  GrowthParams p;
  if (path.empty()) return p;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open growth parameters " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("invalid growth parameter file: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("growth parameter file must hold an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw UsageError("growth parameter '" + key + "' must be a number");
    try {
      set_growth_param(p, key, value.get<double>());
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
  }
  return p;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("sweep axis must look like name=v1,v2,...");
  SweepAxis axis{spec.substr(0, eq), {}};
  std::stringstream ss(spec.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    try {
      std::size_t used = 0;
      axis.values.push_back(std::stod(v, &used));
      if (used != v.size()) throw std::invalid_argument(v);
    } catch (const std::logic_error&) {
      throw UsageError("bad sweep value '" + v + "'");
    }
  }
  if (axis.values.empty()) throw UsageError("sweep axis '" + axis.name + "' has no values");
  GrowthParams probe;
  try {
    get_growth_param(probe, axis.name);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  return axis;
}

// "AxB" sweeps A helix radii by B step sizes around the base parameters.
std::pair<SweepAxis, SweepAxis> parse_sweep(const std::vector<std::string>& specs, const GrowthParams& base) {
  if (specs.size() == 1) {
    const auto x = specs[0].find('x');
    int a = 0, b = 0;
    if (x != std::string::npos) {
      try {
        a = std::stoi(specs[0].substr(0, x));
        b = std::stoi(specs[0].substr(x + 1));
      } catch (const std::logic_error&) {
        a = b = 0;
      }
    }
    if (a < 1 || b < 1) throw UsageError("--sweep takes AxB or two name=values axes");
    SweepAxis h{"p_h", {}}, tau{"p_tau", {}};
    for (int k = 0; k < a; ++k) h.values.push_back(0.005 * k);
    for (int k = 0; k < b; ++k) tau.values.push_back(base.p_tau * (k + 1));
    return {h, tau};
  }
  if (specs.size() != 2) throw UsageError("--sweep takes AxB or exactly two name=values axes");
  return {parse_axis(specs[0]), parse_axis(specs[1])};
}

json params_json(const GrowthParams& p) {
  return {{"p_n", p.p_n},     {"p_Gamma", p.p_Gamma}, {"p_gamma", p.p_gamma}, {"p_Omega", p.p_Omega},
          {"p_h", p.p_h},     {"p_freq", p.p_freq},   {"p_tau", p.p_tau},     {"vertices", p.vertices},
          {"seed", p.seed},   {"noise_amplitude", p.noise_amplitude}};
}

struct GrowArgs {
  std::string mesh, region = "all", params, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> roots;
  std::optional<int> vertices;
  std::vector<std::string> sweep;
};

int cmd_grow(const GrowArgs& a, std::ostream& out) {
  require_input(a.mesh, "--mesh");
  TriangleMesh mesh = load_mesh(a.mesh);
  if (mesh.empty()) throw UsageError("mesh " + a.mesh + " has no faces");
  if (mesh.normals.size() != mesh.vertices.size()) mesh.compute_vertex_normals();
  const std::vector<int> region = parse_region(a.region, mesh.faces.size());
  GrowthParams params = read_growth_params(a.params);
  if (a.seed) params.seed = *a.seed;
  if (a.roots) params.p_n = *a.roots;
  if (a.vertices) params.vertices = *a.vertices;
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }

  if (a.sweep.empty()) {
    const fs::path path = a.out.empty() ? output_dir("") / "strands.ams" : fs::path(a.out);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const StrandAsset asset = grow_region(mesh, region, params);
    save_strands(asset, path);
    out << "wrote " << asset.strand_count() << " strands to " << path.string() << '\n';
    return kSuccess;
  }
  const auto [axis1, axis2] = parse_sweep(a.sweep, params);
  const fs::path dir = output_dir(a.out);
  fs::create_directories(dir);
  json manifest = {{"format", "ams-sweep/1"},
                   {"axes", {{{"name", axis1.name}, {"values", axis1.values}}, {{"name", axis2.name}, {"values", axis2.values}}}},
                   {"assets", json::array()}};
  for (const SweepAsset& s : parameter_sweep(mesh, region, params, axis1, axis2)) {
    const std::string name = "asset_r" + std::to_string(s.row) + "_c" + std::to_string(s.column) + ".ams";
    save_strands(s.asset, dir / name);
    manifest["assets"].push_back({{"file", name}, {"row", s.row}, {"column", s.column},
                                  {"strands", s.asset.strand_count()}, {"params", params_json(s.params)}});
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  out << "wrote " << manifest["assets"].size() << " assets and manifest.json to " << dir.string() << '\n';
  return kSuccess;
}

void apply_toggles(StageToggles& t, const std::string& spec) {
  if (spec.empty()) return;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("stage toggle must look like stage=on|off");
    const std::string name = item.substr(0, eq), value = item.substr(eq + 1);
    if (value != "on" && value != "off") throw UsageError("stage toggle value must be on or off");
    const bool on = value == "on";
    if (name == "grid") t.grid = on;
    else if (name == "pairwise") t.pairwise = on;
    else if (name == "collisions") t.collisions = on;
    else if (name == "non_hookean") t.non_hookean = on;
    else throw UsageError("unknown stage '" + name + "'");
  }
}

struct SimulateArgs {
  std::string scene, out, toggles;
  int frames = 100;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void write_diagnostics_row(std::ostream& csv, const FrameDiagnostics& d, double seconds) {
  csv << d.frame << ',' << d.time << ',' << d.max_velocity << ',' << d.max_edge_strain << ',' << d.inextensibility_passes
      << ',' << d.collisions << ',' << d.pairwise_pairs << ',' << d.grid_out_of_bounds << ',' << seconds << '\n';
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  require_input(a.scene, "--scene");
  if (a.frames < 0) throw UsageError("--frames must not be negative");
  SceneConfig scene = load_scene(a.scene);
  apply_toggles(scene.stages, a.toggles);
  if (a.seed) scene.seed = *a.seed;
  Simulation sim = Simulation::from_scene(scene, a.threads);

  const fs::path dir = output_dir(a.out);
  FrameSequenceWriter writer(dir, scene.output.frame_stride);
  std::ofstream csv(dir / "diagnostics.csv");
  if (!csv) throw IoError("cannot write " + (dir / "diagnostics.csv").string());
  csv.precision(9);
  csv << kDiagnosticsSchema << '\n'
      << "frame,time,max_velocity,max_edge_strain,inextensibility_passes,collisions,pairwise_pairs,grid_out_of_bounds,"
         "step_seconds\n";
  writer.write(sim.capture());
  for (int f = 0; f < a.frames; ++f) {
    const auto start = std::chrono::steady_clock::now();
    try {
      sim.step_frame();
    } catch (const DivergenceError& e) {
      err << "error: " << e.what() << "\n"
          << "diverged while computing frame " << sim.frame() + 1 << "; last good frame " << sim.frame() << '\n';
      return kDivergence;
    }
    write_diagnostics_row(csv, sim.last_diagnostics(),
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    writer.write(sim.capture());
  }
  out << "simulated " << a.frames << " frames of " << sim.strand_count() << " strands into " << dir.string() << '\n';
  return kSuccess;
}

struct BenchArgs {
  std::vector<int> strands{1, 32, 480};
  std::vector<int> particles{30};
  int repeats = 5;
  int frames = 20;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

Vec3List bench_strand(Rng& rng, int particles) {
  const double radius = rng.uniform(0.002, 0.006), phase = rng.uniform(0.0, 6.283);
  const Vec3 root(rng.uniform(-0.01, 0.01), 0.0, rng.uniform(-0.01, 0.01));
  Vec3List pts;
  for (int i = 0; i < particles; ++i)
    pts.push_back(root + Vec3(radius * (std::cos(phase + 0.8 * i) - std::cos(phase)), -0.005 * i,
                              radius * (std::sin(phase + 0.8 * i) - std::sin(phase))));
  return pts;
}

double dense_relative_error(const BandedSystem& system, const Vec3List& v) {
  const Eigen::VectorXd ref = system.to_dense().fullPivLu().solve(system.rhs_dense());
  Eigen::VectorXd got(ref.size());
  for (std::size_t i = 0; i < v.size(); ++i) got.segment<3>(3 * static_cast<Eigen::Index>(i)) = v[i];
  return (got - ref).norm() / std::max(ref.norm(), 1e-300);
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.repeats < 1 || a.frames < 0) throw UsageError("--repeats must be >= 1 and --frames >= 0");
  for (int s : a.strands)
    if (s < 1) throw UsageError("strand counts must be positive");
  for (int p : a.particles)
    if (p < 2) throw UsageError("particle counts must be at least 2");
  std::ofstream file;
  std::ostream* csv = &out;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw IoError("cannot write " + a.out);
    csv = &file;
  }
  *csv << kBenchSchema << '\n'
       << "strands,particles,assemble_seconds,solve_seconds,total_seconds,residual,frame_seconds,frames_per_second\n";
  csv->precision(6);
  using Clock = std::chrono::steady_clock;
  for (int strands : a.strands)
    for (int particles : a.particles) {
      Rng rng(splitmix64(a.seed ^ (static_cast<std::uint64_t>(strands) << 20) ^ static_cast<std::uint64_t>(particles)));
      SimParams params;
      params.substeps = 1;
      std::vector<Strand> set;
      std::vector<StrandState> states;
      std::vector<GhostConfig> ghosts;
      StrandAsset asset;
      for (int s = 0; s < strands; ++s) {
        const Vec3List pts = bench_strand(rng, particles);
        asset.add_strand(pts);
        set.push_back(Strand::uniform(asset.strand_positions(static_cast<std::size_t>(s)), 1e-6, params.stiffness()));
        StrandState st = StrandState::at_rest(set.back());
        for (std::size_t i = 1; i < st.size(); ++i)
          st.velocities[i] = Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
        states.push_back(st);
        ghosts.push_back(GhostConfig::from_rest(set.back()));
      }
      double assemble_s = 0.0, solve_s = 0.0, residual = 0.0;
      for (int r = 0; r < a.repeats; ++r)
        for (int s = 0; s < strands; ++s) {
          Vec3List gravity(set[s].particle_count(), 1e-6 * params.gravity);
          const auto t0 = Clock::now();
          const BandedSystem system = assemble(set[s], states[s], ghosts[s], params, params.dt, {gravity, {}, 0});
          const auto t1 = Clock::now();
          const Vec3List v = solve_banded(system);
          const auto t2 = Clock::now();
          assemble_s += std::chrono::duration<double>(t1 - t0).count();
          solve_s += std::chrono::duration<double>(t2 - t1).count();
          if (r == 0 && s == 0) residual = dense_relative_error(system, v);
        }
      assemble_s /= a.repeats;
      solve_s /= a.repeats;

      double frame_s = 0.0;
      if (a.frames > 0) {
        SceneConfig scene;
        scene.particle_mass = 1e-6;
        scene.stages.collisions = false;
        scene.grid.spec.resolution = {32, 32, 32};
        scene.grid.spec.cell_size = 0.5 / 32;
        scene.grid.spec.origin = Vec3(-0.25, -0.45, -0.25);
        Simulation sim(scene, asset, a.threads);
        const auto t0 = Clock::now();
        for (int f = 0; f < a.frames; ++f) sim.step_frame();
        frame_s = std::chrono::duration<double>(Clock::now() - t0).count() / a.frames;
      }
      *csv << strands << ',' << particles << ',' << assemble_s << ',' << solve_s << ',' << assemble_s + solve_s << ','
           << residual << ',' << frame_s << ',' << (frame_s > 0.0 ? 1.0 / frame_s : 0.0) << '\n';
    }
  return kSuccess;
}

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_signal(int) { g_interrupted = 1; }

struct ServeArgs {
  std::string scene, address = "127.0.0.1";
  int port = 8765;
  double fps = 30.0;
  int threads = 0;
  bool paused = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  require_input(a.scene, "--scene");
  if (a.port < 0 || a.port > 65535) throw UsageError("--port must be in [0, 65535]");
  if (!(a.fps > 0.0)) throw UsageError("--fps must be positive");
  Session session(Simulation::from_scene(load_scene(a.scene), a.threads), !a.paused);
  SessionServer server(session, {a.address, static_cast<unsigned short>(a.port), a.fps});
  const unsigned short port = server.start();
  out << "listening on ws://" << a.address << ':' << port << " (" << kProtocolVersion << ")" << std::endl;
  g_interrupted = 0;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted && server.running()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  server.stop();
  out << "stopped after " << session.sequence() << " frames" << std::endl;
  return kSuccess;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"AMS strand engine: procedural growth, simulation, solver benchmarks and the grooming session server"};
  app.name("ams");
  app.require_subcommand(1);
  app.set_version_flag("--version", "ams 1.0.0");
  app.footer("Exit codes: 0 success, 2 usage, 3 environment (files, ports), 4 numerical divergence.\n"
             "Output directory: --out, else $" + std::string(kOutputEnv) + ", else ./out.");

  GrowArgs grow;
  auto* g = app.add_subcommand("grow", "Grow strands on a mesh region");
  g->add_option("--mesh", grow.mesh, "Triangle mesh (v/vn/f text format)");
  g->add_option("--region", grow.region, "Triangle ids: all, or a list like 0-9,12")->capture_default_str();
  g->add_option("--params", grow.params, "JSON file with growth parameters (p_n, p_Gamma, p_gamma, p_Omega, p_h, p_freq, p_tau, vertices, noise_amplitude)");
  g->add_option("--seed", grow.seed, "Random seed");
  g->add_option("--roots-per-triangle", grow.roots, "Overrides p_n");
  g->add_option("--vertices", grow.vertices, "Vertices per strand");
  g->add_option("--out", grow.out, "Output asset (.ams binary, .txt text); a directory with --sweep");
  g->add_option("--sweep", grow.sweep, "AxB (helix radius by step size) or two name=v1,v2,... axes")->expected(1, 2);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a scene and write frames plus diagnostics.csv");
  s->add_option("--scene", sim.scene, "Scene file (JSON, ams-scene/1)");
  s->add_option("--frames", sim.frames, "Number of frames to simulate")->capture_default_str();
  s->add_option("--out", sim.out, "Output directory");
  s->add_option("--stage-toggles", sim.toggles, "Comma list of stage=on|off (grid, pairwise, collisions, non_hookean)");
  s->add_option("--seed", sim.seed, "Overrides the scene seed");
  s->add_option("--threads", sim.threads, "Worker threads (0 = all cores); results do not depend on it")->capture_default_str();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Time assembly and banded solves; CSV with a dense-oracle residual");
  b->add_option("--strands", bench.strands, "Strand counts, one row each (default 1 32 480)");
  b->add_option("--particles", bench.particles, "Particles per strand (default 30)");
  b->add_option("--repeats", bench.repeats, "Timing repeats per row")->capture_default_str();
  b->add_option("--frames", bench.frames, "Full frames timed per row (grid 32^3); 0 skips")->capture_default_str();
  b->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
  b->add_option("--threads", bench.threads, "Worker threads (0 = all cores)")->capture_default_str();
  b->add_option("--out", bench.out, "CSV path (default stdout)");

  ServeArgs serve;
  auto* v = app.add_subcommand("serve", "Serve an interactive session over websockets");
  v->add_option("--scene", serve.scene, "Scene file (JSON, ams-scene/1)");
  v->add_option("--address", serve.address, "Listen address")->capture_default_str();
  v->add_option("--port", serve.port, "Listen port (0 picks a free one)")->capture_default_str();
  v->add_option("--fps", serve.fps, "Simulation and broadcast rate")->capture_default_str();
  v->add_option("--threads", serve.threads, "Worker threads (0 = all cores)")->capture_default_str();
  v->add_flag("--paused", serve.paused, "Start paused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    if (*g) return cmd_grow(grow, out);
    if (*s) return cmd_simulate(sim, out, err);
    if (*b) return cmd_bench(bench, out);
    if (*v) return cmd_serve(serve, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun 'ams --help' for usage.\n";
    return kUsage;
  } catch (const SceneError& e) {
    const bool missing = e.issues().size() == 1 && e.issues().front().code == SceneErrorCode::MissingFile;
    err << "error: " << e.what() << '\n';
    return missing ? kEnvironment : kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace ams::cli
