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

#include "support.hpp"

#include <cli.hpp>

#include <ams/frame_io.hpp>
#include <ams/strand_io.hpp>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

using namespace ams;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ams");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

// Small scene: a row of strands brushing a ball, curl-noise wind, grid on.
fs::path write_small_scene(const amstest::TempDir& dir) {
  StrandAsset a;
  for (int s = 0; s < 6; ++s) a.add_strand(amstest::straight_strand(20, Vec3(0.004 * s, 0, 0), Vec3(0.004, -0.001, 0)));
  save_strands(a, dir / "hair.txt");
  const json scene = {
      {"format", "ams-scene/1"},
      {"strands", "hair.txt"},
      {"particle_mass", 1e-5},
      {"params", {{"fps", 60}, {"substeps", 2}}},
      {"solids", {{{"name", "ball"}, {"sphere", {{"radius", 0.02}, {"subdivisions", 2}, {"center", {0.04, -0.05, 0}}}},
                   {"sdf_resolution", 16}}}},
      {"grid", {{"origin", {-0.15, -0.2, -0.15}}, {"cell_size", 0.3 / 16}, {"resolution", {16, 16, 16}}}},
      {"wind", {{"curl_noise", {{"amplitude", 2.0}}}}},
      {"seed", 3}};
  std::ofstream(dir / "scene.json") << scene.dump(2);
  return dir / "scene.json";
}

// The wisp with the angular term off, which loses a pivot a few frames in.
fs::path write_unstable_scene(const amstest::TempDir& dir) {
  save_strands(amstest::wisp_asset(), dir / "wisp.ams");
  json keys = json::array();
  for (int k = 0; k <= 200; ++k) keys.push_back({{"time", 0.5 * k}, {"translation", {k % 2 == 0 ? -0.05 : 0.05, 0, 0}}});
  const json scene = {{"format", "ams-scene/1"},
                      {"strands", "wisp.ams"},
                      {"particle_mass", 1e-7},
                      {"params",
                       {{"kappa_L", 1e6}, {"kappa_I", 0}, {"kappa_alpha", 0}, {"dt", 0.125}, {"substeps", 1}, {"preload", false}}},
                      {"head", {{"keyframes", keys}}},
                      {"grid", {{"origin", {-0.25, -0.4, -0.25}}, {"cell_size", 0.5 / 32}, {"resolution", {32, 32, 32}}}},
                      {"stages", {{"collisions", false}}}};
  std::ofstream(dir / "unstable.json") << scene.dump();
  return dir / "unstable.json";
}

}  // namespace

TEST(CliHelp, MatchesSnapshots) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"help_main.txt", {"--help"}},
      {"help_grow.txt", {"grow", "--help"}},
      {"help_simulate.txt", {"simulate", "--help"}},
      {"help_bench.txt", {"bench", "--help"}},
      {"help_serve.txt", {"serve", "--help"}}};
  for (const auto& [file, args] : cases) {
    const Result r = run(args);
    EXPECT_EQ(r.code, 0) << file;
    EXPECT_EQ(r.out, slurp(fs::path(AMS_TEST_DATA) / file)) << file;
  }
}

TEST(CliHelp, ListsEveryFlag) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> flags{
      {"grow", {"--mesh", "--region", "--params", "--seed", "--out", "--sweep"}},
      {"simulate", {"--scene", "--frames", "--out", "--stage-toggles", "--seed", "--threads"}},
      {"bench", {"--strands", "--particles", "--repeats", "--out"}},
      {"serve", {"--scene", "--port", "--fps"}}};
  for (const auto& [cmd, names] : flags) {
    const std::string help = run({cmd, "--help"}).out;
    for (const auto& n : names) EXPECT_NE(help.find(n), std::string::npos) << cmd << ' ' << n;
  }
}

TEST(CliUsage, BadArgumentsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--frames", "many"}).code, 2);
  EXPECT_EQ(run({"grow"}).code, 2);
  EXPECT_EQ(run({"grow", "--mesh", "/nonexistent/scalp.obj"}).code, 2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scene", "/nonexistent/scene.json"}).code, 2);
}

TEST(CliGrow, MinimalArgumentsWriteTheRequestedStrands) {
  amstest::TempDir dir("cli");
  const Result r = run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--region", "0-3", "--roots-per-triangle",
                        "5", "--seed", "2", "--out", (dir / "a.ams").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const StrandAsset a = load_strands(dir / "a.ams");
  EXPECT_EQ(a.strand_count(), 20u);
  EXPECT_EQ(a.vertex_counts[0], 30u);

  // Same seed, same bytes.
  run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--region", "0-3", "--roots-per-triangle", "5", "--seed",
       "2", "--out", (dir / "b.ams").string()});
  EXPECT_EQ(slurp(dir / "a.ams"), slurp(dir / "b.ams"));
}

TEST(CliGrow, ParamsFileAndBadRegion) {
  amstest::TempDir dir("cli");
  std::ofstream(dir / "p.json") << R"({"p_n": 2, "vertices": 12, "p_tau": 0.003})";
  const Result r = run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--params", (dir / "p.json").string(),
                        "--out", (dir / "g.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const StrandAsset a = load_strands(dir / "g.txt");
  EXPECT_EQ(a.strand_count(), 64u);  // 32 triangles
  EXPECT_EQ(a.vertex_counts[0], 12u);
  EXPECT_NEAR(amstest::polyline_length(a.strand_positions(0)), 11 * 0.003, 1e-6);

  std::ofstream(dir / "bad.json") << R"({"p_bogus": 2})";
  EXPECT_EQ(run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--params", (dir / "bad.json").string()}).code, 2);
  EXPECT_EQ(run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--region", "40-50"}).code, 2);
}

TEST(CliGrow, SweepWritesNineAssetsAndManifest) {
  amstest::TempDir dir("cli");
  const Result r = run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--region", "0-1", "--sweep", "3x3",
                        "--out", dir.path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest["format"], "ams-sweep/1");
  ASSERT_EQ(manifest["assets"].size(), 9u);
  std::map<std::pair<int, int>, double> length;
  for (const json& a : manifest["assets"]) {
    const StrandAsset asset = load_strands(dir / a["file"].get<std::string>());
    EXPECT_EQ(asset.strand_count(), a["strands"].get<std::size_t>());
    double sum = 0.0;
    for (std::size_t s = 0; s < asset.strand_count(); ++s) sum += amstest::polyline_length(asset.strand_positions(s));
    length[{a["row"].get<int>(), a["column"].get<int>()}] = sum;
  }
  for (int row = 0; row < 3; ++row)
    for (int col = 1; col < 3; ++col) EXPECT_GT((length[{row, col}]), (length[{row, col - 1}]));
}

TEST(CliGrow, OutputDirectoryFromEnvironment) {
  amstest::TempDir dir("cli");
  ::setenv("AMS_OUTPUT_DIR", dir.path.c_str(), 1);
  const Result r = run({"grow", "--mesh", AMS_TEST_DATA "/scalp_patch.obj", "--region", "0"});
  ::unsetenv("AMS_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::is_regular_file(dir / "strands.ams"));
}

TEST(CliSimulate, ZeroFramesWritesOnlyTheInitialFrame) {
  amstest::TempDir dir("cli");
  const fs::path scene = write_small_scene(dir);
  const Result r = run({"simulate", "--scene", scene.string(), "--frames", "0", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto frames = read_frame_sequence(dir / "out");
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].index, 0u);
  EXPECT_EQ(frames[0].positions, load_strands(dir / "hair.txt").positions);
  const auto lines = csv_lines(dir / "out" / "diagnostics.csv");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "# ams-diagnostics/1");
  EXPECT_EQ(lines[1].rfind("frame,time,max_velocity,max_edge_strain", 0), 0u);
}

TEST(CliSimulate, DeterministicUnderSeedAndThreads) {
  amstest::TempDir dir("cli");
  const fs::path scene = write_small_scene(dir);
  auto frames_of = [&](const std::string& name, std::vector<std::string> extra) {
    std::vector<std::string> args{"simulate", "--scene", scene.string(), "--frames", "15", "--out", (dir / name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    std::vector<std::string> bytes;
    for (std::uint32_t f = 0; f <= 15; ++f) bytes.push_back(slurp(dir / name / frame_file_name(f)));
    return bytes;
  };
  const auto a = frames_of("a", {"--threads", "1"});
  EXPECT_EQ(a, frames_of("b", {"--threads", "1"}));
  EXPECT_EQ(a, frames_of("c", {"--threads", "4"}));
  EXPECT_NE(a, frames_of("d", {"--threads", "1", "--seed", "99"}));
  EXPECT_EQ(csv_lines(dir / "a" / "diagnostics.csv").size(), 17u);
}

TEST(CliSimulate, StageTogglesParsed) {
  amstest::TempDir dir("cli");
  const fs::path scene = write_small_scene(dir);
  EXPECT_EQ(run({"simulate", "--scene", scene.string(), "--frames", "2", "--stage-toggles", "grid=off,pairwise=on",
                 "--out", (dir / "o").string()})
                .code,
            0);
  EXPECT_EQ(run({"simulate", "--scene", scene.string(), "--stage-toggles", "warp=on"}).code, 2);
  EXPECT_EQ(run({"simulate", "--scene", scene.string(), "--stage-toggles", "grid=maybe"}).code, 2);
}

TEST(CliSimulate, InvalidSceneAndMissingStrands) {
  amstest::TempDir dir("cli");
  std::ofstream(dir / "bad.json") << R"({"format": "ams-scene/1", "strands": "x.ams", "params": {"dt": -1}})";
  EXPECT_EQ(run({"simulate", "--scene", (dir / "bad.json").string()}).code, 2);
  std::ofstream(dir / "gone.json") << R"({"format": "ams-scene/1", "strands": "x.ams"})";
  EXPECT_EQ(run({"simulate", "--scene", (dir / "gone.json").string()}).code, 3);
}

TEST(CliSimulate, DivergenceExitsFourWithLastGoodFrame) {
  amstest::TempDir dir("cli");
  const fs::path scene = write_unstable_scene(dir);
  const Result r = run({"simulate", "--scene", scene.string(), "--frames", "40", "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, 4);
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.err, m, std::regex("diverged while computing frame (\\d+); last good frame (\\d+)")))
      << r.err;
  const int bad = std::stoi(m[1]), good = std::stoi(m[2]);
  EXPECT_EQ(bad, good + 1);
  EXPECT_LT(bad, 40);
  EXPECT_TRUE(fs::is_regular_file(dir / "out" / frame_file_name(good)));
  EXPECT_FALSE(fs::exists(dir / "out" / frame_file_name(bad)));
}

TEST(CliBench, OneStrandOneRowWithSmallResidual) {
  amstest::TempDir dir("cli");
  const Result r = run({"bench", "--strands", "1", "--particles", "30", "--repeats", "2", "--frames", "0", "--out",
                        (dir / "bench.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = csv_lines(dir / "bench.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "# ams-bench/1");
  std::vector<std::string> header, row;
  for (auto [line, cells] : {std::pair{lines[1], &header}, std::pair{lines[2], &row}}) {
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells->push_back(c);
  }
  ASSERT_EQ(header.size(), row.size());
  const auto col = std::find(header.begin(), header.end(), "residual") - header.begin();
  ASSERT_LT(col, static_cast<long>(header.size()));
  EXPECT_LE(std::stod(row[col]), 1e-9);
  EXPECT_EQ(row[0], "1");
}

TEST(CliBench, SeveralSizesAllAccurate) {
  const Result r = run({"bench", "--strands", "1", "4", "--particles", "10", "60", "--repeats", "1", "--frames", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::stringstream ss(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 6u);
}

TEST(CliServe, BusyPortExitsThree) {
  amstest::TempDir dir("cli");
  const fs::path scene = write_small_scene(dir);
  boost::asio::io_context ioc;
  boost::asio::ip::tcp::acceptor holder(ioc, {boost::asio::ip::make_address("127.0.0.1"), 0});
  const std::string port = std::to_string(holder.local_endpoint().port());
  const Result r = run({"serve", "--scene", scene.string(), "--port", port});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_EQ(run({"serve", "--scene", scene.string(), "--fps", "0"}).code, 2);
}
