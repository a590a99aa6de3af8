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

#include <ams/scene.hpp>

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ams {

using nlohmann::json;

const char* to_string(SceneErrorCode code) {
  switch (code) {
    case SceneErrorCode::MalformedDocument: return "malformed-document";
    case SceneErrorCode::UnsupportedVersion: return "unsupported-version";
    case SceneErrorCode::NonPositiveTimestep: return "non-positive-timestep";
    case SceneErrorCode::InvalidSubsteps: return "invalid-substeps";
    case SceneErrorCode::NegativeStiffness: return "negative-stiffness";
    case SceneErrorCode::NonMonotoneKeyframes: return "non-monotone-keyframes";
    case SceneErrorCode::MissingFile: return "missing-file";
    case SceneErrorCode::InvalidValue: return "invalid-value";
  }
  return "unknown";
}

namespace {

std::string describe(const std::vector<SceneIssue>& issues) {
  std::string out = "invalid scene:";
  for (const auto& i : issues) out += std::string("\n  [") + to_string(i.code) + "] " + i.message;
  return out;
}

// Collects issues while reading a JSON object with known keys.
class Reader {
 public:
  explicit Reader(std::vector<SceneIssue>& issues) : issues_(issues) {}

  void issue(SceneErrorCode code, std::string message) { issues_.push_back({code, std::move(message)}); }

  bool object(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
      issue(SceneErrorCode::MalformedDocument, where + " must be an object");
      return false;
    }
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
      if (!known.count(k)) issue(SceneErrorCode::MalformedDocument, "unknown key '" + k + "' in " + where);
    return true;
  }

  template <typename T>
  void get(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      issue(SceneErrorCode::MalformedDocument, where + "." + key + " has the wrong type");
    }
  }

  void get(const json& j, const char* key, std::optional<double>& out, const std::string& where) {
    if (!j.contains(key)) return;
    double v = 0.0;
    get(j, key, v, where);
    out = v;
  }

  bool vec3(const json& j, Vec3& out, const std::string& where) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
      issue(SceneErrorCode::MalformedDocument, where + " must be a 3-number array");
      return false;
    }
    out = Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
    return true;
  }

  void vec3(const json& j, const char* key, Vec3& out, const std::string& where) {
    if (j.contains(key)) vec3(j.at(key), out, where + "." + key);
  }

  template <typename Key>
  bool monotone(const std::vector<Key>& keys, const std::string& where) {
    for (std::size_t k = 1; k < keys.size(); ++k)
      if (!(keys[k].time > keys[k - 1].time)) {
        issue(SceneErrorCode::NonMonotoneKeyframes,
              where + " keyframe " + std::to_string(k) + " is not after keyframe " + std::to_string(k - 1));
        return false;
      }
    return true;
  }

  TransformTrack track(const json& j, const std::string& where) {
    if (!object(j, where, {"keyframes"}) || !j.contains("keyframes")) return {};
    const json& keys = j.at("keyframes");
    if (!keys.is_array()) {
      issue(SceneErrorCode::MalformedDocument, where + ".keyframes must be an array");
      return {};
    }
    std::vector<TransformKeyframe> out;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const std::string at = where + ".keyframes[" + std::to_string(k) + "]";
      if (!object(keys[k], at, {"time", "translation", "rotation"})) continue;
      TransformKeyframe key;
      get(keys[k], "time", key.time, at);
      vec3(keys[k], "translation", key.pose.translation, at);
      if (keys[k].contains("rotation")) {
        const json& r = keys[k].at("rotation");
        if (r.is_array() && r.size() == 4 && std::all_of(r.begin(), r.end(), [](const json& v) { return v.is_number(); })) {
          key.pose.rotation = Quat(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>());
          if (!(key.pose.rotation.norm() > 0.0)) issue(SceneErrorCode::InvalidValue, at + ".rotation is zero");
          else key.pose.rotation.normalize();
        } else {
          issue(SceneErrorCode::MalformedDocument, at + ".rotation must be [w, x, y, z]");
        }
      }
      out.push_back(key);
    }
    if (!monotone(out, where)) return {};
    return TransformTrack(std::move(out));
  }

 private:
  std::vector<SceneIssue>& issues_;
};

void read_params(Reader& r, const json& j, SimParams& p) {
  const std::string w = "params";
  if (!r.object(j, w, {"kappa_L", "kappa_edge", "kappa_bending", "kappa_torsion", "kappa_I", "kappa_alpha", "damping",
                       "gravity", "dt", "fps", "substeps", "friction", "flip_blend", "preload",
                       "inextensibility_tolerance", "divergence_position_limit", "divergence_velocity_limit",
                       "non_hookean"}))
    return;
  r.get(j, "kappa_L", p.kappa_L, w);
  r.get(j, "kappa_edge", p.kappa_edge, w);
  r.get(j, "kappa_bending", p.kappa_bending, w);
  r.get(j, "kappa_torsion", p.kappa_torsion, w);
  r.get(j, "kappa_I", p.kappa_I, w);
  r.get(j, "kappa_alpha", p.kappa_alpha, w);
  r.get(j, "damping", p.damping, w);
  r.vec3(j, "gravity", p.gravity, w);
  r.get(j, "dt", p.dt, w);
  if (j.contains("fps")) {
    double fps = 0.0;
    r.get(j, "fps", fps, w);
    p.dt = fps > 0.0 ? 1.0 / fps : 0.0;
  }
  r.get(j, "substeps", p.substeps, w);
  r.get(j, "friction", p.friction, w);
  r.get(j, "flip_blend", p.flip_blend, w);
  r.get(j, "preload", p.preload, w);
  r.get(j, "inextensibility_tolerance", p.inextensibility_tolerance, w);
  r.get(j, "divergence_position_limit", p.divergence_position_limit, w);
  r.get(j, "divergence_velocity_limit", p.divergence_velocity_limit, w);
  if (j.contains("non_hookean")) {
    const json& nh = j.at("non_hookean");
    const std::string at = w + ".non_hookean";
    if (r.object(nh, at, {"points", "yield_elongation", "plastic"})) {
      r.get(nh, "points", p.non_hookean.points, at);
      r.get(nh, "yield_elongation", p.non_hookean.yield_elongation, at);
      r.get(nh, "plastic", p.non_hookean.plastic, at);
    }
  }
}

}  // namespace

SceneError::SceneError(std::vector<SceneIssue> issues) : Error(describe(issues)), issues_(std::move(issues)) {}

bool SceneError::has(SceneErrorCode code) const {
  return std::any_of(issues_.begin(), issues_.end(), [&](const SceneIssue& i) { return i.code == code; });
}

std::filesystem::path SceneConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

std::vector<SceneIssue> validate_scene(const SceneConfig& s, bool check_files) {
  std::vector<SceneIssue> issues;
  Reader r(issues);
  const SimParams& p = s.params;
  if (!(p.dt > 0.0)) r.issue(SceneErrorCode::NonPositiveTimestep, "time step must be positive");
  if (p.substeps < 1) r.issue(SceneErrorCode::InvalidSubsteps, "substeps must be at least 1");
  auto stiff = [&](const char* name, double v) {
    if (v < 0.0) r.issue(SceneErrorCode::NegativeStiffness, std::string(name) + " must not be negative");
  };
  stiff("kappa_L", p.kappa_L);
  if (p.kappa_edge) stiff("kappa_edge", *p.kappa_edge);
  if (p.kappa_bending) stiff("kappa_bending", *p.kappa_bending);
  if (p.kappa_torsion) stiff("kappa_torsion", *p.kappa_torsion);
  stiff("kappa_I", p.kappa_I);
  stiff("kappa_alpha", p.kappa_alpha);
  for (const auto& o : s.overrides) {
    if (o.kappa_I) stiff("override kappa_I", *o.kappa_I);
    if (o.kappa_alpha) stiff("override kappa_alpha", *o.kappa_alpha);
    if (o.particle_mass && !(*o.particle_mass > 0.0)) r.issue(SceneErrorCode::InvalidValue, "override particle_mass must be positive");
  }
  if (p.dt > 0.0 && p.substeps >= 1) {
    try {
      p.validate();
    } catch (const InvalidArgument& e) {
      r.issue(SceneErrorCode::InvalidValue, e.what());
    }
  }
  if (!(s.particle_mass > 0.0)) r.issue(SceneErrorCode::InvalidValue, "particle_mass must be positive");
  for (int d : s.grid.spec.resolution)
    if (d < 2) r.issue(SceneErrorCode::InvalidValue, "grid resolution must be at least 2 per axis");
  if (!(s.grid.spec.cell_size > 0.0)) r.issue(SceneErrorCode::InvalidValue, "grid cell_size must be positive");
  if (s.grid.regularize_strength < 0.0 || s.grid.regularize_strength > 1.0)
    r.issue(SceneErrorCode::InvalidValue, "grid regularize_strength must lie in [0, 1]");
  if (s.grid.regularize_iterations < 0 || s.grid.pressure_iterations < 0 || s.grid.segment_samples < 0)
    r.issue(SceneErrorCode::InvalidValue, "grid iteration counts must not be negative");
  if (!(s.pairwise.radius >= 0.0) || !(s.pairwise.stiffness >= 0.0))
    r.issue(SceneErrorCode::NegativeStiffness, "pairwise radius and stiffness must not be negative");
  if (s.output.frame_stride < 1) r.issue(SceneErrorCode::InvalidValue, "output frame_stride must be at least 1");
  if (s.output.format != "amsf") r.issue(SceneErrorCode::InvalidValue, "output format must be \"amsf\"");
  if (s.wind.noise.octaves < 0 || s.wind.noise.amplitude < 0.0)
    r.issue(SceneErrorCode::InvalidValue, "wind noise amplitude and octaves must not be negative");
  if (check_files && s.strand_files.empty()) r.issue(SceneErrorCode::InvalidValue, "scene lists no strand files");
  for (const auto& solid : s.solids) {
    if (solid.mesh.empty() == !solid.sphere)
      r.issue(SceneErrorCode::InvalidValue, "solid '" + solid.name + "' needs exactly one of mesh or sphere");
    if (solid.sphere && !(solid.sphere->radius > 0.0))
      r.issue(SceneErrorCode::InvalidValue, "solid '" + solid.name + "' sphere radius must be positive");
    if (check_files && !solid.mesh.empty() && !std::filesystem::is_regular_file(s.resolve(solid.mesh)))
      r.issue(SceneErrorCode::MissingFile, "mesh file not found: " + s.resolve(solid.mesh).string());
  }
  if (check_files)
    for (const auto& f : s.strand_files)
      if (!std::filesystem::is_regular_file(s.resolve(f)))
        r.issue(SceneErrorCode::MissingFile, "strand file not found: " + s.resolve(f).string());
  return issues;
}

SceneConfig parse_scene(const std::string& text, const std::filesystem::path& base_dir) {
  std::vector<SceneIssue> issues;
  Reader r(issues);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError({{SceneErrorCode::MalformedDocument, e.what()}});
  }
  SceneConfig s;
  s.base_dir = base_dir;
  if (!r.object(doc, "scene", {"format", "strands", "particle_mass", "params", "head", "solids", "grid", "pairwise",
                               "wind", "stages", "output", "seed", "overrides"}))
    throw SceneError(issues);
  if (!doc.contains("format") || !doc["format"].is_string())
    r.issue(SceneErrorCode::MalformedDocument, "missing \"format\": \"" + std::string(kSceneFormat) + "\"");
  else if (doc["format"].get<std::string>() != kSceneFormat)
    r.issue(SceneErrorCode::UnsupportedVersion, "unsupported scene format '" + doc["format"].get<std::string>() + "'");

  if (doc.contains("strands")) {
    const json& st = doc["strands"];
    if (st.is_string()) s.strand_files.emplace_back(st.get<std::string>());
    else if (st.is_array() && std::all_of(st.begin(), st.end(), [](const json& v) { return v.is_string(); }))
      for (const auto& v : st) s.strand_files.emplace_back(v.get<std::string>());
    else r.issue(SceneErrorCode::MalformedDocument, "strands must be a path or a list of paths");
  }
  r.get(doc, "particle_mass", s.particle_mass, "scene");
  r.get(doc, "seed", s.seed, "scene");
  if (doc.contains("params")) read_params(r, doc["params"], s.params);
  if (doc.contains("head")) s.head = r.track(doc["head"], "head");

  if (doc.contains("solids")) {
    const json& solids = doc["solids"];
    if (!solids.is_array()) r.issue(SceneErrorCode::MalformedDocument, "solids must be an array");
    else
      for (std::size_t k = 0; k < solids.size(); ++k) {
        const std::string at = "solids[" + std::to_string(k) + "]";
        const json& j = solids[k];
        if (!r.object(j, at, {"name", "mesh", "sphere", "sdf_resolution", "sdf_padding", "sign", "track"})) continue;
        SolidConfig solid;
        solid.name = "solid" + std::to_string(k);
        r.get(j, "name", solid.name, at);
        std::string mesh;
        r.get(j, "mesh", mesh, at);
        solid.mesh = mesh;
        if (j.contains("sphere")) {
          const json& sp = j["sphere"];
          if (r.object(sp, at + ".sphere", {"radius", "subdivisions", "center"})) {
            SphereShape shape;
            r.get(sp, "radius", shape.radius, at + ".sphere");
            r.get(sp, "subdivisions", shape.subdivisions, at + ".sphere");
            r.vec3(sp, "center", shape.center, at + ".sphere");
            solid.sphere = shape;
          }
        }
        r.get(j, "sdf_resolution", solid.sdf.resolution, at);
        r.get(j, "sdf_padding", solid.sdf.padding, at);
        std::string sign = "flood-fill";
        r.get(j, "sign", sign, at);
        if (sign == "winding-number") solid.sdf.sign = SignMode::WindingNumber;
        else if (sign != "flood-fill") r.issue(SceneErrorCode::InvalidValue, at + ".sign must be flood-fill or winding-number");
        // "head" rigidly attaches the solid to the head track.
        if (j.contains("track") && j["track"] == "head") solid.track = s.head;
        else if (j.contains("track")) solid.track = r.track(j["track"], at + ".track");
        s.solids.push_back(std::move(solid));
      }
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (r.object(g, "grid", {"resolution", "origin", "cell_size", "regularize_strength", "regularize_iterations",
                             "pressure_iterations", "segment_samples"})) {
      r.get(g, "resolution", s.grid.spec.resolution, "grid");
      r.vec3(g, "origin", s.grid.spec.origin, "grid");
      r.get(g, "cell_size", s.grid.spec.cell_size, "grid");
      r.get(g, "regularize_strength", s.grid.regularize_strength, "grid");
      r.get(g, "regularize_iterations", s.grid.regularize_iterations, "grid");
      r.get(g, "pressure_iterations", s.grid.pressure_iterations, "grid");
      r.get(g, "segment_samples", s.grid.segment_samples, "grid");
    }
  }
  if (doc.contains("pairwise") && r.object(doc["pairwise"], "pairwise", {"radius", "stiffness"})) {
    r.get(doc["pairwise"], "radius", s.pairwise.radius, "pairwise");
    r.get(doc["pairwise"], "stiffness", s.pairwise.stiffness, "pairwise");
  }
  if (doc.contains("wind") && r.object(doc["wind"], "wind", {"keyframes", "curl_noise"})) {
    const json& w = doc["wind"];
    if (w.contains("keyframes")) {
      std::vector<VectorKeyframe> keys;
      if (!w["keyframes"].is_array()) r.issue(SceneErrorCode::MalformedDocument, "wind.keyframes must be an array");
      else
        for (std::size_t k = 0; k < w["keyframes"].size(); ++k) {
          const std::string at = "wind.keyframes[" + std::to_string(k) + "]";
          const json& key = w["keyframes"][k];
          if (!r.object(key, at, {"time", "acceleration"})) continue;
          VectorKeyframe vk;
          r.get(key, "time", vk.time, at);
          r.vec3(key, "acceleration", vk.value, at);
          keys.push_back(vk);
        }
      if (r.monotone(keys, "wind")) s.wind.uniform = VectorTrack(std::move(keys));
    }
    if (w.contains("curl_noise") && r.object(w["curl_noise"], "wind.curl_noise", {"amplitude", "frequency", "speed", "octaves"})) {
      const json& n = w["curl_noise"];
      r.get(n, "amplitude", s.wind.noise.amplitude, "wind.curl_noise");
      r.get(n, "frequency", s.wind.noise.frequency, "wind.curl_noise");
      r.get(n, "speed", s.wind.noise.speed, "wind.curl_noise");
      r.get(n, "octaves", s.wind.noise.octaves, "wind.curl_noise");
    }
  }
  if (doc.contains("stages") && r.object(doc["stages"], "stages", {"grid", "pairwise", "collisions", "non_hookean"})) {
    r.get(doc["stages"], "grid", s.stages.grid, "stages");
    r.get(doc["stages"], "pairwise", s.stages.pairwise, "stages");
    r.get(doc["stages"], "collisions", s.stages.collisions, "stages");
    r.get(doc["stages"], "non_hookean", s.stages.non_hookean, "stages");
  }
  if (doc.contains("output") && r.object(doc["output"], "output", {"frame_stride", "format"})) {
    r.get(doc["output"], "frame_stride", s.output.frame_stride, "output");
    r.get(doc["output"], "format", s.output.format, "output");
  }
  if (doc.contains("overrides")) {
    if (!doc["overrides"].is_array()) r.issue(SceneErrorCode::MalformedDocument, "overrides must be an array");
    else
      for (std::size_t k = 0; k < doc["overrides"].size(); ++k) {
        const std::string at = "overrides[" + std::to_string(k) + "]";
        const json& o = doc["overrides"][k];
        if (!r.object(o, at, {"strand", "kappa_I", "kappa_alpha", "particle_mass"})) continue;
        StrandOverride ov;
        r.get(o, "strand", ov.strand, at);
        r.get(o, "kappa_I", ov.kappa_I, at);
        r.get(o, "kappa_alpha", ov.kappa_alpha, at);
        r.get(o, "particle_mass", ov.particle_mass, at);
        s.overrides.push_back(ov);
      }
  }

  const auto more = validate_scene(s, true);
  issues.insert(issues.end(), more.begin(), more.end());
  if (!issues.empty()) throw SceneError(std::move(issues));
  return s;
}

SceneConfig load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SceneError({{SceneErrorCode::MissingFile, "scene file not found: " + path.string()}});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str(), path.parent_path());
}

StrandAsset load_scene_strands(const SceneConfig& scene) {
  StrandAsset all;
  for (const auto& f : scene.strand_files) {
    const StrandAsset part = load_strands(scene.resolve(f));
    all.vertex_counts.insert(all.vertex_counts.end(), part.vertex_counts.begin(), part.vertex_counts.end());
    all.positions.insert(all.positions.end(), part.positions.begin(), part.positions.end());
  }
  return all;
}

}  // namespace ams
