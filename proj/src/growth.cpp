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

#include <ams/growth.hpp>

#include <ams/errors.hpp>

#include <cmath>

namespace ams {

void GrowthParams::validate() const {
  if (p_n < 1) throw InvalidArgument("p_n must be at least 1");
  if (!(p_tau > 0.0)) throw InvalidArgument("p_tau must be positive");
  if (vertices < 2) throw InvalidArgument("strands need at least 2 vertices");
  if (!(noise_amplitude >= 0.0)) throw InvalidArgument("noise_amplitude must be non-negative");
}

Vec3 blend_vertex_normals(const TriangleMesh& mesh, int triangle, const Vec3& b) {
  const Face& f = mesh.faces.at(static_cast<std::size_t>(triangle));
  return b[0] * mesh.normals[f[0]] + b[1] * mesh.normals[f[1]] + b[2] * mesh.normals[f[2]];
}

RootSampling sample_roots(const TriangleMesh& mesh, const std::vector<int>& region, int p_n, std::uint64_t seed,
                          double noise_amplitude) {
  if (region.empty()) throw InvalidArgument("growth region is empty");
  if (p_n < 1) throw InvalidArgument("p_n must be at least 1");
  if (mesh.normals.size() != mesh.vertices.size()) throw InvalidArgument("mesh has no per-vertex normals");
  RootSampling out;
  for (int tri : region) {
    if (tri < 0 || static_cast<std::size_t>(tri) >= mesh.faces.size())
      throw InvalidArgument("triangle id " + std::to_string(tri) + " is not in the mesh");
    if (mesh.face_area(static_cast<std::size_t>(tri)) < 1e-12) {
      ++out.skipped_degenerate;
      continue;
    }
    const Face& f = mesh.faces[static_cast<std::size_t>(tri)];
    Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tri))));
    for (int r = 0; r < p_n; ++r) {
      double u, v;
      do {
        u = rng.uniform01();
        v = rng.uniform01();
        if (u + v > 1.0) {
          u = 1.0 - u;
          v = 1.0 - v;
        }
      } while (u <= 0.0 || v <= 0.0 || u + v >= 1.0);
      const double w = 1.0 - u - v;
      RootSample s;
      s.triangle = tri;
      s.position = w * mesh.vertices[f[0]] + u * mesh.vertices[f[1]] + v * mesh.vertices[f[2]];
      Vec3 dir = blend_vertex_normals(mesh, tri, Vec3(w, u, v));
      Vec3 noise;
      for (int a = 0; a < 3; ++a) noise[a] = rng.uniform(-1.0, 1.0);
      dir += noise_amplitude * noise;
      if (dir.norm() < 1e-12) dir = mesh.face_normal(static_cast<std::size_t>(tri));
      s.direction = dir.normalized();
      out.roots.push_back(s);
    }
  }
  return out;
}

Vec3List grow_strand(const Vec3& root, const Vec3& direction, const GrowthParams& params) {
  params.validate();
  if (!(direction.norm() > 1e-12)) throw InvalidArgument("initial growth direction is zero");
  Vec3List vertices{root};
  Vec3 dir = direction;
  const Vec3 up(0.0, 1.0, 0.0);
  for (int i = 1; i < params.vertices; ++i) {
    const Vec3 grav(0.0, -(i - 1) * params.p_gamma, 0.0);
    const Vec3 bent = dir + grav * std::max(params.p_Gamma, 1.0 - std::abs(dir.dot(up)));
    const Vec3 helix(params.p_h * std::cos(i * params.p_freq), 1.0, params.p_h * std::sin(i * params.p_freq));
    const Vec3 next = bent + params.p_Omega * (bent - helix);
    if (!(next.norm() > 1e-12) || !next.allFinite()) {
      if (vertices.size() >= 2) break;
      vertices.push_back(root + params.p_tau * direction.normalized());
      break;
    }
    dir = next;
    vertices.push_back(vertices.back() + params.p_tau * dir.normalized());
  }
  return vertices;
}

StrandAsset grow_region(const TriangleMesh& mesh, const std::vector<int>& region, const GrowthParams& params) {
  params.validate();
  const RootSampling roots = sample_roots(mesh, region, params.p_n, params.seed, params.noise_amplitude);
  std::vector<Vec3List> strands(roots.roots.size());
  for (std::size_t r = 0; r < strands.size(); ++r)
    strands[r] = grow_strand(roots.roots[r].position, roots.roots[r].direction, params);
  StrandAsset asset;
  for (const auto& s : strands) asset.add_strand(s);
  return asset;
}

void set_growth_param(GrowthParams& p, const std::string& name, double value) {
  if (name == "p_n") p.p_n = static_cast<int>(value);
  else if (name == "p_Gamma") p.p_Gamma = value;
  else if (name == "p_gamma") p.p_gamma = value;
  else if (name == "p_Omega") p.p_Omega = value;
  else if (name == "p_h") p.p_h = value;
  else if (name == "p_freq") p.p_freq = value;
  else if (name == "p_tau") p.p_tau = value;
  else if (name == "vertices") p.vertices = static_cast<int>(value);
  else if (name == "seed") p.seed = static_cast<std::uint64_t>(value);
  else if (name == "noise_amplitude") p.noise_amplitude = value;
  else throw InvalidArgument("unknown growth parameter '" + name + "'");
}

double get_growth_param(const GrowthParams& p, const std::string& name) {
  if (name == "p_n") return p.p_n;
  if (name == "p_Gamma") return p.p_Gamma;
  if (name == "p_gamma") return p.p_gamma;
  if (name == "p_Omega") return p.p_Omega;
  if (name == "p_h") return p.p_h;
  if (name == "p_freq") return p.p_freq;
  if (name == "p_tau") return p.p_tau;
  if (name == "vertices") return p.vertices;
  if (name == "seed") return static_cast<double>(p.seed);
  if (name == "noise_amplitude") return p.noise_amplitude;
  throw InvalidArgument("unknown growth parameter '" + name + "'");
}

std::vector<SweepAsset> parameter_sweep(const TriangleMesh& mesh, const std::vector<int>& region,
                                        const GrowthParams& base, const SweepAxis& axis1, const SweepAxis& axis2) {
  if (axis1.values.empty() || axis2.values.empty()) throw InvalidArgument("sweep axes must not be empty");
  std::vector<SweepAsset> out;
  for (std::size_t r = 0; r < axis1.values.size(); ++r)
    for (std::size_t c = 0; c < axis2.values.size(); ++c) {
      SweepAsset a;
      a.params = base;
      set_growth_param(a.params, axis1.name, axis1.values[r]);
      set_growth_param(a.params, axis2.name, axis2.values[c]);
      a.asset = grow_region(mesh, region, a.params);
      a.row = r;
      a.column = c;
      out.push_back(std::move(a));
    }
  return out;
}

}  // namespace ams
