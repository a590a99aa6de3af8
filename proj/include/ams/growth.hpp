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

#include <ams/mesh.hpp>
#include <ams/rng.hpp>
#include <ams/strand_io.hpp>
#include <ams/types.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ams {

struct GrowthParams {
  int p_n = 10;             // roots per triangle
  double p_Gamma = 0.2;     // lower clamp of the gravity weight
  double p_gamma = 0.0;     // gravity influence per step
  double p_Omega = 0.017;   // spiral impact
  double p_h = 0.0;         // helix radius
  double p_freq = 1.0;      // helix frequency, rad per vertex
  double p_tau = 0.005;     // step size, m
  int vertices = 30;        // per strand
  std::uint64_t seed = 0;
  double noise_amplitude = 1.0;  // scale of the U(-1,1) direction noise

  void validate() const;
};

struct RootSample {
  Vec3 position;
  Vec3 direction;  // unit
  int triangle = 0;
};

struct RootSampling {
  std::vector<RootSample> roots;
  std::size_t skipped_degenerate = 0;
};

// p_n roots strictly inside every triangle of `region`; directions are the
// barycentric blend of vertex normals plus U(-1,1) noise, normalised.
// Throws InvalidArgument for an empty region, missing normals or bad ids.
RootSampling sample_roots(const TriangleMesh& mesh, const std::vector<int>& region, int p_n, std::uint64_t seed,
                          double noise_amplitude = 1.0);

// Barycentric blend of the vertex normals of one triangle (unnormalised).
Vec3 blend_vertex_normals(const TriangleMesh& mesh, int triangle, const Vec3& barycentric);

// Polyline of params.vertices points starting at `root`.
Vec3List grow_strand(const Vec3& root, const Vec3& direction, const GrowthParams& params);

// sample_roots + grow_strand for every root.
StrandAsset grow_region(const TriangleMesh& mesh, const std::vector<int>& region, const GrowthParams& params);

// Sets a growth parameter by name ("p_n", "p_Gamma", "p_gamma", "p_Omega",
// "p_h", "p_freq", "p_tau", "vertices", "seed"). Throws on unknown names.
void set_growth_param(GrowthParams& params, const std::string& name, double value);
double get_growth_param(const GrowthParams& params, const std::string& name);

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct SweepAsset {
  GrowthParams params;
  StrandAsset asset;
  std::size_t row = 0, column = 0;
};

// One asset per (axis1, axis2) value pair, row-major over axis1.
std::vector<SweepAsset> parameter_sweep(const TriangleMesh& mesh, const std::vector<int>& region,
                                        const GrowthParams& base, const SweepAxis& axis1, const SweepAxis& axis2);

}  // namespace ams
