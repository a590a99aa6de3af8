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

#include <ams/types.hpp>

#include <array>
#include <filesystem>
#include <istream>
#include <vector>

namespace ams {

using Face = std::array<int, 3>;  // zero-based vertex indices

struct TriangleMesh {
  Vec3List vertices;
  std::vector<Face> faces;
  Vec3List normals;  // per vertex; empty until computed or loaded

  bool empty() const { return faces.empty(); }
  double face_area(std::size_t f) const;
  Vec3 face_normal(std::size_t f) const;  // unit, zero for degenerate faces

  // Area-weighted vertex normals.
  void compute_vertex_normals();
  void transform(const RigidTransform& t);
};

// ASCII "v x y z" / "vn x y z" / "f i j k" (1-based; "i/t/n" tokens accepted).
TriangleMesh read_mesh(std::istream& in);
TriangleMesh load_mesh(const std::filesystem::path& path);
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path);

// Subdivided icosahedron with vertices on the sphere.
TriangleMesh make_icosphere(int subdivisions, double radius = 1.0, const Vec3& center = Vec3::Zero());

// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace ams
