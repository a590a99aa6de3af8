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

#include <ams/errors.hpp>
#include <ams/mesh.hpp>
#include <ams/sdf.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace ams;

namespace {

// phi = z on a 5x5x5 lattice: unit gradient along +z everywhere.
SdfField plane_field() {
  const int n = 5;
  const double h = 0.1;
  const Vec3 origin(-0.2, -0.2, -0.2);
  std::vector<double> phi;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) phi.push_back(origin.z() + k * h);
  return SdfField({n, n, n}, origin, h, phi);
}

const SdfField& unit_sphere() {
  static const SdfField field = [] {
    SdfBuildOptions opt;
    opt.resolution = 32;
    opt.padding = 1.2;
    return build_sdf(make_icosphere(3, 1.0), opt);
  }();
  return field;
}

Vec3 random_direction(std::mt19937_64& gen) { return amstest::random_unit(gen); }

}  // namespace

TEST(BuildSdf, SphereCentreAndOutside) {
  const SdfField& sdf = unit_sphere();
  const double h = sdf.cell_size();
  EXPECT_NEAR(sdf.distance(Vec3::Zero()), -1.0, 2 * h);
  EXPECT_NEAR(sdf.distance(Vec3(2, 0, 0)), 1.0, 2 * h);
  EXPECT_NEAR(sdf.distance(Vec3(0, -2, 0)), 1.0, 2 * h);
}

TEST(BuildSdf, MatchesAnalyticSphereNearSurface) {
  const SdfField& sdf = unit_sphere();
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> r(0.5, 1.8);
  for (int k = 0; k < 500; ++k) {
    const Vec3 p = r(gen) * random_direction(gen);
    EXPECT_NEAR(sdf.distance(p), p.norm() - 1.0, 2 * sdf.cell_size()) << p.transpose();
  }
}

TEST(BuildSdf, MirrorSymmetric) {
  const SdfField& sdf = unit_sphere();
  const auto d = sdf.dims();
  ASSERT_EQ(d[0], d[1]);
  ASSERT_EQ(d[0], d[2]);
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i) {
        EXPECT_NEAR(sdf.node_value(i, j, k), sdf.node_value(d[0] - 1 - i, j, k), 1e-6);
        EXPECT_NEAR(sdf.node_value(i, j, k), sdf.node_value(i, d[1] - 1 - j, k), 1e-6);
      }
}

TEST(BuildSdf, EikonalInNarrowBand) {
  const SdfField& sdf = unit_sphere();
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> r(0.6, 1.5);
  for (int k = 0; k < 500; ++k) {
    const Vec3 p = r(gen) * random_direction(gen);
    EXPECT_NEAR(sdf.gradient(p).norm(), 1.0, 0.1) << p.transpose();
  }
}

TEST(BuildSdf, WindingNumberSignAgreesWithFloodFill) {
  SdfBuildOptions opt;
  opt.resolution = 16;
  opt.padding = 0.3;
  opt.sign = SignMode::WindingNumber;
  const TriangleMesh mesh = make_icosphere(2, 0.5);
  const SdfField wn = build_sdf(mesh, opt);
  opt.sign = SignMode::FloodFill;
  const SdfField ff = build_sdf(mesh, opt);
  EXPECT_EQ(wn.values(), ff.values());
  EXPECT_NEAR(winding_number(mesh, Vec3::Zero()), 1.0, 1e-9);
  EXPECT_NEAR(winding_number(mesh, Vec3(2, 0, 0)), 0.0, 1e-9);
}

TEST(BuildSdf, EmptyMeshRejected) { EXPECT_THROW(build_sdf(TriangleMesh{}), InvalidArgument); }

TEST(SdfFile, RoundTripAndErrors) {
  amstest::TempDir dir("sdf");
  const SdfField& sdf = unit_sphere();
  sdf.save(dir / "s.sdf");
  const SdfField back = SdfField::load(dir / "s.sdf");
  EXPECT_EQ(back.dims(), sdf.dims());
  ASSERT_EQ(back.values().size(), sdf.values().size());
  for (std::size_t i = 0; i < sdf.values().size(); ++i)
    EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(sdf.values()[i])));

  std::string bytes;
  {
    std::ifstream in(dir / "s.sdf", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto expect_kind = [&](const std::string& content, FormatErrorKind kind) {
    std::ofstream(dir / "bad.sdf", std::ios::binary) << content;
    try {
      SdfField::load(dir / "bad.sdf");
      ADD_FAILURE() << "expected FormatError";
    } catch (const FormatError& e) {
      EXPECT_EQ(e.kind(), kind) << e.what();
    }
  };
  expect_kind("", FormatErrorKind::MalformedHeader);
  expect_kind("SDF2" + bytes.substr(4), FormatErrorKind::VersionMismatch);
  expect_kind(bytes.substr(0, bytes.size() - 7), FormatErrorKind::TruncatedPayload);
}

TEST(RigidVelocity, Cases) {
  SdfField sdf = plane_field();
  EXPECT_EQ(rigid_velocity_at(sdf, Vec3(3, 4, 5)), Vec3::Zero());
  RigidMotion m;
  m.linear_velocity = Vec3(1, 0, 0);
  sdf.set_motion(m);
  EXPECT_EQ(rigid_velocity_at(sdf, Vec3(-7, 2, 9)), Vec3(1, 0, 0));
  m = {};
  m.angular_velocity = Vec3(0, 0, 1);
  sdf.set_motion(m);
  EXPECT_NEAR((rigid_velocity_at(sdf, Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(CollideVelocity, NoPredictedPenetration) {
  const SdfField sdf = plane_field();
  const Vec3 v(0.3, 0.1, -0.5);
  EXPECT_EQ(collide_velocity(Vec3(0, 0, 0.1), v, 0.1, sdf, 0.5), v);
}

TEST(CollideVelocity, HeadOnImpactStops) {
  const SdfField sdf = plane_field();
  const Vec3 out = collide_velocity(Vec3(0, 0, 0.01), Vec3(0, 0, -1), 0.1, sdf, 0.3);
  EXPECT_NEAR(out.norm(), 0.0, 1e-12);
}

TEST(CollideVelocity, FrictionlessKeepsTangential) {
  const SdfField sdf = plane_field();
  const Vec3 out = collide_velocity(Vec3(0, 0, 0.01), Vec3(0.4, -0.2, -1), 0.1, sdf, 0.0);
  EXPECT_NEAR((out - Vec3(0.4, -0.2, 0)).norm(), 0.0, 1e-12);
}

TEST(CollideVelocity, FrictionFormulaAndClamp) {
  const SdfField sdf = plane_field();
  // |v_N| = 1, |v_T| = 2: factor 1 - mu/2.
  const Vec3 v(2, 0, -1);
  EXPECT_NEAR((collide_velocity(Vec3(0, 0, 0.01), v, 0.1, sdf, 0.5) - Vec3(1.5, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(collide_velocity(Vec3(0, 0, 0.01), v, 0.1, sdf, 5.0).norm(), 0.0, 1e-12);
}

TEST(CollideVelocity, MovingSolidRelativeVelocity) {
  SdfField sdf = plane_field();
  RigidMotion m;
  m.linear_velocity = Vec3(1, 0, 0);
  sdf.set_motion(m);
  // Tangential relative velocity is zero: the particle sticks to the solid.
  const Vec3 out = collide_velocity(Vec3(0, 0, 0.01), Vec3(1, 0, -1), 0.1, sdf, 0.3);
  EXPECT_NEAR((out - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(CollidePosition, OutsideIsPureAdvection) {
  const SdfField sdf = plane_field();
  const Vec3 out = collide_position(Vec3(0, 0, 0.1), Vec3(0.1, 0, -0.5), 0.1, sdf);
  EXPECT_NEAR((out - Vec3(0.01, 0, 0.05)).norm(), 0.0, 1e-15);
}

TEST(CollidePosition, ProjectsAlongNormal) {
  const SdfField sdf = plane_field();
  // Target z = -0.01 (phi = -0.01, unit gradient +z).
  const Vec3 out = collide_position(Vec3(0.05, 0.02, 0.04), Vec3(0, 0, -0.5), 0.1, sdf);
  EXPECT_NEAR((out - Vec3(0.05, 0.02, 0.0)).norm(), 0.0, 1e-12);
}

TEST(CollidePosition, SphereInteriorTargetsEndNearSurface) {
  const SdfField& sdf = unit_sphere();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> r(0.0, 0.99);
  for (int k = 0; k < 2000; ++k) {
    const Vec3 target = r(gen) * random_direction(gen);
    const Vec3 out = collide_position(target, Vec3::Zero(), 0.1, sdf);
    EXPECT_GE(sdf.distance(out), -2 * sdf.cell_size());
  }
}

TEST(Collide, FrictionMonotoneInMu) {
  const SdfField& sdf = unit_sphere();
  std::mt19937_64 gen(4);
  for (int k = 0; k < 200; ++k) {
    const Vec3 n = random_direction(gen);
    const Vec3 x = 1.05 * n;
    const Vec3 v = -2.0 * n + 1.5 * random_direction(gen);
    double last = std::numeric_limits<double>::infinity();
    for (double mu : {0.0, 0.25, 0.5, 1.0}) {
      const Vec3 out = collide_velocity(x, v, 0.1, sdf, mu);
      Vec3 normal;
      ASSERT_TRUE(sdf.normal(x + 0.1 * v, normal));
      const double tangential = (out - out.dot(normal) * normal).norm();
      EXPECT_LE(tangential, last + 1e-12);
      last = tangential;
    }
  }
}

TEST(Collide, TranslatedFrameConsistency) {
  SdfField sdf = unit_sphere();
  const Vec3 t(0.3, -0.7, 1.1);
  SdfField moved = sdf;
  RigidMotion m;
  m.pose.translation = t;
  moved.set_motion(m);
  std::mt19937_64 gen(5);
  for (int k = 0; k < 100; ++k) {
    const Vec3 x = 1.1 * random_direction(gen);
    const Vec3 v = -3.0 * x + random_direction(gen);
    const Vec3 a = collide_position(x, collide_velocity(x, v, 0.1, sdf, 0.3), 0.1, sdf);
    const Vec3 b = collide_position(x + t, collide_velocity(x + t, v, 0.1, moved, 0.3), 0.1, moved);
    EXPECT_NEAR((b - (a + t)).norm(), 0.0, 1e-6);
  }
}

TEST(SdfNormal, FallsBackWhenGradientVanishes) {
  // Constant field except one node: the gradient at the centre is zero.
  std::vector<double> phi(125, 1.0);
  SdfField flat({5, 5, 5}, Vec3::Zero(), 1.0, phi);
  Vec3 n;
  EXPECT_FALSE(flat.normal(Vec3(2, 2, 2), n));
  phi[flat.index(4, 2, 2)] = 2.0;
  SdfField bump({5, 5, 5}, Vec3::Zero(), 1.0, phi);
  ASSERT_TRUE(bump.normal(Vec3(2, 2, 2), n));
  EXPECT_NEAR((n - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
}

TEST(Mesh, ParsesFacesAndRejectsBadIndices) {
  std::istringstream good("# tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\nf 2/1/1 4/2/2 3/3/3\n");
  const TriangleMesh mesh = read_mesh(good);
  EXPECT_EQ(mesh.vertices.size(), 4u);
  ASSERT_EQ(mesh.faces.size(), 2u);
  EXPECT_EQ(mesh.faces[1], (Face{1, 3, 2}));
  std::istringstream quad("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  EXPECT_EQ(read_mesh(quad).faces.size(), 2u);
  std::istringstream bad("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  EXPECT_THROW(read_mesh(bad), FormatError);
  std::istringstream junk("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 x 3\n");
  EXPECT_THROW(read_mesh(junk), FormatError);
}
