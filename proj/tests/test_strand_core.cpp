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
#include <ams/forces.hpp>
#include <ams/strand.hpp>

#include <gtest/gtest.h>

#include <numbers>

using namespace ams;
using amstest::straight_strand;

namespace {

// Hooke's law summed spring by spring.
Vec3List brute_force_springs(const Vec3List& x, const SpringNetwork& net) {
  Vec3List f(x.size(), Vec3::Zero());
  for (const Spring& s : net.entries()) {
    const Vec3 d = x[s.j] - x[s.i];
    const double len = d.norm();
    const Vec3 t = s.stiffness * (len - s.rest_length) * d / len;
    f[s.i] += t;
    f[s.j] -= t;
  }
  return f;
}

Vec3List random_points(std::mt19937_64& gen, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Vec3List p;
  for (std::size_t i = 0; i < n; ++i) p.emplace_back(0.01 * i + u(gen), u(gen), u(gen));
  return p;
}

}  // namespace

TEST(IntegrityForce, ProductOfStiffnessAndDistance) {
  const Vec3 f = integrity_force(Vec3::Zero(), Vec3(0, 0.02, 0), 100.0, 1.0);
  EXPECT_NEAR(f.x(), 0.0, 1e-15);
  EXPECT_NEAR(f.y(), 2.0, 1e-12);
  EXPECT_NEAR(f.z(), 0.0, 1e-15);
  EXPECT_NEAR(integrity_force(Vec3(1, 2, 3), Vec3(1.01, 2, 3), 100.0, 1.0).norm(), 1.0, 1e-9);
  EXPECT_NEAR(integrity_force(Vec3::Zero(), Vec3(0, 0.02, 0), 100.0, 0.5).y(), 1.0, 1e-12);
}

TEST(IntegrityForce, CoincidentPointsExertNothing) {
  EXPECT_EQ(integrity_force(Vec3(0.3, -1, 2), Vec3(0.3, -1, 2), 1e4, 1.0), Vec3::Zero());
}

TEST(AngularForce, ZeroWhenOnGhost) {
  EXPECT_EQ(angular_force(Vec3::Zero(), Vec3(1, 0, 0), Vec3(1, 0, 0), 100.0), Vec3::Zero());
}

TEST(AngularForce, ThirtyDegrees) {
  const double c = std::cos(std::numbers::pi / 6), s = std::sin(std::numbers::pi / 6);
  const Vec3 ghost(c, s, 0);
  const Vec3 f = angular_force(Vec3::Zero(), Vec3(1, 0, 0), ghost, 100.0);
  EXPECT_NEAR(f.norm(), 100.0 * std::numbers::pi / 6, 1e-9);
  EXPECT_NEAR(f.normalized().dot((ghost - Vec3(1, 0, 0)).normalized()), 1.0, 1e-12);
}

TEST(AngularForce, OppositeSegmentsGivePi) {
  const Vec3 f = angular_force(Vec3::Zero(), Vec3(1, 0, 0), Vec3(-1, 0, 0), 10.0);
  EXPECT_NEAR(f.norm(), 10.0 * std::numbers::pi, 1e-9);
  EXPECT_TRUE(f.allFinite());
}

TEST(AngularForce, DegenerateSegmentIsFlagged) {
  ForceDiagnostics diag;
  EXPECT_EQ(angular_force(Vec3::Zero(), Vec3::Zero(), Vec3(1, 0, 0), 100.0, &diag), Vec3::Zero());
  EXPECT_EQ(diag.degenerate_angular, 1u);
}

TEST(SpringNetwork, BandAndRestLengths) {
  std::mt19937_64 gen(3);
  const Vec3List rest = random_points(gen, 9, 0.002);
  const SpringNetwork net = SpringNetwork::build(rest, SpringStiffness{1.0, 2.0, 3.0});
  EXPECT_EQ(net.size(), 8u + 7u + 6u);
  for (const Spring& s : net.entries()) {
    EXPECT_EQ(s.j - s.i, spring_offset(s.kind));
    EXPECT_LE(s.j - s.i, 3);
    EXPECT_EQ(s.rest_length, (rest[s.j] - rest[s.i]).norm());
    EXPECT_EQ(s.stiffness, static_cast<double>(spring_offset(s.kind)));
  }
}

TEST(LocalSprings, AtRestIsZero) {
  const Vec3List rest{Vec3::Zero(), Vec3(1, 0, 0)};
  const SpringNetwork net = SpringNetwork::build(rest, SpringStiffness::uniform(1.0));
  for (const Vec3& f : local_spring_forces(rest, net)) EXPECT_EQ(f, Vec3::Zero());
}

TEST(LocalSprings, HookeArithmetic) {
  const SpringNetwork net = SpringNetwork::build(Vec3List{Vec3::Zero(), Vec3(1, 0, 0)}, SpringStiffness::uniform(1.0));
  const Vec3List f = local_spring_forces(Vec3List{Vec3::Zero(), Vec3(1.5, 0, 0)}, net);
  EXPECT_NEAR((f[0] - Vec3(0.5, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((f[1] - Vec3(-0.5, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(LocalSprings, MatchesPerSpringOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3List rest = random_points(gen, 5, 0.002);
    const SpringNetwork net = SpringNetwork::build(rest, SpringStiffness{1e6, 5e5, 2e5});
    const Vec3List x = random_points(gen, 5, 0.003);
    const Vec3List got = local_spring_forces(x, net);
    const Vec3List want = brute_force_springs(x, net);
    double scale = 0.0;
    for (const Vec3& f : want) scale = std::max(scale, f.norm());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE((got[i] - want[i]).norm(), 1e-12 * scale);
  }
}

TEST(LocalSprings, NewtonsThirdLaw) {
  std::mt19937_64 gen(5);
  const Vec3List rest = random_points(gen, 30, 0.002);
  const SpringNetwork net = SpringNetwork::build(rest, SpringStiffness::uniform(1e6));
  const Vec3List f = local_spring_forces(random_points(gen, 30, 0.003), net);
  Vec3 sum = Vec3::Zero();
  double peak = 0.0;
  for (const Vec3& v : f) {
    sum += v;
    peak = std::max(peak, v.norm());
  }
  EXPECT_LE(sum.norm(), 1e-10 * peak);
}

TEST(LocalSprings, RigidMotionEquivariance) {
  std::mt19937_64 gen(9);
  const Vec3List rest = random_points(gen, 12, 0.002);
  const SpringNetwork net = SpringNetwork::build(rest, SpringStiffness::uniform(1e6));
  const Vec3List x = random_points(gen, 12, 0.003);
  const Quat q = Quat(Eigen::AngleAxisd(0.7, Vec3(1, 2, -1).normalized()));
  const Vec3 t(0.3, -2.0, 1.5);
  Vec3List moved;
  for (const Vec3& p : x) moved.push_back(q * p + t);
  const Vec3List f = local_spring_forces(x, net);
  const Vec3List g = local_spring_forces(moved, net);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LE((g[i] - q * f[i]).norm(), 1e-9 * std::max(1.0, f[i].norm()));
}

TEST(LocalSprings, CoincidentPairFlagged) {
  const SpringNetwork net = SpringNetwork::build(Vec3List{Vec3::Zero(), Vec3(1, 0, 0)}, SpringStiffness::uniform(1.0));
  ForceDiagnostics diag;
  const Vec3List f = local_spring_forces(Vec3List{Vec3::Zero(), Vec3::Zero()}, net, &diag);
  EXPECT_EQ(f[0], Vec3::Zero());
  EXPECT_EQ(diag.degenerate_springs, 1u);
}

TEST(NonHookean, CurveEvaluation) {
  NonHookeanCurve curve;
  curve.points = {{0.0, 1.0}, {0.1, 1.0}, {0.3, 0.2}};
  curve.validate();
  EXPECT_EQ(curve.evaluate(0.0), 1.0);
  EXPECT_NEAR(curve.evaluate(0.2), 0.6, 1e-12);
  EXPECT_EQ(curve.evaluate(5.0), 0.2);
}

TEST(NonHookean, InvalidCurvesRejected) {
  NonHookeanCurve c;
  c.points = {{0.0, 0.5}};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.points = {{0.0, 1.0}, {0.2, 0.5}, {0.1, 0.4}};
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(NonHookean, PlasticMemoryIsMonotone) {
  const Strand strand = Strand::uniform(straight_strand(3, Vec3::Zero(), Vec3(0, -0.01, 0)), 1e-6, {});
  StrandState state = StrandState::at_rest(strand);
  const GhostConfig ghosts = GhostConfig::from_rest(strand);
  NonHookeanCurve curve;
  curve.points = {{0.0, 1.0}, {0.1, 1.0}, {0.3, 0.2}};
  curve.plastic = true;
  std::vector<double> seen;
  for (double d : {0.0, 0.2, 0.5, 0.0, 0.15}) {
    state.positions[2] = ghosts.positions[2] + Vec3(d, 0, 0);
    non_hookean_update(state, ghosts, curve);
    seen.push_back(state.plasticity[2]);
  }
  EXPECT_EQ(seen.front(), 1.0);
  for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_LE(seen[k], seen[k - 1]);
  EXPECT_EQ(seen.back(), 0.2);

  curve.plastic = false;
  state.positions[2] = ghosts.positions[2];
  non_hookean_update(state, ghosts, curve);
  EXPECT_EQ(state.plasticity[2], 1.0);
}

TEST(Preload, OffsetsFollowWeight) {
  const Strand strand = Strand::uniform(straight_strand(4, Vec3::Zero(), Vec3(0.01, 0, 0)), 0.01, {});
  const Vec3List dr = integrity_preload(strand, 100.0, Vec3(0, -9.81, 0));
  EXPECT_EQ(dr[0], Vec3::Zero());
  for (std::size_t i = 1; i < dr.size(); ++i) EXPECT_NEAR((dr[i] - Vec3(0, -9.81e-4, 0)).norm(), 0.0, 1e-18);
  for (const Vec3& v : integrity_preload(strand, 100.0, Vec3::Zero())) EXPECT_EQ(v, Vec3::Zero());
  EXPECT_THROW(integrity_preload(strand, 0.0, Vec3(0, -9.81, 0)), InvalidArgument);
}

TEST(Preload, IntegrityBalancesWeight) {
  const double m = 1e-5, kappa = 100.0;
  const Vec3 g(0, -9.81, 0);
  const Strand strand = Strand::uniform(straight_strand(30, Vec3::Zero(), Vec3(0.005, 0, 0)), m, {});
  const GhostConfig ghosts = GhostConfig::from_rest(strand, preload_ghost_offsets(strand, kappa, g));
  const StrandState state = StrandState::at_rest(strand);
  for (std::size_t i = 1; i < strand.particle_count(); ++i) {
    const Vec3 net = integrity_force(state.positions[i], ghosts.positions[i], kappa, 1.0) + m * g;
    EXPECT_LE(net.norm(), 1e-12);
  }
}

TEST(Forces, MassSpringReductionIsExact) {
  std::mt19937_64 gen(21);
  const Strand strand = Strand::uniform(random_points(gen, 10, 0.002), 1e-6, SpringStiffness::uniform(1e6));
  StrandState state = StrandState::at_rest(strand);
  state.positions = random_points(gen, 10, 0.003);
  const GhostConfig ghosts = GhostConfig::from_rest(strand);
  SimParams p;
  p.kappa_I = 0.0;
  p.kappa_alpha = 0.0;
  const Vec3List total = total_forces(strand, state, ghosts, p, {});
  const Vec3List local = local_spring_forces(state.positions, strand.springs());
  for (std::size_t i = 0; i < total.size(); ++i) EXPECT_EQ(total[i], local[i]);
}

TEST(Strand, RejectsBadInput) {
  EXPECT_THROW(Strand::uniform(Vec3List{Vec3::Zero()}, 1e-6, {}), InvalidArgument);
  EXPECT_THROW(Strand::uniform(Vec3List{Vec3::Zero(), Vec3::Zero()}, 1e-6, {}), InvalidArgument);
  EXPECT_THROW(Strand::uniform(Vec3List{Vec3::Zero(), Vec3(1, 0, 0)}, 0.0, {}), InvalidArgument);
}

TEST(Ghosts, MoveOnlyWithHead) {
  const Strand strand = Strand::uniform(straight_strand(5, Vec3::Zero(), Vec3(0, -0.01, 0)), 1e-6, {});
  GhostConfig ghosts = GhostConfig::from_rest(strand);
  RigidTransform pose;
  pose.translation = Vec3(0.1, 0, 0);
  ghosts.update(strand, pose, 0.5);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR((ghosts.positions[i] - (strand.rest_positions()[i] + pose.translation)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((ghosts.velocities[i] - Vec3(0.2, 0, 0)).norm(), 0.0, 1e-12);
  }
}

TEST(SimParams, Validation) {
  SimParams p;
  EXPECT_NO_THROW(p.validate());
  p.dt = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.substeps = 0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.kappa_I = -1.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = {};
  p.flip_blend = 1.5;
  EXPECT_THROW(p.validate(), InvalidArgument);
}
