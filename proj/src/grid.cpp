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

#include <ams/grid.hpp>

#include <ams/errors.hpp>
#include <ams/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>

namespace ams {

EulerianGrid::EulerianGrid(const GridSpec& spec, const RigidTransform& anchor) : spec_(spec), anchor_(anchor) {
  for (int r : spec_.resolution)
    if (r < 1) throw InvalidArgument("grid resolution must be positive");
  if (!(spec_.cell_size > 0.0)) throw InvalidArgument("grid cell size must be positive");
  const std::size_t count = static_cast<std::size_t>(spec_.resolution[0]) * spec_.resolution[1] * spec_.resolution[2];
  mass_.assign(count, 0.0);
  velocity_.assign(count, Vec3::Zero());
}

Vec3 EulerianGrid::cell_center(int i, int j, int k) const {
  const Vec3 local = spec_.origin + spec_.cell_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  return anchor_.apply(local);
}

void EulerianGrid::clear() {
  std::fill(mass_.begin(), mass_.end(), 0.0);
  std::fill(velocity_.begin(), velocity_.end(), Vec3::Zero());
}

Vec3 EulerianGrid::total_momentum() const {
  Vec3 p = Vec3::Zero();
  for (std::size_t c = 0; c < mass_.size(); ++c) p += mass_[c] * velocity_[c];
  return p;
}

bool EulerianGrid::stencil(const Vec3& world, Stencil& out) const {
  const Vec3 g = (anchor_.apply_inverse(world) - spec_.origin) / spec_.cell_size - Vec3::Constant(0.5);
  if (!g.allFinite()) return false;
  const int i0 = static_cast<int>(std::floor(g.x()));
  const int j0 = static_cast<int>(std::floor(g.y()));
  const int k0 = static_cast<int>(std::floor(g.z()));
  if (!contains(i0, j0, k0) || !contains(i0 + 1, j0 + 1, k0 + 1)) return false;
  const Vec3 f = g - Vec3(i0, j0, k0);
  int slot = 0;
  for (int dk = 0; dk < 2; ++dk) {
    const double wz = dk ? f.z() : 1.0 - f.z();
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? f.y() : 1.0 - f.y();
      for (int di = 0; di < 2; ++di) {
        const double wx = di ? f.x() : 1.0 - f.x();
        out.cells[slot] = index(i0 + di, j0 + dj, k0 + dk);
        out.weights[slot] = wx * wy * wz;
        ++slot;
      }
    }
  }
  return true;
}

namespace {

struct Contribution {
  std::size_t cell;
  double mass;
  Vec3 momentum;
};

struct StrandScatter {
  std::vector<Contribution> contributions;
  std::size_t samples = 0;
  std::size_t out_of_bounds = 0;
  Vec3 momentum = Vec3::Zero();
};

void scatter_sample(const EulerianGrid& grid, const Vec3& x, const Vec3& v, double m, StrandScatter& out) {
  ++out.samples;
  EulerianGrid::Stencil st;
  if (!grid.stencil(x, st)) {
    ++out.out_of_bounds;
    return;
  }
  out.momentum += m * v;
  for (int s = 0; s < 8; ++s) {
    if (st.weights[s] == 0.0) continue;
    const double wm = st.weights[s] * m;
    out.contributions.push_back({st.cells[s], wm, wm * v});
  }
}

}  // namespace

RasterizeStats rasterize(std::span<const Strand> strands, std::span<const StrandState> states, EulerianGrid& grid,
                         const RasterizeOptions& options) {
  if (strands.size() != states.size()) throw InvalidArgument("strand/state count mismatch");
  grid.clear();
  const int interior = std::max(0, options.segment_samples);
  std::vector<StrandScatter> per_strand(strands.size());

  parallel_for(strands.size(), [&](std::size_t s) {
    const Strand& strand = strands[s];
    const StrandState& state = states[s];
    StrandScatter& out = per_strand[s];
    const auto& m = strand.masses();
    out.contributions.reserve(8 * (strand.particle_count() * (1 + interior)));
    for (std::size_t i = 0; i < strand.particle_count(); ++i) {
      scatter_sample(grid, state.positions[i], state.velocities[i], m[i], out);
      if (i + 1 == strand.particle_count()) break;
      for (int q = 1; q <= interior; ++q) {
        const double t = static_cast<double>(q) / (interior + 1);
        const Vec3 x = (1.0 - t) * state.positions[i] + t * state.positions[i + 1];
        const Vec3 v = (1.0 - t) * state.velocities[i] + t * state.velocities[i + 1];
        scatter_sample(grid, x, v, 0.5 * (m[i] + m[i + 1]) / interior, out);
      }
    }
  });

  RasterizeStats stats;
  auto& mass = grid.mass();
  auto& velocity = grid.velocity();
  for (const StrandScatter& s : per_strand) {
    for (const Contribution& c : s.contributions) {
      mass[c.cell] += c.mass;
      velocity[c.cell] += c.momentum;
    }
    stats.samples += s.samples;
    stats.out_of_bounds += s.out_of_bounds;
    stats.sample_momentum += s.momentum;
  }
  for (std::size_t c = 0; c < mass.size(); ++c) {
    if (mass[c] > EulerianGrid::kMassEpsilon)
      velocity[c] /= mass[c];
    else
      velocity[c].setZero();
  }
  return stats;
}

void grid_regularize(EulerianGrid& grid, double strength, int iterations) {
  if (strength <= 0.0 || iterations <= 0) return;
  const auto res = grid.spec().resolution;
  auto& mass = grid.mass();
  auto& velocity = grid.velocity();
  const double s = std::min(strength, 1.0);

  for (int it = 0; it < iterations; ++it) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int parity = 0; parity < 2; ++parity) {
        // Pairs (c, c + e_axis) with c[axis] of the given parity are disjoint.
        const int outer = res[2];
        parallel_for(static_cast<std::size_t>(outer), [&](std::size_t kk) {
          const int k = static_cast<int>(kk);
          for (int j = 0; j < res[1]; ++j) {
            for (int i = 0; i < res[0]; ++i) {
              std::array<int, 3> c{i, j, k};
              if (c[axis] % 2 != parity || c[axis] + 1 >= res[axis]) continue;
              std::array<int, 3> d = c;
              ++d[axis];
              const std::size_t a = grid.index(c[0], c[1], c[2]);
              const std::size_t b = grid.index(d[0], d[1], d[2]);
              const double ma = mass[a];
              const double mb = mass[b];
              if (ma <= EulerianGrid::kMassEpsilon || mb <= EulerianGrid::kMassEpsilon) continue;
              const Vec3 mean = (ma * velocity[a] + mb * velocity[b]) / (ma + mb);
              velocity[a] += s * (mean - velocity[a]);
              velocity[b] += s * (mean - velocity[b]);
            }
          }
        });
      }
    }
  }
}

void grid_project_divergence(EulerianGrid& grid, int iterations) {
  if (iterations <= 0) return;
  const auto res = grid.spec().resolution;
  const double h = grid.spec().cell_size;
  const auto& mass = grid.mass();
  auto& velocity = grid.velocity();
  const std::size_t count = grid.cell_count();
  auto occupied = [&](int i, int j, int k) {
    return grid.contains(i, j, k) && mass[grid.index(i, j, k)] > EulerianGrid::kMassEpsilon;
  };
  static constexpr std::array<std::array<int, 3>, 3> kAxes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  std::vector<double> divergence(count, 0.0);
  for (int k = 0; k < res[2]; ++k)
    for (int j = 0; j < res[1]; ++j)
      for (int i = 0; i < res[0]; ++i) {
        if (!occupied(i, j, k)) continue;
        const std::size_t c = grid.index(i, j, k);
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
          const auto& e = kAxes[a];
          const Vec3& up = occupied(i + e[0], j + e[1], k + e[2]) ? velocity[grid.index(i + e[0], j + e[1], k + e[2])]
                                                                  : velocity[c];
          const Vec3& dn = occupied(i - e[0], j - e[1], k - e[2]) ? velocity[grid.index(i - e[0], j - e[1], k - e[2])]
                                                                  : velocity[c];
          div += (up[a] - dn[a]) / (2.0 * h);
        }
        divergence[c] = div;
      }

  std::vector<double> pressure(count, 0.0), next(count, 0.0);
  for (int it = 0; it < iterations; ++it) {
    for (int k = 0; k < res[2]; ++k)
      for (int j = 0; j < res[1]; ++j)
        for (int i = 0; i < res[0]; ++i) {
          const std::size_t c = grid.index(i, j, k);
          if (!occupied(i, j, k)) {
            next[c] = 0.0;
            continue;
          }
          double sum = 0.0;
          for (const auto& e : kAxes) {
            if (grid.contains(i + e[0], j + e[1], k + e[2])) sum += pressure[grid.index(i + e[0], j + e[1], k + e[2])];
            if (grid.contains(i - e[0], j - e[1], k - e[2])) sum += pressure[grid.index(i - e[0], j - e[1], k - e[2])];
          }
          next[c] = (sum - h * h * divergence[c]) / 6.0;
        }
    std::swap(pressure, next);
  }

  for (int k = 0; k < res[2]; ++k)
    for (int j = 0; j < res[1]; ++j)
      for (int i = 0; i < res[0]; ++i) {
        if (!occupied(i, j, k)) continue;
        const std::size_t c = grid.index(i, j, k);
        for (int a = 0; a < 3; ++a) {
          const auto& e = kAxes[a];
          const double up = grid.contains(i + e[0], j + e[1], k + e[2]) ? pressure[grid.index(i + e[0], j + e[1], k + e[2])] : 0.0;
          const double dn = grid.contains(i - e[0], j - e[1], k - e[2]) ? pressure[grid.index(i - e[0], j - e[1], k - e[2])] : 0.0;
          velocity[c][a] -= (up - dn) / (2.0 * h);
        }
      }
}

namespace {

bool gather(const EulerianGrid& grid, const EulerianGrid::Stencil& st, Vec3& out) {
  double total = 0.0;
  Vec3 acc = Vec3::Zero();
  for (int s = 0; s < 8; ++s) {
    if (grid.mass()[st.cells[s]] <= EulerianGrid::kMassEpsilon || st.weights[s] == 0.0) continue;
    total += st.weights[s];
    acc += st.weights[s] * grid.velocity()[st.cells[s]];
  }
  if (total < 1e-12) return false;
  out = acc / total;
  return true;
}

}  // namespace

void transfer_back(const EulerianGrid& before, const EulerianGrid& after, std::span<StrandState> states,
                   double flip_blend) {
  if (before.cell_count() != after.cell_count()) throw InvalidArgument("grid geometry mismatch in transfer_back");
  parallel_for(states.size(), [&](std::size_t s) {
    StrandState& state = states[s];
    for (std::size_t i = 1; i < state.positions.size(); ++i) {
      EulerianGrid::Stencil st;
      if (!after.stencil(state.positions[i], st)) continue;
      Vec3 v_after, v_before;
      if (!gather(after, st, v_after) || !gather(before, st, v_before)) continue;
      const Vec3 flip = state.velocities[i] + (v_after - v_before);
      state.velocities[i] = flip_blend * flip + (1.0 - flip_blend) * v_after;
    }
  });
}

namespace {

std::uint64_t cell_key(const Vec3& x, double r) {
  constexpr std::int64_t kBias = 1 << 20;
  const auto part = [&](double c) {
    const std::int64_t q = static_cast<std::int64_t>(std::floor(c / r)) + kBias;
    return static_cast<std::uint64_t>(std::clamp<std::int64_t>(q, 0, (1 << 21) - 1));
  };
  return part(x.x()) | (part(x.y()) << 21) | (part(x.z()) << 42);
}

struct BucketEntry {
  std::uint64_t key;
  std::uint32_t strand;
  std::uint32_t particle;
  bool operator<(const BucketEntry& o) const {
    return std::tie(key, strand, particle) < std::tie(o.key, o.strand, o.particle);
  }
};

}  // namespace

PairwiseStats resolve_pairwise(std::span<const Strand> strands, std::span<StrandState> states, double radius,
                               double stiffness, double dt) {
  if (!(radius > 0.0)) throw InvalidArgument("pairwise radius must be positive");
  PairwiseStats stats;
  std::vector<BucketEntry> entries;
  for (std::size_t s = 0; s < states.size(); ++s)
    for (std::size_t i = 1; i < states[s].positions.size(); ++i)
      entries.push_back({cell_key(states[s].positions[i], radius), static_cast<std::uint32_t>(s),
                         static_cast<std::uint32_t>(i)});
  std::sort(entries.begin(), entries.end());

  std::vector<std::vector<std::uint32_t>> partners(entries.size());
  parallel_for(entries.size(), [&](std::size_t a) {
    const BucketEntry& ea = entries[a];
    const Vec3& xa = states[ea.strand].positions[ea.particle];
    const Vec3 base = xa / radius;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Vec3 probe = (Vec3(std::floor(base.x()) + dx, std::floor(base.y()) + dy, std::floor(base.z()) + dz) +
                              Vec3::Constant(0.5)) *
                             radius;
          const std::uint64_t key = cell_key(probe, radius);
          auto it = std::lower_bound(entries.begin(), entries.end(), BucketEntry{key, 0, 0});
          for (; it != entries.end() && it->key == key; ++it) {
            if (it->strand == ea.strand) continue;
            if (std::tie(it->strand, it->particle) < std::tie(ea.strand, ea.particle)) continue;
            const Vec3& xb = states[it->strand].positions[it->particle];
            if ((xb - xa).squaredNorm() < radius * radius)
              partners[a].push_back(static_cast<std::uint32_t>(it - entries.begin()));
          }
        }
    std::sort(partners[a].begin(), partners[a].end());
  });

  // Impulses depend only on positions, so they are computed against the
  // unmodified positions and applied in sorted pair order.
  for (std::size_t a = 0; a < entries.size(); ++a) {
    const BucketEntry& ea = entries[a];
    for (std::uint32_t b : partners[a]) {
      const BucketEntry& eb = entries[b];
      const Vec3& xa = states[ea.strand].positions[ea.particle];
      const Vec3& xb = states[eb.strand].positions[eb.particle];
      Vec3 d = xb - xa;
      const double dist = d.norm();
      const Vec3 normal = dist > 0.0 ? Vec3(d / dist) : Vec3::UnitX();
      const double ma = strands[ea.strand].masses()[ea.particle];
      const double mb = strands[eb.strand].masses()[eb.particle];
      const double reduced = ma * mb / (ma + mb);
      const double impulse = stiffness * (radius - dist) / dt * reduced;
      states[ea.strand].velocities[ea.particle] -= (impulse / ma) * normal;
      states[eb.strand].velocities[eb.particle] += (impulse / mb) * normal;
      stats.momentum_change += ma * (-(impulse / ma) * normal) + mb * ((impulse / mb) * normal);
      ++stats.pairs;
    }
  }
  return stats;
}

}  // namespace ams
