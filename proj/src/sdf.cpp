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

#include <ams/sdf.hpp>

#include <ams/binary_io.hpp>
#include <ams/errors.hpp>
#include <ams/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>

namespace ams {

SdfField::SdfField(std::array<int, 3> dims, const Vec3& origin, double cell_size, std::vector<double> phi)
    : dims_(dims), origin_(origin), cell_size_(cell_size), phi_(std::move(phi)) {
  for (int d : dims_)
    if (d < 2) throw InvalidArgument("SDF needs at least two nodes per axis");
  if (phi_.size() != static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2])
    throw InvalidArgument("SDF value count does not match dimensions");
  compute_gradient();
}

void SdfField::compute_gradient() {
  grad_.assign(phi_.size(), Vec3::Zero());
  for (int k = 0; k < dims_[2]; ++k)
    for (int j = 0; j < dims_[1]; ++j)
      for (int i = 0; i < dims_[0]; ++i) {
        const std::array<int, 3> c{i, j, k};
        Vec3 g;
        for (int a = 0; a < 3; ++a) {
          std::array<int, 3> lo = c, hi = c;
          if (c[a] > 0) --lo[a];
          if (c[a] + 1 < dims_[a]) ++hi[a];
          g[a] = (node_value(hi[0], hi[1], hi[2]) - node_value(lo[0], lo[1], lo[2])) / ((hi[a] - lo[a]) * cell_size_);
        }
        grad_[index(i, j, k)] = g;
      }
}

Vec3 SdfField::clamp_local(const Vec3& local) const {
  Vec3 c;
  for (int a = 0; a < 3; ++a)
    c[a] = std::clamp(local[a], origin_[a], origin_[a] + cell_size_ * (dims_[a] - 1));
  return c;
}

namespace {

template <typename T, typename Get>
T trilinear(const std::array<int, 3>& dims, const Vec3& g, Get get) {
  std::array<int, 3> base;
  Vec3 f;
  for (int a = 0; a < 3; ++a) {
    base[a] = std::clamp(static_cast<int>(std::floor(g[a])), 0, dims[a] - 2);
    f[a] = std::clamp(g[a] - base[a], 0.0, 1.0);
  }
  T acc = get(base[0], base[1], base[2]) * ((1 - f.x()) * (1 - f.y()) * (1 - f.z()));
  acc += get(base[0] + 1, base[1], base[2]) * (f.x() * (1 - f.y()) * (1 - f.z()));
  acc += get(base[0], base[1] + 1, base[2]) * ((1 - f.x()) * f.y() * (1 - f.z()));
  acc += get(base[0] + 1, base[1] + 1, base[2]) * (f.x() * f.y() * (1 - f.z()));
  acc += get(base[0], base[1], base[2] + 1) * ((1 - f.x()) * (1 - f.y()) * f.z());
  acc += get(base[0] + 1, base[1], base[2] + 1) * (f.x() * (1 - f.y()) * f.z());
  acc += get(base[0], base[1] + 1, base[2] + 1) * ((1 - f.x()) * f.y() * f.z());
  acc += get(base[0] + 1, base[1] + 1, base[2] + 1) * (f.x() * f.y() * f.z());
  return acc;
}

}  // namespace

double SdfField::local_distance(const Vec3& local) const {
  const Vec3 clamped = clamp_local(local);
  const Vec3 g = (clamped - origin_) / cell_size_;
  const double inside = trilinear<double>(dims_, g, [&](int i, int j, int k) { return node_value(i, j, k); });
  return inside + (local - clamped).norm();
}

Vec3 SdfField::local_gradient(const Vec3& local) const {
  const Vec3 clamped = clamp_local(local);
  const Vec3 g = (clamped - origin_) / cell_size_;
  return trilinear<Vec3>(dims_, g, [&](int i, int j, int k) { return grad_[index(i, j, k)]; });
}

double SdfField::distance(const Vec3& world) const { return local_distance(motion_.pose.apply_inverse(world)); }

Vec3 SdfField::gradient(const Vec3& world) const {
  return motion_.pose.rotate(local_gradient(motion_.pose.apply_inverse(world)));
}

bool SdfField::normal(const Vec3& world, Vec3& out) const {
  const Vec3 local = motion_.pose.apply_inverse(world);
  Vec3 g = local_gradient(local);
  if (g.norm() < 1e-12) {
    const Vec3 cell = (clamp_local(local) - origin_) / cell_size_;
    const std::array<int, 3> near{static_cast<int>(std::lround(cell.x())), static_cast<int>(std::lround(cell.y())),
                                  static_cast<int>(std::lround(cell.z()))};
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 1; ring <= 3 && !std::isfinite(best); ++ring)
      for (int dk = -ring; dk <= ring; ++dk)
        for (int dj = -ring; dj <= ring; ++dj)
          for (int di = -ring; di <= ring; ++di) {
            const int i = near[0] + di, j = near[1] + dj, k = near[2] + dk;
            if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) continue;
            const Vec3& candidate = grad_[index(i, j, k)];
            if (candidate.norm() < 1e-12) continue;
            const double d = (node_position(i, j, k) - local).squaredNorm();
            if (d < best) {
              best = d;
              g = candidate;
            }
          }
    if (!std::isfinite(best)) return false;
  }
  out = motion_.pose.rotate(g.normalized());
  return true;
}

void SdfField::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write SDF " + path.string());
  binary::put_magic(out, "SDF1");
  for (int d : dims_) binary::put_u32(out, static_cast<std::uint32_t>(d));
  for (int a = 0; a < 3; ++a) binary::put_f32(out, static_cast<float>(origin_[a]));
  binary::put_f32(out, static_cast<float>(cell_size_));
  for (double v : phi_) binary::put_f32(out, static_cast<float>(v));
  if (!out) throw IoError("failed writing SDF " + path.string());
}

SdfField SdfField::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open SDF " + path.string());
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError(FormatErrorKind::MalformedHeader, "SDF file too short");
  if (std::string_view(magic, 3) != "SDF") throw FormatError(FormatErrorKind::MalformedHeader, "bad SDF magic");
  if (magic[3] != '1') throw FormatError(FormatErrorKind::VersionMismatch, "unsupported SDF version");
  std::array<int, 3> dims;
  for (int& d : dims) {
    std::uint32_t v;
    if (!binary::get_u32(in, v)) throw FormatError(FormatErrorKind::MalformedHeader, "truncated SDF header");
    d = static_cast<int>(v);
  }
  float o[3], h;
  for (float& c : o)
    if (!binary::get_f32(in, c)) throw FormatError(FormatErrorKind::MalformedHeader, "truncated SDF header");
  if (!binary::get_f32(in, h)) throw FormatError(FormatErrorKind::MalformedHeader, "truncated SDF header");
  const std::size_t count = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<double> phi(count);
  for (double& v : phi) {
    float f;
    if (!binary::get_f32(in, f)) throw FormatError(FormatErrorKind::TruncatedPayload, "truncated SDF values");
    v = f;
  }
  return SdfField(dims, Vec3(o[0], o[1], o[2]), h, std::move(phi));
}

namespace {

struct Box {
  Vec3 lo, hi;
  double squared_distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
    return d.squaredNorm();
  }
};

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  constexpr double kTol = 1e-12;
  const Vec3 dir = q - p;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec3 s = p - a;
  const double u = inv * s.dot(h);
  if (u < -kTol || u > 1.0 + kTol) return false;
  const Vec3 qv = s.cross(e1);
  const double v = inv * dir.dot(qv);
  if (v < -kTol || u + v > 1.0 + kTol) return false;
  const double t = inv * e2.dot(qv);
  return t >= -kTol && t <= 1.0 + kTol;
}

}  // namespace

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (const Face& f : mesh.faces) {
    const Vec3 a = mesh.vertices[f[0]] - p;
    const Vec3 b = mesh.vertices[f[1]] - p;
    const Vec3 c = mesh.vertices[f[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

SdfField build_sdf(const TriangleMesh& mesh, const SdfBuildOptions& options) {
  if (mesh.empty() || mesh.vertices.empty()) throw InvalidArgument("cannot build an SDF from an empty mesh");
  if (options.resolution < 2) throw InvalidArgument("SDF resolution must be at least 2");

  Vec3 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  lo -= Vec3::Constant(options.padding);
  hi += Vec3::Constant(options.padding);
  const Vec3 extent = hi - lo;
  const double h = extent.maxCoeff() / (options.resolution - 1);
  std::array<int, 3> dims;
  for (int a = 0; a < 3; ++a) dims[a] = std::max(2, static_cast<int>(std::ceil(extent[a] / h - 1e-9)) + 1);
  const Vec3 origin = lo;

  std::vector<Box> boxes;
  boxes.reserve(mesh.faces.size());
  for (const Face& f : mesh.faces) {
    Box b{mesh.vertices[f[0]], mesh.vertices[f[0]]};
    for (int v : f) {
      b.lo = b.lo.cwiseMin(mesh.vertices[v]);
      b.hi = b.hi.cwiseMax(mesh.vertices[v]);
    }
    boxes.push_back(b);
  }

  const std::size_t count = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<double> phi(count);
  auto node = [&](int i, int j, int k) { return Vec3(origin + h * Vec3(i, j, k)); };
  auto index = [&](int i, int j, int k) {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
  };

  parallel_for(static_cast<std::size_t>(dims[2]), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    std::size_t hint = 0;
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i) {
        const Vec3 p = node(i, j, k);
        auto tri_dist2 = [&](std::size_t f) {
          const Face& t = mesh.faces[f];
          return (closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) - p)
              .squaredNorm();
        };
        double best = tri_dist2(hint);
        for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
          if (boxes[f].squared_distance(p) >= best) continue;
          const double d = tri_dist2(f);
          if (d < best) {
            best = d;
            hint = f;
          }
        }
        phi[index(i, j, k)] = std::sqrt(best);
      }
  });

  std::vector<char> inside(count, 0);
  if (options.sign == SignMode::WindingNumber) {
    parallel_for(count, [&](std::size_t c) {
      const int i = static_cast<int>(c % dims[0]);
      const int j = static_cast<int>((c / dims[0]) % dims[1]);
      const int k = static_cast<int>(c / (static_cast<std::size_t>(dims[0]) * dims[1]));
      inside[c] = winding_number(mesh, node(i, j, k)) > 0.5;
    });
  } else {
    // Bucket faces into grid cells, then flood fill the outside from the
    // domain boundary through node edges that cross no triangle.
    const std::array<int, 3> cells{dims[0] - 1, dims[1] - 1, dims[2] - 1};
    std::vector<std::vector<int>> bucket(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2]);
    auto cell_index = [&](int i, int j, int k) {
      return static_cast<std::size_t>(i) + static_cast<std::size_t>(cells[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(cells[1]) * k);
    };
    for (std::size_t f = 0; f < boxes.size(); ++f) {
      std::array<int, 3> c0, c1;
      for (int a = 0; a < 3; ++a) {
        c0[a] = std::clamp(static_cast<int>(std::floor((boxes[f].lo[a] - origin[a]) / h - 1e-6)), 0, cells[a] - 1);
        c1[a] = std::clamp(static_cast<int>(std::floor((boxes[f].hi[a] - origin[a]) / h + 1e-6)), 0, cells[a] - 1);
      }
      for (int k = c0[2]; k <= c1[2]; ++k)
        for (int j = c0[1]; j <= c1[1]; ++j)
          for (int i = c0[0]; i <= c1[0]; ++i) bucket[cell_index(i, j, k)].push_back(static_cast<int>(f));
    }
    auto edge_blocked = [&](const std::array<int, 3>& a, int axis) {
      const Vec3 p = node(a[0], a[1], a[2]);
      std::array<int, 3> b = a;
      ++b[axis];
      const Vec3 q = node(b[0], b[1], b[2]);
      // Cells sharing this edge: vary the two other axes by 0 / -1.
      const int u = (axis + 1) % 3, w = (axis + 2) % 3;
      for (int du = -1; du <= 0; ++du)
        for (int dw = -1; dw <= 0; ++dw) {
          std::array<int, 3> c = a;
          c[u] += du;
          c[w] += dw;
          if (c[u] < 0 || c[w] < 0 || c[u] >= cells[u] || c[w] >= cells[w] || c[axis] >= cells[axis]) continue;
          for (int f : bucket[cell_index(c[0], c[1], c[2])]) {
            const Face& t = mesh.faces[f];
            if (segment_hits_triangle(p, q, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]])) return true;
          }
        }
      return false;
    };

    std::vector<char> outside(count, 0);
    std::deque<std::array<int, 3>> queue;
    for (int k = 0; k < dims[2]; ++k)
      for (int j = 0; j < dims[1]; ++j)
        for (int i = 0; i < dims[0]; ++i) {
          const bool boundary = i == 0 || j == 0 || k == 0 || i == dims[0] - 1 || j == dims[1] - 1 || k == dims[2] - 1;
          if (boundary) {
            outside[index(i, j, k)] = 1;
            queue.push_back({i, j, k});
          }
        }
    while (!queue.empty()) {
      const auto c = queue.front();
      queue.pop_front();
      for (int axis = 0; axis < 3; ++axis)
        for (int dir : {-1, 1}) {
          std::array<int, 3> nb = c;
          nb[axis] += dir;
          if (nb[axis] < 0 || nb[axis] >= dims[axis]) continue;
          const std::size_t ni = index(nb[0], nb[1], nb[2]);
          if (outside[ni]) continue;
          if (edge_blocked(dir > 0 ? c : nb, axis)) continue;
          outside[ni] = 1;
          queue.push_back(nb);
        }
    }
    for (std::size_t c = 0; c < count; ++c) inside[c] = !outside[c];
  }

  for (std::size_t c = 0; c < count; ++c)
    if (inside[c]) phi[c] = -phi[c];
  return SdfField(dims, origin, h, std::move(phi));
}

Vec3 rigid_velocity_at(const SdfField& sdf, const Vec3& p) { return sdf.motion().velocity_at(p); }

Vec3 collide_velocity(const Vec3& x, const Vec3& v, double dt, const SdfField& sdf, double friction) {
  const Vec3 target = x + dt * v;
  if (sdf.distance(target) >= 0.0) return v;
  Vec3 n;
  if (!sdf.normal(target, n)) return v;
  const Vec3 solid = rigid_velocity_at(sdf, target);
  const Vec3 relative = v - solid;
  const Vec3 rel_normal = relative.dot(n) * n;
  const Vec3 rel_tangent = relative - rel_normal;
  const double tangential = rel_tangent.norm();
  if (tangential < 1e-9) return solid;
  const double factor = std::max(0.0, 1.0 - friction * rel_normal.norm() / tangential);
  return solid + factor * rel_tangent;
}

Vec3 collide_position(const Vec3& x, const Vec3& v, double dt, const SdfField& sdf) {
  Vec3 p = x + dt * v;
  for (int pass = 0; pass < 4; ++pass) {
    const double phi = sdf.distance(p);
    if (phi >= 0.0) break;
    Vec3 n;
    if (!sdf.normal(p, n)) break;
    p -= phi * n;
  }
  return p;
}

}  // namespace ams
