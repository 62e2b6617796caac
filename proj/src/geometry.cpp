#include "bornscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

namespace bornscat {

Shape Shape::sphere(double kR, cplx chi, Vec3 center) {
  Shape s;
  s.kind = Kind::Sphere;
  s.radius = kR;
  s.chi = chi;
  s.center = center;
  return s;
}

Shape Shape::cylinder(double krho, double kh, cplx chi, Vec3 center) {
  Shape s;
  s.kind = Kind::Cylinder;
  s.radius = krho;
  s.height = kh;
  s.chi = chi;
  s.center = center;
  return s;
}

Shape Shape::box(Vec3 size, cplx chi, Vec3 center) {
  Shape s;
  s.kind = Kind::Box;
  s.size = size;
  s.chi = chi;
  s.center = center;
  return s;
}

Shape Shape::mask(std::string path) {
  Shape s;
  s.kind = Kind::Mask;
  s.mask_path = std::move(path);
  return s;
}

VoxelGrid::VoxelGrid(double kd, Index3 origin, Index3 dims, std::vector<std::uint8_t> mask, std::vector<cplx> chi)
    : kd_(kd), origin_(origin), dims_(dims), mask_(std::move(mask)), chi_(std::move(chi)) {
  if (!(kd_ > 0.0) || !std::isfinite(kd_)) throw DomainError("voxel spacing must be positive");
  const std::size_t total = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  if (mask_.size() != total) throw DimensionError("mask size does not match grid dimensions");
  for (int i = 0; i < dims_[0]; ++i) {
    for (int j = 0; j < dims_[1]; ++j) {
      for (int k = 0; k < dims_[2]; ++k) {
        const std::size_t b = (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
        if (mask_[b]) {
          cells_.push_back({i, j, k});
          box_index_.push_back(b);
        }
      }
    }
  }
  if (cells_.empty()) throw DegenerateShapeError("voxel grid has no occupied voxels");
  if (chi_.size() != cells_.size()) throw DimensionError("susceptibility count does not match occupied voxels");
  for (const auto& c : chi_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw DomainError("non-finite susceptibility");
  }
}

Vec3 VoxelGrid::center(std::size_t n) const {
  const auto& c = cells_[n];
  return {(origin_[0] + c[0] + 0.5) * kd_, (origin_[1] + c[1] + 0.5) * kd_, (origin_[2] + c[2] + 0.5) * kd_};
}

bool VoxelGrid::uniform_chi() const {
  return std::all_of(chi_.begin(), chi_.end(), [&](const cplx& c) { return c == chi_.front(); });
}

VoxelGrid VoxelGrid::with_chi(cplx chi) const { return with_chi(std::vector<cplx>(size(), chi)); }

VoxelGrid VoxelGrid::with_chi(std::vector<cplx> chi) const {
  return VoxelGrid(kd_, origin_, dims_, mask_, std::move(chi));
}

namespace {

struct Bounds {
  Vec3 lo;
  Vec3 hi;
};

struct Member {
  Shape shape;
  Bounds bounds;
  std::shared_ptr<VoxelGrid> raster;
};

Bounds shape_bounds(const Shape& s, const VoxelGrid* raster) {
  const auto& c = s.center;
  switch (s.kind) {
    case Shape::Kind::Sphere:
      return {{c[0] - s.radius, c[1] - s.radius, c[2] - s.radius}, {c[0] + s.radius, c[1] + s.radius, c[2] + s.radius}};
    case Shape::Kind::Cylinder:
      return {{c[0] - s.radius, c[1] - s.radius, c[2] - 0.5 * s.height},
              {c[0] + s.radius, c[1] + s.radius, c[2] + 0.5 * s.height}};
    case Shape::Kind::Box:
      return {{c[0] - 0.5 * s.size[0], c[1] - 0.5 * s.size[1], c[2] - 0.5 * s.size[2]},
              {c[0] + 0.5 * s.size[0], c[1] + 0.5 * s.size[1], c[2] + 0.5 * s.size[2]}};
    case Shape::Kind::Mask: {
      Bounds b;
      for (int a = 0; a < 3; ++a) {
        b.lo[a] = raster->origin()[a] * raster->kd();
        b.hi[a] = (raster->origin()[a] + raster->dims()[a]) * raster->kd();
      }
      return b;
    }
  }
  return {};
}

// Returns the voxel index inside the raster when p falls in an occupied cell.
std::ptrdiff_t raster_lookup(const VoxelGrid& g, const Vec3& p) {
  Index3 ijk;
  for (int a = 0; a < 3; ++a) {
    ijk[a] = static_cast<int>(std::floor(p[a] / g.kd())) - g.origin()[a];
    if (ijk[a] < 0 || ijk[a] >= g.dims()[a]) return -1;
  }
  const std::size_t b = (static_cast<std::size_t>(ijk[0]) * g.dims()[1] + ijk[1]) * g.dims()[2] + ijk[2];
  if (!g.mask()[b]) return -1;
  std::size_t lo = 0;
  std::size_t hi = g.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (g.box_index(mid) < b) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return static_cast<std::ptrdiff_t>(lo);
}

bool contains(const Member& m, const Vec3& p, cplx& chi) {
  const Shape& s = m.shape;
  const Vec3 d = sub(p, s.center);
  switch (s.kind) {
    case Shape::Kind::Sphere:
      if (dot(d, d) <= s.radius * s.radius) {
        chi = s.chi;
        return true;
      }
      return false;
    case Shape::Kind::Cylinder:
      if (d[0] * d[0] + d[1] * d[1] <= s.radius * s.radius && std::abs(d[2]) <= 0.5 * s.height) {
        chi = s.chi;
        return true;
      }
      return false;
    case Shape::Kind::Box:
      if (std::abs(d[0]) <= 0.5 * s.size[0] && std::abs(d[1]) <= 0.5 * s.size[1] && std::abs(d[2]) <= 0.5 * s.size[2]) {
        chi = s.chi;
        return true;
      }
      return false;
    case Shape::Kind::Mask: {
      const auto n = raster_lookup(*m.raster, p);
      if (n < 0) return false;
      chi = m.raster->chi()[static_cast<std::size_t>(n)];
      return true;
    }
  }
  return false;
}

void validate(const Shape& s, bool require_passive) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
  };
  switch (s.kind) {
    case Shape::Kind::Sphere:
      positive(s.radius, "sphere radius");
      break;
    case Shape::Kind::Cylinder:
      positive(s.radius, "cylinder radius");
      positive(s.height, "cylinder height");
      break;
    case Shape::Kind::Box:
      for (double v : s.size) positive(v, "box edge");
      break;
    case Shape::Kind::Mask:
      if (s.mask_path.empty()) throw DomainError("mask shape needs a file path");
      break;
  }
  if (!std::isfinite(s.chi.real()) || !std::isfinite(s.chi.imag())) throw DomainError("non-finite susceptibility");
  if (require_passive && s.chi.imag() > 0.0) throw DomainError("susceptibility with Im chi > 0 is not passive");
}

// Smallest ball through all given points (|pts| <= 4), or radius -1 when degenerate.
struct Ball {
  Vec3 c{0.0, 0.0, 0.0};
  double r2 = -1.0;
};

Ball circum_ball(const std::vector<Vec3>& pts) {
  Ball b;
  const std::size_t n = pts.size();
  if (n == 0) return b;
  if (n == 1) {
    b.c = pts[0];
    b.r2 = 0.0;
    return b;
  }
  const Vec3 p0 = pts[0];
  if (n == 2) {
    for (int a = 0; a < 3; ++a) b.c[a] = 0.5 * (p0[a] + pts[1][a]);
    const Vec3 d = sub(pts[1], b.c);
    b.r2 = dot(d, d);
    return b;
  }
  // Center c = p0 + sum_i t_i (p_i - p0) with |c - p_i| = |c - p0|.
  const std::size_t m = n - 1;
  std::vector<Vec3> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = sub(pts[i + 1], p0);
  double A[3][3] = {};
  double rhs[3] = {};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) A[i][j] = 2.0 * dot(v[i], v[j]);
    rhs[i] = dot(v[i], v[i]);
  }
  // Gaussian elimination with partial pivoting on the m x m system.
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(A[i][i]));
  int perm[3] = {0, 1, 2};
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    }
    if (std::abs(A[piv][col]) <= 1e-12 * scale) return b;
    if (piv != col) {
      for (std::size_t j = 0; j < m; ++j) std::swap(A[piv][j], A[col][j]);
      std::swap(rhs[piv], rhs[col]);
      std::swap(perm[piv], perm[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t j = col; j < m; ++j) A[r][j] -= f * A[col][j];
      rhs[r] -= f * rhs[col];
    }
  }
  double t[3] = {};
  for (std::size_t ii = m; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t j = ii + 1; j < m; ++j) s -= A[ii][j] * t[j];
    t[ii] = s / A[ii][ii];
  }
  b.c = p0;
  for (std::size_t i = 0; i < m; ++i) {
    for (int a = 0; a < 3; ++a) b.c[a] += t[i] * v[i][a];
  }
  const Vec3 d = sub(p0, b.c);
  b.r2 = dot(d, d);
  return b;
}

bool inside(const Ball& b, const Vec3& p, double tol) {
  const Vec3 d = sub(p, b.c);
  return dot(d, d) <= b.r2 + tol;
}

// Minimal ball enclosing the support set R (|R| <= 4).
Ball trivial_ball(const std::vector<Vec3>& R, double tol) {
  Ball best;
  const std::size_t n = R.size();
  if (n == 0) return best;
  for (unsigned sub_mask = 1; sub_mask < (1u << n); ++sub_mask) {
    std::vector<Vec3> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (sub_mask & (1u << i)) s.push_back(R[i]);
    }
    const Ball b = circum_ball(s);
    if (b.r2 < 0.0) continue;
    if (best.r2 >= 0.0 && b.r2 >= best.r2) continue;
    bool ok = true;
    for (const auto& p : R) ok = ok && inside(b, p, tol);
    if (ok) best = b;
  }
  return best;
}

// Move-to-front Welzl recursion.
Ball welzl(std::vector<Vec3>& pts, std::size_t n, std::vector<Vec3>& R, double tol) {
  Ball b = trivial_ball(R, tol);
  if (R.size() == 4) return b;
  for (std::size_t i = 0; i < n; ++i) {
    if (b.r2 >= 0.0 && inside(b, pts[i], tol)) continue;
    const Vec3 p = pts[i];
    R.push_back(p);
    b = welzl(pts, i, R, tol);
    R.pop_back();
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(i), pts.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return b;
}

// 1D squared Euclidean distance transform (lower envelope of parabolas).
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    if (s <= z[static_cast<std::size_t>(k)]) {
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      k = 0;
      continue;
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (k < 0) {
    for (int q = 0; q < n; ++q) d[q] = inf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    d[q] = (q - p) * (q - p) + f[p];
  }
}

}  // namespace

VoxelGrid voxelize(const ShapeSpec& spec, double kd) {
  if (!(kd > 0.0) || !std::isfinite(kd)) throw DomainError("voxel spacing kd must be positive");
  if (spec.members.empty()) throw DomainError("shape union has no members");
  std::vector<Member> members;
  for (const auto& s : spec.members) {
    validate(s, spec.require_passive);
    Member m{s, {}, nullptr};
    if (s.kind == Shape::Kind::Mask) {
      m.raster = std::make_shared<VoxelGrid>(read_mask(s.mask_path));
      if (spec.require_passive) {
        for (const auto& c : m.raster->chi()) {
          if (c.imag() > 0.0) throw DomainError("mask susceptibility with Im chi > 0 is not passive");
        }
      }
    }
    m.bounds = shape_bounds(s, m.raster.get());
    members.push_back(std::move(m));
  }
  Index3 lo{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  Index3 hi{std::numeric_limits<int>::min(), std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
  for (const auto& m : members) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], static_cast<int>(std::floor(m.bounds.lo[a] / kd - 0.5)) - 1);
      hi[a] = std::max(hi[a], static_cast<int>(std::ceil(m.bounds.hi[a] / kd - 0.5)) + 1);
    }
  }
  const Index3 box{hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(box[0]) * box[1] * box[2], 0);
  std::vector<cplx> chi_box(occ.size());
  Index3 omin = hi;
  Index3 omax = lo;
  for (int i = 0; i < box[0]; ++i) {
    for (int j = 0; j < box[1]; ++j) {
      for (int k = 0; k < box[2]; ++k) {
        const Vec3 p{(lo[0] + i + 0.5) * kd, (lo[1] + j + 0.5) * kd, (lo[2] + k + 0.5) * kd};
        cplx chi;
        for (const auto& m : members) {
          if (contains(m, p, chi)) {
            const std::size_t b = (static_cast<std::size_t>(i) * box[1] + j) * box[2] + k;
            occ[b] = 1;
            chi_box[b] = chi;
            const Index3 g{lo[0] + i, lo[1] + j, lo[2] + k};
            for (int a = 0; a < 3; ++a) {
              omin[a] = std::min(omin[a], g[a]);
              omax[a] = std::max(omax[a], g[a]);
            }
            break;
          }
        }
      }
    }
  }
  if (omin[0] > omax[0]) throw DegenerateShapeError("shape contains no voxel center at this spacing");
  // Crop to the occupied bounding box.
  const Index3 dims{omax[0] - omin[0] + 1, omax[1] - omin[1] + 1, omax[2] - omin[2] + 1};
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], 0);
  std::vector<cplx> chi;
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) {
      for (int k = 0; k < dims[2]; ++k) {
        const std::size_t src = (static_cast<std::size_t>(omin[0] - lo[0] + i) * box[1] + (omin[1] - lo[1] + j)) * box[2] +
                                (omin[2] - lo[2] + k);
        if (occ[src]) {
          mask[(static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k] = 1;
          chi.push_back(chi_box[src]);
        }
      }
    }
  }
  return VoxelGrid(kd, omin, dims, std::move(mask), std::move(chi));
}

double circumscribed_radius(const VoxelGrid& g) {
  // Only voxels with an empty face neighbour can be extreme points.
  const auto& d = g.dims();
  auto occupied = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) return false;
    return g.mask()[(static_cast<std::size_t>(i) * d[1] + j) * d[2] + k] != 0;
  };
  std::vector<Vec3> pts;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto& c = g.cell(n);
    const bool interior = occupied(c[0] - 1, c[1], c[2]) && occupied(c[0] + 1, c[1], c[2]) &&
                          occupied(c[0], c[1] - 1, c[2]) && occupied(c[0], c[1] + 1, c[2]) &&
                          occupied(c[0], c[1], c[2] - 1) && occupied(c[0], c[1], c[2] + 1);
    if (!interior) pts.push_back(g.center(n));
  }
  const double half_diag = 0.5 * std::sqrt(3.0) * g.kd();
  std::mt19937_64 rng(12345);
  std::shuffle(pts.begin(), pts.end(), rng);
  const double tol = 1e-10 * g.kd() * g.kd();
  std::vector<Vec3> R;
  Ball b;
  if (pts.size() <= 200000) b = welzl(pts, pts.size(), R, tol);
  bool ok = b.r2 >= 0.0;
  for (std::size_t i = 0; ok && i < pts.size(); ++i) ok = inside(b, pts[i], 4.0 * tol);
  if (!ok) {
    // Bounding-box center; over-estimates by at most a factor sqrt(3).
    Vec3 c;
    for (int a = 0; a < 3; ++a) c[a] = (g.origin()[a] + 0.5 * d[a]) * g.kd();
    double r2 = 0.0;
    for (const auto& p : pts) {
      const Vec3 e = sub(p, c);
      r2 = std::max(r2, dot(e, e));
    }
    b.r2 = r2;
  }
  return std::sqrt(std::max(b.r2, 0.0)) + half_diag;
}

double inscribed_radius(const VoxelGrid& g) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Index3 n{g.dims()[0] + 2, g.dims()[1] + 2, g.dims()[2] + 2};
  auto at = [&](int i, int j, int k) { return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k; };
  std::vector<double> f(static_cast<std::size_t>(n[0]) * n[1] * n[2], 0.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto& c = g.cell(v);
    f[at(c[0] + 1, c[1] + 1, c[2] + 1)] = inf;
  }
  const int nmax = std::max({n[0], n[1], n[2]});
  std::vector<double> line(static_cast<std::size_t>(nmax));
  std::vector<double> out(static_cast<std::size_t>(nmax));
  std::vector<int> v;
  std::vector<double> z;
  for (int axis = 2; axis >= 0; --axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    for (int p = 0; p < n[a1]; ++p) {
      for (int q = 0; q < n[a2]; ++q) {
        Index3 idx;
        idx[a1] = p;
        idx[a2] = q;
        for (int s = 0; s < n[axis]; ++s) {
          idx[axis] = s;
          line[static_cast<std::size_t>(s)] = f[at(idx[0], idx[1], idx[2])];
        }
        edt_1d(line.data(), out.data(), n[axis], v, z);
        for (int s = 0; s < n[axis]; ++s) {
          idx[axis] = s;
          f[at(idx[0], idx[1], idx[2])] = out[static_cast<std::size_t>(s)];
        }
      }
    }
  }
  double best = 0.0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    const auto& c = g.cell(s);
    best = std::max(best, f[at(c[0] + 1, c[1] + 1, c[2] + 1)]);
  }
  // Distance to the nearest empty cube is at least EDT - (sqrt3/2) kd; subtracting
  // a full kd is slightly more conservative and sends a lone voxel to 0.
  const double r = std::sqrt(best) * g.kd() - g.kd();
  return std::max(r, 0.0);
}

double volume(const VoxelGrid& g) { return static_cast<double>(g.size()) * g.cell_volume(); }

AnalyticGeometry analytic_geometry(const ShapeSpec& spec) {
  AnalyticGeometry a;
  if (spec.members.size() != 1) return a;
  const Shape& s = spec.members.front();
  switch (s.kind) {
    case Shape::Kind::Sphere:
      a.circumscribed = s.radius;
      a.inscribed = s.radius;
      a.volume = 4.0 * kPi / 3.0 * s.radius * s.radius * s.radius;
      break;
    case Shape::Kind::Cylinder:
      a.circumscribed = std::sqrt(s.radius * s.radius + 0.25 * s.height * s.height);
      a.inscribed = std::min(s.radius, 0.5 * s.height);
      a.volume = kPi * s.radius * s.radius * s.height;
      break;
    case Shape::Kind::Box:
      a.circumscribed = 0.5 * norm(s.size);
      a.inscribed = 0.5 * std::min({s.size[0], s.size[1], s.size[2]});
      a.volume = s.size[0] * s.size[1] * s.size[2];
      break;
    case Shape::Kind::Mask:
      break;
  }
  return a;
}

void write_mask(const std::string& path, const VoxelGrid& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open mask file for writing: " + path);
  const bool has_chi = std::any_of(g.chi().begin(), g.chi().end(), [](const cplx& c) { return c != cplx{0.0}; });
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "BSVOX 1\n"
      << g.dims()[0] << ' ' << g.dims()[1] << ' ' << g.dims()[2] << ' ' << g.kd() << ' ' << (has_chi ? 1 : 0) << ' '
      << g.origin()[0] << ' ' << g.origin()[1] << ' ' << g.origin()[2] << '\n';
  const std::string h = hdr.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(reinterpret_cast<const char*>(g.mask().data()), static_cast<std::streamsize>(g.mask().size()));
  if (has_chi) {
    for (const auto& c : g.chi()) {
      const double re = c.real();
      const double im = c.imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  if (!out) throw Error("failed writing mask file: " + path);
}

VoxelGrid read_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open mask file: " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != "BSVOX 1") throw ParseError(path + ": line 1: expected header 'BSVOX 1'");
  std::string line;
  std::getline(in, line);
  std::istringstream ls(line);
  Index3 dims;
  Index3 origin;
  double kd = 0.0;
  int has_chi = 0;
  if (!(ls >> dims[0] >> dims[1] >> dims[2] >> kd >> has_chi >> origin[0] >> origin[1] >> origin[2])) {
    throw ParseError(path + ": line 2: expected 'nx ny nz kd has_chi i0 j0 k0'");
  }
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw ParseError(path + ": line 2: dimensions must be positive");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  in.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  if (!in) throw ParseError(path + ": truncated occupancy block");
  std::size_t count = 0;
  for (auto& m : mask) {
    if (m > 1) throw ParseError(path + ": occupancy bytes must be 0 or 1");
    count += m;
  }
  std::vector<cplx> chi(count, cplx{0.0});
  if (has_chi) {
    for (auto& c : chi) {
      double re = 0.0;
      double im = 0.0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      c = {re, im};
    }
    if (!in) throw ParseError(path + ": truncated susceptibility block");
  }
  return VoxelGrid(kd, origin, dims, std::move(mask), std::move(chi));
}

}  // namespace bornscat
