#include "bornscat/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "bornscat/geometry.hpp"
#include "bornscat/specfun.hpp"

namespace bornscat {

AngularGrid AngularGrid::gauss_product(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw DomainError("angular grid needs positive node counts");
  AngularGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  std::vector<double> x;
  std::vector<double> w;
  specfun::gauss_legendre(n_theta, x, w);
  const double dphi = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = x[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_phi; ++j) {
      const double ph = (j + 0.5) * dphi;
      g.nodes.push_back({st * std::cos(ph), st * std::sin(ph), ct});
      g.weights.push_back(w[static_cast<std::size_t>(i)] * dphi);
    }
  }
  return g;
}

AngularGrid AngularGrid::default_for(double kRV) {
  return kRV > 4.0 ? gauss_product(64, 128) : gauss_product(32, 64);
}

Scatterer Scatterer::from_grid(const VoxelGrid& grid) {
  Scatterer s;
  s.points.reserve(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) s.points.push_back(grid.center(n));
  s.weights.assign(grid.size(), grid.cell_volume());
  s.chi = grid.chi();
  return s;
}

namespace {

void check_field(const Scatterer& s, const Field& E) {
  if (E.size() != 3 * s.size()) throw DimensionError("field length does not match the scatterer");
}

// n x (n x v) = n (n.v) - v.
Vec3c transverse(const Vec3& n, const Vec3c& v) {
  const cplx nv = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
  return {n[0] * nv - v[0], n[1] * nv - v[1], n[2] * nv - v[2]};
}

// sum_j c_j src_j exp(i n.r_j) w_j for each direction.
std::vector<Vec3c> radiated(const Scatterer& s, const Field& E, const std::vector<Vec3>& dirs, bool with_chi) {
  std::vector<Vec3c> out(dirs.size());
  parallel_for(dirs.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t d = b; d < e; ++d) {
      const Vec3& n = dirs[d];
      cplx acc[3] = {0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < s.size(); ++j) {
        const cplx ph = std::exp(kI * dot(n, s.points[j])) * s.weights[j] * (with_chi ? s.chi[j] : cplx{1.0});
        for (int a = 0; a < 3; ++a) acc[a] += ph * E[3 * j + static_cast<std::size_t>(a)];
      }
      out[d] = {acc[0], acc[1], acc[2]};
    }
  });
  return out;
}

}  // namespace

std::vector<Vec3c> far_amplitude(const Scatterer& s, const Field& E, const std::vector<Vec3>& directions) {
  check_field(s, E);
  auto sums = radiated(s, E, directions, true);
  const double pref = 1.0 / (4.0 * kPi);
  for (std::size_t d = 0; d < directions.size(); ++d) {
    Vec3c t = transverse(directions[d], sums[d]);
    // -(1/4pi) n x (n x P~)
    for (auto& c : t) c *= -pref;
    sums[d] = t;
  }
  return sums;
}

std::vector<Vec3c> far_amplitude(const Scatterer& s, const Field& E, const AngularGrid& quad) {
  return far_amplitude(s, E, quad.nodes);
}

double sigma_sc(const std::vector<Vec3c>& f, const AngularGrid& quad) {
  if (f.size() != quad.size()) throw DimensionError("amplitude count does not match the angular grid");
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    terms[i] = quad.weights[i] * (std::norm(f[i][0]) + std::norm(f[i][1]) + std::norm(f[i][2]));
  }
  return sum_pairwise(terms);
}

double sigma_abs(const Scatterer& s, const Field& E) {
  check_field(s, E);
  std::vector<double> terms(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double e2 = std::norm(E[3 * j]) + std::norm(E[3 * j + 1]) + std::norm(E[3 * j + 2]);
    terms[j] = -s.chi[j].imag() * e2 * s.weights[j];
  }
  return sum_pairwise(terms);
}

double sigma_ext(const Scatterer& s, const Field& E, const Field& Einc) {
  check_field(s, E);
  check_field(s, Einc);
  std::vector<double> terms(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    cplx p{0.0};
    for (std::size_t a = 0; a < 3; ++a) p += std::conj(Einc[3 * j + a]) * E[3 * j + a];
    terms[j] = -(s.chi[j] * p).imag() * s.weights[j];
  }
  return sum_pairwise(terms);
}

double optical_theorem_residual(double ext, double sc, double abs) {
  const double num = std::abs(ext - sc - abs);
  if (num == 0.0) return 0.0;
  return num / std::max(ext, 1e-290);
}

double eer(const Field& E, const Field& Einc) {
  if (E.size() != Einc.size()) throw DimensionError("eer: field lengths differ");
  const double d = norm2(Einc);
  if (d == 0.0) throw DomainError("eer: incident field has zero norm");
  const double n = norm2(E);
  return (n * n) / (d * d);
}

double eer(const Scatterer& s, const Field& E, const Field& Einc) {
  check_field(s, E);
  check_field(s, Einc);
  std::vector<double> num(s.size());
  std::vector<double> den(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    num[j] = s.weights[j] * (std::norm(E[3 * j]) + std::norm(E[3 * j + 1]) + std::norm(E[3 * j + 2]));
    den[j] = s.weights[j] * (std::norm(Einc[3 * j]) + std::norm(Einc[3 * j + 1]) + std::norm(Einc[3 * j + 2]));
  }
  const double d = sum_pairwise(den);
  if (d == 0.0) throw DomainError("eer: incident field has zero norm");
  return sum_pairwise(num) / d;
}

std::string CrossSectionReport::csv_header() { return "sigma_sc,sigma_abs,sigma_ext,got_residual,eer"; }

std::string CrossSectionReport::csv_row() const {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}", sigma_sc, sigma_abs, sigma_ext, got_residual, eer);
}

CrossSectionReport cross_sections(const Scatterer& s, const Field& E, const Field& Einc, const AngularGrid& quad) {
  CrossSectionReport r;
  r.sigma_sc = sigma_sc(far_amplitude(s, E, quad), quad);
  r.sigma_abs = sigma_abs(s, E);
  r.sigma_ext = sigma_ext(s, E, Einc);
  r.got_residual = optical_theorem_residual(r.sigma_ext, r.sigma_sc, r.sigma_abs);
  r.eer = eer(s, E, Einc);
  return r;
}

CrossSectionReport cross_sections(const VoxelGrid& grid, const Field& E, const Field& Einc) {
  return cross_sections(Scatterer::from_grid(grid), E, Einc, AngularGrid::default_for(circumscribed_radius(grid)));
}

double sigma_sc_operator(const DyadicOperator& G, const Field& E) {
  if (E.size() != G.dim()) throw DimensionError("field length does not match the operator");
  const auto& chi = G.grid().chi();
  Field P(E.size());
  for (std::size_t j = 0; j < chi.size(); ++j) {
    for (std::size_t a = 0; a < 3; ++a) P[3 * j + a] = chi[j] * E[3 * j + a];
  }
  return G.grid().cell_volume() * inner(G.apply(P), P).imag();
}

double farfield_quadratic_form(const VoxelGrid& grid, const Field& E, const AngularGrid& quad) {
  const Scatterer s = Scatterer::from_grid(grid);
  check_field(s, E);
  const auto sums = radiated(s, E, quad.nodes, false);
  std::vector<double> terms(sums.size());
  for (std::size_t d = 0; d < sums.size(); ++d) {
    const Vec3c t = transverse(quad.nodes[d], sums[d]);
    terms[d] = quad.weights[d] * (std::norm(t[0]) + std::norm(t[1]) + std::norm(t[2]));
  }
  return sum_pairwise(terms) / (16.0 * kPi * kPi);
}

}  // namespace bornscat
