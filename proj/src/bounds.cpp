#include "bornscat/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bornscat/farfield.hpp"
#include "bornscat/specfun.hpp"

namespace bornscat {

GeometryFunctionals measure_geometry(const VoxelGrid& grid) {
  GeometryFunctionals g;
  g.kRV = circumscribed_radius(grid);
  g.krV = inscribed_radius(grid);
  g.k3V = volume(grid);
  return g;
}

BoundReport analytic_bounds(const GeometryFunctionals& geo) {
  if (geo.kRV < 0.0 || geo.krV < 0.0 || geo.k3V < 0.0) throw DomainError("geometry functionals must be non-negative");
  BoundReport r;
  r.geometry = geo;
  r.area_bound = 3.0 / (5.0 * kPi) * std::pow(geo.k3V, 2.0 / 3.0);
  r.circ_bound = 3.0 * std::sqrt(2.0) * geo.kRV;
  r.bessel_bound = 5.0 / 8.0 * geo.kRV;
  r.vol_bound = geo.k3V / (4.0 * kPi);
  r.gammaC_bound = std::min(r.area_bound, r.circ_bound);
  r.gammaS_bound = std::min({r.vol_bound, r.area_bound, r.bessel_bound});
  r.gamma_bound = r.gammaC_bound + r.gammaS_bound;
  r.g_upper = 1.0 + r.gamma_bound;
  r.g_lower = std::sqrt(2.0) / 3.0 * geo.krV;
  return r;
}

BoundReport analytic_bounds(const VoxelGrid& grid, std::size_t samples, std::uint64_t seed) {
  BoundReport r = analytic_bounds(measure_geometry(grid));
  if (samples > 0) {
    const HSEstimate hs = gamma_hilbert_schmidt(grid, samples, seed);
    r.gamma_HS = hs.value;
    r.gamma_HS_err = hs.err2sigma;
  }
  return r;
}

namespace {

// |k^2 g 1 + grad grad (g - g_0)|_F^2 at separation d (k = 1).
double gamma_kernel_frobenius2(const Vec3& d) {
  const double R = norm(d);
  const double x = R;
  const cplx e = std::exp(-kI * x);
  const double pref = 1.0 / (4.0 * kPi * R * R * R);
  // Coefficients of 1 and rr^T; the static part contributes -1 and +3.
  const cplx a = pref * (e * (x * x - kI * x - 1.0) + 1.0);
  const cplx b = pref * (e * (-x * x + 3.0 * kI * x + 3.0) - 3.0);
  // Eigenvalues: a + b along r, a (twice) across.
  return std::norm(a + b) + 2.0 * std::norm(a);
}

bool occupied_at(const VoxelGrid& g, const Vec3& p) {
  std::size_t b = 0;
  for (int a = 0; a < 3; ++a) {
    const int i = static_cast<int>(std::floor(p[static_cast<std::size_t>(a)] / g.kd())) - g.origin()[static_cast<std::size_t>(a)];
    if (i < 0 || i >= g.dims()[static_cast<std::size_t>(a)]) return false;
    b = b * static_cast<std::size_t>(g.dims()[static_cast<std::size_t>(a)]) + static_cast<std::size_t>(i);
  }
  return g.mask()[b] != 0;
}

}  // namespace

HSEstimate gamma_hilbert_schmidt(const VoxelGrid& grid, std::size_t samples, std::uint64_t seed) {
  HSEstimate out;
  if (samples == 0) return out;
  const double D = 2.0 * circumscribed_radius(grid);
  const double V = volume(grid);
  const double kd = grid.kd();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
  // Separation R is uniform on [0, D] (density 1/(4 pi D R^2) in 3D),
  // stratified into `strata` equal slabs; batches give the error bar.
  constexpr std::size_t strata = 64;
  const std::size_t batches = std::max<std::size_t>(20, std::min<std::size_t>(200, samples / (strata * 10) + 1));
  const std::size_t per_batch = std::max<std::size_t>(strata, samples / batches);
  std::vector<double> means;
  for (std::size_t bt = 0; bt < batches; ++bt) {
    double acc = 0.0;
    for (std::size_t s = 0; s < per_batch; ++s) {
      const Vec3 c = grid.center(pick(rng));
      const Vec3 r{c[0] + (U(rng) - 0.5) * kd, c[1] + (U(rng) - 0.5) * kd, c[2] + (U(rng) - 0.5) * kd};
      const double R = D * (static_cast<double>(s % strata) + U(rng)) / static_cast<double>(strata);
      const double ct = 2.0 * U(rng) - 1.0;
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      const double ph = 2.0 * kPi * U(rng);
      const Vec3 d{R * st * std::cos(ph), R * st * std::sin(ph), R * ct};
      const Vec3 rp{r[0] + d[0], r[1] + d[1], r[2] + d[2]};
      if (R <= 0.0 || !occupied_at(grid, rp)) continue;
      acc += gamma_kernel_frobenius2(d) * 4.0 * kPi * D * R * R;
    }
    means.push_back(V * acc / static_cast<double>(per_batch));
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(means.size() - 1);
  const double se = std::sqrt(var / static_cast<double>(means.size()));
  out.value = std::sqrt(std::max(mean, 0.0));
  // Propagate the error of the squared norm through the square root.
  out.err2sigma = out.value > 0.0 ? 2.0 * se / (2.0 * out.value) : 2.0 * std::sqrt(se);
  return out;
}

Solvability solvable_region(cplx chi, const BoundReport& rep, double gamma_norm) {
  Solvability s;
  const double g = gamma_norm >= 0.0 ? gamma_norm : rep.gamma_bound;
  const double ac = std::abs(chi);
  if (ac == 0.0) {
    s.certified = true;
    s.criterion = "neumann";
    s.inverse_norm = 1.0;
    return s;
  }
  if (chi.imag() < 0.0) {
    s.certified = true;
    s.criterion = "dissipative";
    s.inverse_norm = ac / std::abs(chi.imag());
    return s;
  }
  if (ac * rep.g_upper < 1.0) {
    s.certified = true;
    s.criterion = "neumann";
    s.inverse_norm = 1.0 / (1.0 - ac * rep.g_upper);
    return s;
  }
  const cplx lam = 1.0 / chi;
  if (g < std::abs(1.0 + lam) - 1.0) {
    s.certified = true;
    s.criterion = "gamma-disk";
    s.inverse_norm = 1.0 / (std::abs(1.0 + chi) - ac - ac * g);
    return s;
  }
  // Distance from -1/chi to the segment [0, 1].
  const cplx p = -lam;
  const double t = std::clamp(p.real(), 0.0, 1.0);
  const double dist = std::abs(p - cplx{t, 0.0});
  if (g < dist) {
    s.certified = true;
    s.criterion = "gamma-dist";
    s.inverse_norm = 1.0 / (ac * (dist - g));
    return s;
  }
  const double gs = std::min({rep.bessel_bound, rep.area_bound, rep.vol_bound});
  if (chi.imag() > 0.0 && ac * ac * gs < chi.imag()) {
    s.certified = true;
    s.criterion = "gs-disk";
    s.inverse_norm = (ac / chi.imag()) / (1.0 - ac * ac / chi.imag() * gs);
    return s;
  }
  const double gc = 1.0 + std::min(rep.area_bound, rep.circ_bound);
  if (std::abs(chi.real()) > 0.0 && ac * ac * gc < std::abs(chi.real())) {
    s.certified = true;
    s.criterion = "gc-disk";
    s.inverse_norm = (ac / std::abs(chi.real())) / (1.0 - ac * ac / std::abs(chi.real()) * gc);
    return s;
  }
  s.criterion = "none";
  return s;
}

LinearMap symmetric_adjoint(const LinearMap& A) {
  return [A](const Field& x, Field& y) {
    Field xc(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xc[i] = std::conj(x[i]);
    A(xc, y);
    for (auto& v : y) v = std::conj(v);
  };
}

double estimate_norm(const LinearMap& A, const LinearMap& Ah, std::size_t dim, int iterations, double rtol,
                     std::uint64_t seed) {
  if (dim == 0) return 0.0;
  Field x = random_field(dim, seed);
  scale(1.0 / norm2(x), x);
  Field y;
  Field z;
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    A(x, y);
    const double s_new = norm2(y);  // ||A x|| with ||x|| = 1
    Ah(y, z);
    const double zn = norm2(z);
    if (zn == 0.0) return s_new;
    x = z;
    scale(1.0 / zn, x);
    if (it > 0 && std::abs(s_new - sigma) <= rtol * s_new) {
      sigma = s_new;
      break;
    }
    sigma = s_new;
  }
  A(x, y);
  return std::max(sigma, norm2(y));
}

double g_norm_estimate(const DyadicOperator& G) {
  const BoundReport rep = analytic_bounds(G.grid(), 0);
  const LinearMap A = G.as_map();
  const double measured = estimate_norm(A, symmetric_adjoint(A), G.dim(), 200, 1e-8, 1);
  return std::max(rep.g_upper, measured);
}

RitzResult estimate_spectrum(const LinearMap& A, std::size_t dim, int m, std::uint64_t seed) {
  if (m < 1 || m > 300) throw DomainError("Arnoldi subspace dimension must be in [1, 300]");
  m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(m), dim));
  RitzResult out;
  std::vector<Field> V;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  Field v = random_field(dim, seed);
  scale(1.0 / norm2(v), v);
  V.push_back(v);
  int k = 0;
  Field w;
  for (; k < m; ++k) {
    A(V[static_cast<std::size_t>(k)], w);
    for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
      for (int i = 0; i <= k; ++i) {
        const cplx h = inner(V[static_cast<std::size_t>(i)], w);
        H(i, k) += h;
        axpy(-h, V[static_cast<std::size_t>(i)], w);
      }
    }
    const double hn = norm2(w);
    H(k + 1, k) = hn;
    if (hn < 1e-12 * std::max(1.0, H.col(k).norm())) {
      out.breakdown = true;
      ++k;
      break;
    }
    scale(1.0 / hn, w);
    V.push_back(w);
  }
  out.subspace = k;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(k, k));
  const double beta = std::abs(H(k, k - 1));
  for (int i = 0; i < k; ++i) {
    out.values.push_back(es.eigenvalues()(i));
    out.residuals.push_back(beta * std::abs(es.eigenvectors()(k - 1, i)));
  }
  return out;
}

GammaSCheck gammaS_positivity_check(const DyadicOperator& G, int trials, std::uint64_t seed) {
  if (G.kind() != KernelKind::Full) throw DomainError("gammaS_positivity_check needs the full Green operator");
  GammaSCheck out;
  out.trials = trials;
  out.min_quadratic_form = std::numeric_limits<double>::infinity();
  const VoxelGrid& g = G.grid();
  const AngularGrid quad = AngularGrid::default_for(circumscribed_radius(g));
  const double w = g.cell_volume();
  for (int t = 0; t < trials; ++t) {
    const Field E = random_field(G.dim(), seed + static_cast<std::uint64_t>(t));
    const Field GE = G.apply(E);
    const double op = w * inner(GE, E).imag();
    const double ff = farfield_quadratic_form(g, E, quad);
    out.operator_route.push_back(op);
    out.farfield_route.push_back(ff);
    out.min_quadratic_form = std::min(out.min_quadratic_form, op / (w * std::pow(norm2(E), 2)));
    const double denom = std::max(std::abs(op), std::abs(ff));
    if (denom > 0.0) out.max_route_mismatch = std::max(out.max_route_mismatch, std::abs(op - ff) / denom);
  }
  if (trials == 0) out.min_quadratic_form = 0.0;
  return out;
}

double witness_norm_closed_form(double x) {
  if (!(x > 0.0)) throw DomainError("witness norm needs kR > 0");
  const double x2 = x * x;
  const double x4 = x2 * x2;
  const double num = -1.0 - 3.0 * x2 + 6.0 * x4 + (1.0 + x2 - 2.0 * x4) * std::cos(2.0 * x) +
                     x * (2.0 + 3.0 * x2) * std::sin(2.0 * x);
  return 2.0 * x2 / 9.0 + num / (12.0 * x4);
}

double witness_norm_quadrature(double R, int nodes) {
  if (!(R > 0.0)) throw DomainError("witness norm needs kR > 0");
  // phi(r) = P(r) a(r) + Q(r) b(r) is the potential C E / e_z written with the
  // monopole Green function sin(k r<) exp(-ik r>)/(k r r'); the field is
  // curl curl (e_z phi) = A cos(theta) r^ + B e_z.
  std::vector<double> xs;
  std::vector<double> ws;
  specfun::gauss_legendre(nodes, xs, ws);
  const cplx c = 1.0 / (kI * std::sqrt(4.0 * kPi * R));
  auto f_sin = [&](double rp) { return c * std::exp(kI * rp) * std::sin(rp); };  // r' f(r') sin(r')
  auto f_exp = [&](double) { return c; };  // r' f(r') exp(-i r')
  auto integrate = [&](double lo, double hi, auto&& fn) {
    cplx s{0.0};
    for (int i = 0; i < nodes; ++i) {
      const double t = 0.5 * (hi - lo) * xs[static_cast<std::size_t>(i)] + 0.5 * (hi + lo);
      s += ws[static_cast<std::size_t>(i)] * fn(t);
    }
    return 0.5 * (hi - lo) * s;
  };
  double total = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double r = 0.5 * R * (xs[static_cast<std::size_t>(i)] + 1.0);
    const cplx a = integrate(0.0, r, f_sin);
    const cplx b = integrate(r, R, f_exp);
    const cplx e = std::exp(-kI * r);
    const cplx P1 = e * (-kI / r - 1.0 / (r * r));
    const cplx P2 = e * (-1.0 / r + 2.0 * kI / (r * r) + 2.0 / (r * r * r));
    const double s = std::sin(r);
    const double co = std::cos(r);
    const double Q1 = co / r - s / (r * r);
    const double Q2 = -s / r - 2.0 * co / (r * r) + 2.0 * s / (r * r * r);
    const cplx rf = c * std::exp(kI * r);  // r f(r)
    const cplx d1 = P1 * a + Q1 * b;
    const cplx d2 = P2 * a + Q2 * b + rf * (P1 * s - Q1 * e);
    const cplx A = d2 - d1 / r;
    const cplx B = -d2 - d1 / r;
    const double integrand = r * r * ((std::norm(A) + 2.0 * (A * std::conj(B)).real()) / 3.0 + std::norm(B));
    total += ws[static_cast<std::size_t>(i)] * integrand;
  }
  return 4.0 * kPi * 0.5 * R * total;
}

}  // namespace bornscat
