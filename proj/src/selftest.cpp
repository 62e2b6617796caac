#include "bornscat/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bornscat/farfield.hpp"
#include "bornscat/solve.hpp"
#include "bornscat/specfun.hpp"

namespace bornscat {

namespace {

using namespace specfun;

// Si(x) by 24-point Gauss-Legendre on unit panels.
double sine_integral(double x) {
  std::vector<double> t, w;
  gauss_legendre(24, t, w);
  const int panels = std::max(1, static_cast<int>(std::ceil(x)));
  const double h = x / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double u = h * (p + 0.5 * (t[i] + 1.0));
      s += 0.5 * h * w[i] * std::sin(u) / u;
    }
  }
  return s;
}

CheckResult make(std::string name, double value, double tol) { return {std::move(name), value, tol, value <= tol}; }

std::vector<double> sample_args(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = std::exp(u(rng));
  return x;
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;

  const auto xs = sample_args(rng, 50, 0.05, 20.0);
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  for (double x : xs) {
    const int L = static_cast<int>(x) + 40;
    const auto j = spherical_j_array(L, x);
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (int l = 0; l <= L; ++l) {
      const double v = std::norm(j[static_cast<std::size_t>(l)]);
      s1 += (2 * l + 1) * v;
      s2 += v;
      s3 += (l % 2 ? -1.0 : 1.0) * (2 * l + 1) * v;
    }
    e1 = std::max(e1, std::abs(s1 - 1.0));
    e2 = std::max(e2, std::abs(s2 - sine_integral(2 * x) / (2 * x)));
    e3 = std::max(e3, std::abs(s3 - std::sin(2 * x) / (2 * x)));
  }
  out.push_back(make("sum rule (2L+1) j_L^2 = 1", e1, 1e-12));
  out.push_back(make("sum rule j_L^2 = Si(2x)/2x", e2, 1e-12));
  out.push_back(make("alternating sum rule", e3, 1e-12));

  double ws = 0.0, wc = 0.0;
  for (double x : sample_args(rng, 50, 0.1, 50.0)) {
    // j, J from the downward-stable arrays; y, Y from the Hankel arrays.
    const auto j = spherical_j_array(11, x);
    const auto h = spherical_h2_array(11, x);
    const auto J = cyl_J_array(11, x);
    const auto H = cyl_H2_array(11, x);
    for (std::size_t l = 1; l <= 10; ++l) {
      const double jl = j[l].real(), yl = -h[l].imag();
      const double dj = j[l - 1].real() - (l + 1.0) / x * jl;
      const double dy = -h[l - 1].imag() - (l + 1.0) / x * yl;
      ws = std::max(ws, std::abs((jl * dy - dj * yl) * x * x - 1.0));
      const double Jl = J[l].real(), Yl = -H[l].imag();
      const double dJ = J[l - 1].real() - (static_cast<double>(l) / x) * Jl;
      const double dY = -H[l - 1].imag() - (static_cast<double>(l) / x) * Yl;
      wc = std::max(wc, std::abs((Jl * dY - dJ * Yl) * kPi * x / 2.0 - 1.0));
    }
  }
  out.push_back(make("spherical Wronskian", ws, 1e-11));
  out.push_back(make("cylindrical Wronskian", wc, 1e-11));

  double er = 0.0;
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int t = 0; t < 50; ++t) {
    const cplx z{u(rng), u(rng)};
    for (int l : {0, 1, 4, 9}) {
      const cplx ref = spherical_j(l, z);
      const cplx via = entire_j_ratio(l, z * z) * std::pow(z, l);
      er = std::max(er, std::abs(via - ref) / std::max(std::abs(ref), 1e-300));
    }
  }
  out.push_back(make("entire ratio times z^l = j_l", er, 1e-10));

  {
    const VoxelGrid g = voxelize(ShapeSpec{Shape::box({6.0, 6.0, 6.0}, cplx{0.7, -0.2})}, 1.0);
    const DyadicOperator G(g);
    const Field x = random_field(G.dim(), seed);
    Field a, b;
    G.apply(x, a);
    G.apply_direct(x, b);
    Field d = a;
    axpy(-1.0, b, d);
    out.push_back(make("dense vs FFT matvec (6^3)", norm2(d) / norm2(b), 1e-12));
  }

  {
    const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(0.5, cplx{0.5, -0.5})}, 0.1);
    const DyadicOperator G(g);
    const Field Einc = incident_field(g, IncidentSpec::plane_wave({0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}));
    SolverSettings s;
    s.tol = 1e-10;
    const SolveReport r = krylov_solve(G, Einc, s);
    const CrossSectionReport cs = cross_sections(g, r.E, Einc);
    out.push_back(make("optical theorem residual (kR = 0.5)", cs.got_residual, 2e-2));
  }
  return out;
}

}  // namespace bornscat
