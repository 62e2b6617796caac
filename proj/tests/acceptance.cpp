// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bornscat/bounds.hpp"
#include "bornscat/farfield.hpp"
#include "bornscat/mie.hpp"
#include "bornscat/resonance.hpp"
#include "bornscat/selftest.hpp"
#include "bornscat/solve.hpp"
#include "bornscat/specfun.hpp"

using namespace bornscat;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt_e(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Field plane_x(const VoxelGrid& g) {
  return incident_field(g, IncidentSpec::plane_wave({0, 0, 1}, {cplx{1.0}, cplx{0.0}, cplx{0.0}}));
}

double rel_dist(const Field& a, const Field& b) {
  Field d = a;
  axpy(-1.0, b, d);
  return norm2(d) / norm2(b);
}

VoxelGrid ball(double kR, cplx chi, double div) { return voxelize(ShapeSpec{Shape::sphere(kR, chi)}, kR / div); }

LinearMap shifted(const DyadicOperator& G, double shift) {
  return [&G, shift](const Field& x, Field& y) {
    G.apply(x, y);
    axpy(shift, x, y);
  };
}

double op_norm(const LinearMap& A, std::size_t dim) {
  return estimate_norm(A, symmetric_adjoint(A), dim, 300, 1e-9);
}

Outcome c1_special_functions() {
  Outcome o;
  double sums = 0.0, wr = 0.0;
  for (const auto& c : run_selftest()) {
    if (c.name.rfind("sum rule", 0) == 0 || c.name == "alternating sum rule") sums = std::max(sums, c.value);
    if (c.name.find("Wronskian") != std::string::npos) wr = std::max(wr, c.value);
  }
  o.require(sums <= 1e-11, "sum rules " + fmt_e(sums));
  o.require(wr <= 1e-11, "Wronskians " + fmt_e(wr));

  using boost::math::quadrature::gauss_kronrod;
  double lom = 0.0;
  for (int l : {0, 1, 3, 8, 15, 30}) {
    for (double x : {0.2, 1.0, 4.0, 11.0, 25.0}) {
      const double q = gauss_kronrod<double, 61>::integrate(
          [&](double t) { return std::norm(specfun::spherical_j(l, t)) * t * t; }, 0.0, x, 15, 1e-14);
      lom = std::max(lom, std::abs(specfun::lommel_integral(l, x) - q) / std::max(q, 1e-300));
    }
  }
  o.require(lom <= 1e-10, "Lommel vs quadrature " + fmt_e(lom));

  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> L(0, 100);
  std::uniform_real_distribution<double> X(std::log(1e-3), std::log(100.0));
  int viol = 0;
  for (int t = 0; t < 10000; ++t) {
    const int l = L(rng);
    const double x = std::exp(X(rng));
    const double b = std::min({x * x * x / 3, x * x / 2, 5 * x / 8});
    if (specfun::lommel_integral(l, x) > b * (1 + 1e-12)) ++viol;
  }
  o.require(viol == 0, "Bessel bound violations " + std::to_string(viol) + "/10000");
  return o;
}

Outcome c2_operator() {
  Outcome o;
  double worst = 0.0, rt = 0.0;
  bool symmetric = true;
  for (unsigned seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VoxelGrid g = voxelize(ShapeSpec{Shape::box({6, 6, 6}, 0.0)}, 1.0 / (0.5 + 0.3 * seed));
    std::vector<cplx> chi(g.size());
    for (auto& c : chi) c = {u(rng), -std::abs(u(rng))};
    g = g.with_chi(chi);
    const DyadicOperator G(g);
    const Eigen::MatrixXcd M = G.dense();
    symmetric = symmetric && (M - M.transpose()).cwiseAbs().maxCoeff() == 0.0;
    const Field x = random_field(G.dim(), 100 + seed);
    const Eigen::VectorXcd y = M * Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(x.size()));
    worst = std::max(worst, rel_dist(G.apply(x), Field(y.data(), y.data() + y.size())));
    // per-voxel chi enters through the Born operator
    Field bx = apply_born(G, x);
    Field ref = x;
    for (std::size_t i = 0; i < x.size(); ++i) ref[i] -= chi[i / 3] * y[static_cast<Eigen::Index>(i)];
    worst = std::max(worst, rel_dist(bx, ref));
    rt = std::max(rt, G.roundtrip_error());
  }
  o.require(worst <= 1e-12, "dense vs FFT " + fmt_e(worst));
  o.require(symmetric, "transpose identity exact");
  o.require(rt <= 1e-12, "round trip " + fmt_e(rt));
  return o;
}

Outcome c3_static_spectrum() {
  Outcome o;
  const VoxelGrid g = ball(1.0, 0.0, 12);
  const DyadicOperator S(g, KernelKind::Static);
  // gradients of r^l Y_l0: z, 2z^2 - x^2 - y^2, 2z^3 - 3z(x^2 + y^2)
  const std::vector<std::function<Vec3(const Vec3&)>> grads{
      [](const Vec3&) { return Vec3{0, 0, 1}; },
      [](const Vec3& c) { return Vec3{-2 * c[0], -2 * c[1], 4 * c[2]}; },
      [](const Vec3& c) {
        return Vec3{-6 * c[0] * c[2], -6 * c[1] * c[2], 6 * c[2] * c[2] - 3 * (c[0] * c[0] + c[1] * c[1])};
      }};
  for (int l = 1; l <= 3; ++l) {
    Field E(S.dim());
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 v = grads[static_cast<std::size_t>(l - 1)](g.center(n));
      for (std::size_t k = 0; k < 3; ++k) E[3 * n + k] = v[k];
    }
    const double q = inner(E, apply_static_dipole(S, E)).real() / inner(E, E).real();
    const double expect = l / (2.0 * l + 1.0);
    const double err = std::abs(q / expect - 1.0);
    o.require(err <= 0.05, "l=" + std::to_string(l) + " quotient " + std::to_string(q) + " rel " + fmt_e(err));
  }
  return o;
}

struct SphereRun {
  VoxelGrid grid;
  Field Einc, E;
  CrossSectionReport cs;
};

SphereRun solve_demo(double div) {
  SphereRun r;
  r.grid = ball(1.0, cplx(0.5, -0.5), div);
  const DyadicOperator G(r.grid);
  r.Einc = plane_x(r.grid);
  SolverSettings s;
  s.tol = 1e-8;
  r.E = krylov_solve(G, r.Einc, s).E;
  r.cs = cross_sections(r.grid, r.E, r.Einc);
  return r;
}

Outcome c4_optical_theorem(const SphereRun& coarse) {
  Outcome o;
  const SphereRun fine = solve_demo(24);
  o.require(coarse.cs.got_residual <= 0.02, "got_residual R/12 " + fmt_e(coarse.cs.got_residual));
  o.require(fine.cs.got_residual < coarse.cs.got_residual, "R/24 " + fmt_e(fine.cs.got_residual) + " smaller");
  const bool signs = coarse.cs.sigma_abs >= 0 && coarse.cs.sigma_sc >= 0 && fine.cs.sigma_abs >= 0 && fine.cs.sigma_sc >= 0;
  o.require(signs, "sigma_sc, sigma_abs >= 0");
  return o;
}

double mie_rms(const SphereRun& r, const mie::MultipoleCoefficients& c) {
  std::vector<Vec3> pts;
  for (std::size_t n = 0; n < r.grid.size(); ++n) pts.push_back(r.grid.center(n));
  const Field Em = mie::mie_internal_field(1.0, cplx(0.5, -0.5), c, pts);
  return rel_dist(r.E, Em);
}

Outcome c5_mie(const SphereRun& coarse) {
  Outcome o;
  const cplx chi{0.5, -0.5};
  const auto c = mie::plane_wave_coefficients(mie::default_lmax(1.0), {cplx{1.0}, cplx{0.0}, cplx{0.0}}, 1.0);
  const double r12 = mie_rms(coarse, c);
  const double r16 = mie_rms(solve_demo(16), c);
  o.require(r12 <= 0.05, "RMS R/12 " + fmt_e(r12));
  o.require(r16 <= 0.03, "RMS R/16 " + fmt_e(r16));
  const Scatterer q = mie::ball_quadrature(1.0, chi, 24, 24, 48);
  const Field Em = mie::mie_internal_field(1.0, chi, c, q.points);
  Field Ei(Em.size());
  for (std::size_t p = 0; p < q.size(); ++p) Ei[3 * p] = std::exp(-kI * q.points[p][2]);
  const double got = cross_sections(q, Em, Ei, AngularGrid::default_for(1.0)).got_residual;
  o.require(got <= 1e-6, "Mie-fed got_residual " + fmt_e(got));
  return o;
}

Outcome c6_dissipative() {
  Outcome o;
  const cplx chi{0.0, -1.0};
  const VoxelGrid g = ball(1.0, chi, 8);
  const DyadicOperator G(g);
  double worst_bound = 0.0, worst_coer = 1e9;
  for (unsigned t = 0; t < 20; ++t) {
    const Field Einc = random_field(G.dim(), 500 + t);
    SolverSettings s;
    s.tol = 1e-10;
    const Field E = krylov_solve(G, Einc, s).E;
    worst_bound = std::max(worst_bound, norm2(E) / (std::abs(chi) / 1.0 * norm2(Einc)));
    worst_coer = std::min(worst_coer, norm2(apply_born(G, E)) / (1.0 / std::abs(chi) * norm2(E)));
  }
  o.require(worst_bound <= 1 + 1e-6, "max ||E||/bound " + std::to_string(worst_bound));
  o.require(worst_coer >= 1 - 1e-6, "min ||BE||/bound " + std::to_string(worst_coer));
  return o;
}

Outcome c7_born_certificate() {
  Outcome o;
  VoxelGrid g = ball(1.0, 0.0, 8);
  const DyadicOperator G0(g);
  const double gest = g_norm_estimate(G0);
  const double gup = analytic_bounds(g, 0).g_upper;
  const cplx chi = std::polar(0.5 / std::max(gest, gup), -0.7);
  g = g.with_chi(chi);
  const DyadicOperator G(g);
  const Field Einc = plane_x(g);
  SolverSettings s;
  s.tol = 1e-13;
  const Field ref = krylov_solve(G, Einc, s).E;
  double worst = 0.0;
  for (int m = 1; m <= 5; ++m) {
    const SolveReport r = born_series(G, Einc, m, {}, gest);
    Field d = r.E;
    axpy(-1.0, ref, d);
    worst = std::max(worst, norm2(d) / r.certificate.value());
  }
  o.require(std::abs(chi) * gup <= 0.5 + 1e-12, "|chi| g_upper = " + std::to_string(std::abs(chi) * gup));
  o.require(worst <= 1.0, "max error/certificate " + std::to_string(worst));
  return o;
}

Outcome c8_resonances() {
  Outcome o;
  const auto tm = resonance::find_roots(resonance::Family::TM, 1, 40, 0.5);
  double res = 0.0, near_m1 = 1e9, min_im = 1e9;
  for (const auto& m : tm) {
    if (m.index > 20) continue;
    res = std::max(res, m.residual);
    near_m1 = std::min(near_m1, std::abs(m.chi + 1.0));
    min_im = std::min(min_im, m.chi.imag());
  }
  o.require(res <= 1e-10, "max residual " + fmt_e(res));
  o.require(near_m1 > 1e-6, "min |chi+1| " + fmt_e(near_m1));
  o.require(min_im >= -1e-8, "min Im chi " + fmt_e(min_im));
  const int tm_half = resonance::cluster_statistics(tm, 0.05).near_half;
  o.require(tm_half >= 5, "TM near -1/2: " + std::to_string(tm_half));
  const auto te = resonance::find_roots(resonance::Family::TE, 1, 40, 0.5);
  const int te_half = resonance::cluster_statistics(te, 0.05).near_half;
  o.require(te_half == 0, "TE near -1/2: " + std::to_string(te_half));
  return o;
}

Outcome c9_asymptotics() {
  Outcome o;
  const double kR = 0.5;
  const double a2 = resonance::amplification_A(200, -2.0, kR) / (401 * kR);
  o.require(a2 >= 0.95 && a2 <= 1.05, "A(-2)/(401 kR) " + std::to_string(a2));
  const double a1 = resonance::amplification_A(200, -1.0, kR) / (2 * kR / 1.0);
  o.require(std::abs(a1 - 1) <= 0.05, "A(-1)/(2kR) " + std::to_string(a1));
  const double ai = resonance::amplification_A(200, cplx(0, -1), kR) / (2 * kR / std::abs(cplx(2, -1)));
  o.require(std::abs(ai - 1) <= 0.05, "A(-i)/(2kR/|2-i|) " + std::to_string(ai));
  const auto r = resonance::find_roots(resonance::Family::TM, 30, kR);
  double d = 1e9;
  for (const auto& m : r) d = std::min(d, std::abs(m.chi - resonance::asymptotic_root_TM(30, kR)));
  o.require(d <= 3.0 / (30.0 * 30.0), "l=30 root offset " + fmt_e(d));
  return o;
}

Outcome c10_norms() {
  Outcome o;
  for (double kR : {0.5, 1.0, 2.0}) {
    const VoxelGrid g = ball(kR, 0.0, 12);
    const DyadicOperator G(g), S(g, KernelKind::Static), GS(g, KernelKind::GammaS);
    const BoundReport rep = analytic_bounds(g, 0);
    const std::string tag = "kR=" + std::to_string(kR).substr(0, 3);
    const double nD = op_norm(shifted(S, 1.0), S.dim());
    o.require(nD <= 1.05, tag + " ||D|| " + std::to_string(nD));
    const double nGS = op_norm(GS.as_map(), GS.dim());
    o.require(nGS <= 1.05 * rep.gammaS_bound, tag + " ||gS||/bound " + std::to_string(nGS / rep.gammaS_bound));
    const double nDg = op_norm(shifted(G, 1.0), G.dim());
    const double lower = 0.95 * std::sqrt(2.0) / 3.0 * kR;
    o.require(nDg >= lower, tag + " ||D+g|| " + std::to_string(nDg));
  }
  double w = 0.0;
  for (double kR : {0.5, 1.0, 2.0, 5.0, 20.0}) {
    w = std::max(w, std::abs(witness_norm_closed_form(kR) / witness_norm_quadrature(kR, 2000) - 1));
  }
  o.require(w <= 1e-6, "closed form vs quadrature " + fmt_e(w));
  return o;
}

Outcome c11_semigroup() {
  Outcome o;
  const VoxelGrid g0 = ball(1.0, 0.0, 8);
  const DyadicOperator G0(g0);
  const Field Einc = plane_x(g0);
  const SemigroupTrajectory t = evolve_semigroup(G0, Einc, 50.0);
  double worst = 0.0;
  for (std::size_t i = 1; i < t.norms.size(); ++i) worst = std::max(worst, t.norms[i] - t.norms[i - 1]);
  o.require(worst <= 1e-10 * norm2(Einc), "max norm increase " + fmt_e(worst));

  const cplx chi{0.0, -1.0};
  const VoxelGrid g = g0.with_chi(chi);
  const DyadicOperator G(g);
  SolverSettings s;
  s.tol = 1e-10;
  s.restart = 300;
  const Field ref = krylov_solve(G, Einc, s).E;
  const ResolventResult irs = resolvent_via_semigroup(G, chi, Einc, 60.0, 0.1);
  const double e_irs = rel_dist(irs.E, ref);
  o.require(e_irs <= 1e-4, "resolvent via semigroup " + fmt_e(e_irs));

  double e_fac = 0.0;
  s.max_iter = 4000;
  for (cplx c : {cplx(0.5, -0.5), cplx(-1.0, 0.0)}) {
    const VoxelGrid gc = g0.with_chi(c);
    const DyadicOperator Gc(gc);
    e_fac = std::max(e_fac, rel_dist(factorized_solve(Gc, Einc, s).E, krylov_solve(Gc, Einc, s).E));
  }
  o.require(e_fac <= 1e-6, "factorized vs krylov " + fmt_e(e_fac));
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](const char* id, const char* title, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
  };

  run("C1", "special functions", c1_special_functions);
  run("C2", "operator", c2_operator);
  run("C3", "electrostatic spectrum", c3_static_spectrum);
  SphereRun coarse;
  bool have_coarse = false;
  auto demo = [&]() -> const SphereRun& {
    if (!have_coarse) {
      coarse = solve_demo(12);
      have_coarse = true;
    }
    return coarse;
  };
  run("C4", "optical theorem", [&] { return c4_optical_theorem(demo()); });
  run("C5", "Mie cross-validation", [&] { return c5_mie(demo()); });
  run("C6", "dissipative bounds", c6_dissipative);
  run("C7", "Born certificate", c7_born_certificate);
  run("C8", "resonance structure", c8_resonances);
  run("C9", "asymptotics", c9_asymptotics);
  run("C10", "analytic vs numeric norms", c10_norms);
  run("C11", "semigroup", c11_semigroup);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures ? 1 : 0;
}
