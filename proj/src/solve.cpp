#include "bornscat/solve.hpp"

#include <cmath>

#include "bornscat/bounds.hpp"
#include "bornscat/mie.hpp"

namespace bornscat {

IncidentSpec IncidentSpec::plane_wave(Vec3 direction, Vec3c polarization) {
  IncidentSpec s;
  s.kind = Kind::PlaneWave;
  s.direction = direction;
  s.polarization = polarization;
  return s;
}

Field incident_field(const VoxelGrid& grid, const IncidentSpec& inc) {
  const std::size_t n = grid.size();
  Field E(3 * n);
  switch (inc.kind) {
    case IncidentSpec::Kind::PlaneWave: {
      const double dn = norm(inc.direction);
      if (!(dn > 0.0)) throw DomainError("plane wave direction must be non-zero");
      const Vec3 u{inc.direction[0] / dn, inc.direction[1] / dn, inc.direction[2] / dn};
      // Keep only the transverse part of the polarization.
      const cplx un = u[0] * inc.polarization[0] + u[1] * inc.polarization[1] + u[2] * inc.polarization[2];
      Vec3c e;
      for (int a = 0; a < 3; ++a) e[static_cast<std::size_t>(a)] = inc.polarization[static_cast<std::size_t>(a)] - un * u[static_cast<std::size_t>(a)];
      for (std::size_t v = 0; v < n; ++v) {
        const cplx ph = std::exp(-kI * dot(u, grid.center(v)));
        for (std::size_t c = 0; c < 3; ++c) E[3 * v + c] = e[c] * ph;
      }
      break;
    }
    case IncidentSpec::Kind::Multipole: {
      for (std::size_t v = 0; v < n; ++v) {
        const Vec3c f = mie::vacuum_multipole(inc.ell, inc.m, inc.transverse_magnetic, grid.center(v));
        for (std::size_t c = 0; c < 3; ++c) E[3 * v + c] = f[c];
      }
      break;
    }
    case IncidentSpec::Kind::Raw:
      if (inc.raw.size() != 3 * n) throw DimensionError("raw incident field does not match the voxel grid");
      E = inc.raw;
      break;
  }
  return E;
}

double born_residual(const DyadicOperator& G, const Field& E, const Field& Einc) {
  Field r = apply_born(G, E);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Einc[i];
  const double b = norm2(Einc);
  return b > 0.0 ? norm2(r) / b : norm2(r);
}

namespace {

double max_abs_chi(const VoxelGrid& g) {
  double m = 0.0;
  for (const auto& c : g.chi()) m = std::max(m, std::abs(c));
  return m;
}

void check_length(const DyadicOperator& G, const Field& Einc) {
  if (Einc.size() != G.dim()) throw DimensionError("incident field does not match the voxel grid");
}

}  // namespace

SolveReport born_series(const DyadicOperator& G, const Field& Einc, int order, const SolverSettings& s, double g_norm) {
  check_length(G, Einc);
  if (order < 0) throw DomainError("Born series order must be non-negative");
  if (G.kind() != KernelKind::Full) throw DomainError("born_series needs the full Green operator");
  SolveReport rep;
  rep.method = "born_series";
  const double chi = max_abs_chi(G.grid());
  const double e0 = norm2(Einc);
  rep.E = Einc;
  if (chi == 0.0) {
    rep.certificate = 0.0;
    rep.residual = 0.0;
    return rep;
  }
  if (!(g_norm > 0.0)) g_norm = g_norm_estimate(G);
  const double q = chi * g_norm;
  if (q < 1.0) {
    rep.certificate = std::pow(q, std::max(order, 1)) * e0 / (1.0 - q);
  } else if (!s.force) {
    throw CertificateError("Born series not certified: |chi| ||G||_est = " + std::to_string(q) + " >= 1");
  } else {
    rep.forced = true;
  }
  const auto& chis = G.grid().chi();
  Field term = Einc;
  Field tmp;
  std::vector<double> inc_norms;
  for (int sdx = 1; sdx <= order; ++sdx) {
    G.apply(term, tmp);
    for (std::size_t v = 0; v < chis.size(); ++v) {
      for (std::size_t c = 0; c < 3; ++c) tmp[3 * v + c] *= chis[v];
    }
    term.swap(tmp);
    axpy(1.0, term, rep.E);
    ++rep.iterations;
    inc_norms.push_back(norm2(term));
    const std::size_t k = inc_norms.size();
    if (k >= 4 && inc_norms[k - 1] > inc_norms[k - 2] && inc_norms[k - 2] > inc_norms[k - 3] &&
        inc_norms[k - 3] > inc_norms[k - 4]) {
      throw DivergenceError("Born series diverges: increments grew over 3 consecutive orders (order " +
                            std::to_string(sdx) + ")");
    }
    if (!std::isfinite(inc_norms.back())) throw DivergenceError("Born series overflowed");
  }
  rep.residual = born_residual(G, rep.E, Einc);
  return rep;
}

SolveReport krylov_solve(const DyadicOperator& G, const Field& Einc, const SolverSettings& s) {
  check_length(G, Einc);
  if (!(s.tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (G.kind() != KernelKind::Full) throw DomainError("krylov_solve needs the full Green operator");
  const LinearMap A = [&G](const Field& x, Field& y) { apply_born(G, x, y); };
  GmresOptions opt;
  opt.tol = s.tol;
  opt.restart = s.restart;
  opt.max_iter = s.max_iter;
  GmresResult r = gmres(A, Einc, opt);
  if (!r.converged) {
    throw NoConvergenceError("GMRES did not reach tol " + std::to_string(s.tol) + " (residual " +
                                 std::to_string(r.residual) + " after " + std::to_string(r.iterations) + " iterations)",
                             std::move(r.x), r.residual);
  }
  SolveReport rep;
  rep.method = "krylov";
  rep.E = std::move(r.x);
  rep.iterations = r.iterations;
  rep.residual = r.residual;
  return rep;
}

SolveReport factorized_solve(const DyadicOperator& G, const Field& Einc, const SolverSettings& s) {
  check_length(G, Einc);
  if (G.kind() != KernelKind::Full) throw DomainError("factorized_solve needs the full Green operator");
  if (!G.grid().uniform_chi()) throw DomainError("factorized_solve needs a uniform susceptibility");
  const cplx chi = G.grid().chi().front();
  if (std::abs(chi + 2.0) < 1e-14) throw DomainError("factorized_solve: singular susceptibility chi = -2");
  SolveReport rep;
  rep.method = "factorized";
  if (chi == cplx{0.0}) {
    rep.E = Einc;
    return rep;
  }
  const cplx zeta = chi * chi / (chi + 2.0);
  Field t1;
  Field t2;
  const LinearMap A = [&](const Field& x, Field& y) {
    G.apply(x, t1);
    for (std::size_t i = 0; i < x.size(); ++i) t1[i] = x[i] + 2.0 * t1[i];
    G.apply(t1, t2);
    y.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - zeta * t2[i];
  };
  GmresOptions opt;
  opt.tol = s.tol;
  opt.restart = s.restart;
  opt.max_iter = s.max_iter;
  GmresResult r = gmres(A, Einc, opt);
  if (!r.converged) {
    throw NoConvergenceError("factorized GMRES did not reach tol (residual " + std::to_string(r.residual) + ")",
                             std::move(r.x), r.residual);
  }
  const Field GF = G.apply(r.x);
  rep.E = r.x;
  axpy(2.0 * chi / (chi + 2.0), GF, rep.E);
  rep.iterations = r.iterations;
  rep.residual = born_residual(G, rep.E, Einc);
  return rep;
}

SolveReport born_series(const ScatteringProblem& p, int order) {
  const DyadicOperator G(p.grid);
  return born_series(G, incident_field(p.grid, p.incident), order, p.settings);
}

SolveReport krylov_solve(const ScatteringProblem& p) {
  const DyadicOperator G(p.grid);
  return krylov_solve(G, incident_field(p.grid, p.incident), p.settings);
}

SolveReport factorized_solve(const ScatteringProblem& p) {
  const DyadicOperator G(p.grid);
  return factorized_solve(G, incident_field(p.grid, p.incident), p.settings);
}

namespace {

// dpsi/dtau = -i G psi
void rhs(const DyadicOperator& G, const Field& psi, Field& out) {
  G.apply(psi, out);
  for (auto& v : out) v *= -kI;
}

double choose_step(const DyadicOperator& G, double dtau, double& g_norm, bool& warn) {
  if (!(g_norm > 0.0)) g_norm = g_norm_estimate(G);
  if (!(dtau > 0.0)) dtau = 0.5 / g_norm;
  // RK4 is stable on the imaginary axis up to |z| = 2 sqrt 2.
  warn = dtau * g_norm > 2.5;
  return dtau;
}

}  // namespace

SemigroupTrajectory evolve_semigroup(const DyadicOperator& G, const Field& Einc, double tau_max, double dtau,
                                     int sample_every, bool keep_snapshots, double g_norm) {
  check_length(G, Einc);
  if (tau_max < 0.0) throw DomainError("tau_max must be non-negative");
  SemigroupTrajectory tr;
  dtau = choose_step(G, dtau, g_norm, tr.step_warning);
  tr.dtau = dtau;
  sample_every = std::max(1, sample_every);
  const std::size_t n = Einc.size();
  Field psi = Einc;
  Field k1(n), k2(n), k3(n), k4(n), tmp(n), Gpsi(n);
  auto record = [&](double tau) {
    G.apply(psi, Gpsi);
    tr.tau.push_back(tau);
    tr.norms.push_back(norm2(psi));
    tr.rates.push_back(-2.0 * inner(Gpsi, psi).imag());
    if (keep_snapshots) tr.snapshots.push_back(psi);
  };
  record(0.0);
  const int steps = static_cast<int>(std::ceil(tau_max / dtau - 1e-12));
  double tau = 0.0;
  const double base = norm2(Einc);
  for (int s = 0; s < steps; ++s) {
    const double h = std::min(dtau, tau_max - tau);
    const double before = norm2(psi);
    rhs(G, psi, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
    rhs(G, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
    rhs(G, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + h * k3[i];
    rhs(G, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tau += h;
    const double after = norm2(psi);
    if (!std::isfinite(after) || after > before + 1e-10 * base) {
      throw StepSizeError("semigroup norm increased at tau = " + std::to_string(tau) + "; reduce dtau");
    }
    if ((s + 1) % sample_every == 0 || s + 1 == steps) record(tau);
  }
  return tr;
}

ResolventResult resolvent_via_semigroup(const DyadicOperator& G, cplx chi, const Field& Einc, double tau_max,
                                        double dtau, double g_norm) {
  check_length(G, Einc);
  if (!(chi.imag() < 0.0)) throw DomainError("resolvent_via_semigroup needs Im chi < 0");
  if (!(tau_max > 0.0)) throw DomainError("tau_max must be positive");
  bool warn = false;
  dtau = choose_step(G, dtau, g_norm, warn);
  const std::size_t n = Einc.size();
  const cplx lam = 1.0 / chi;
  Field psi = Einc;
  Field acc(n, cplx{0.0});
  Field k1(n), k2(n), k3(n), k4(n), tmp(n);
  const int steps = static_cast<int>(std::ceil(tau_max / dtau - 1e-12));
  double tau = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double h = std::min(dtau, tau_max - tau);
    // Augmented RK4: psi' = -iG psi, I' = exp(i tau/chi) psi.
    const cplx w0 = std::exp(kI * tau * lam);
    const cplx wm = std::exp(kI * (tau + 0.5 * h) * lam);
    const cplx w1 = std::exp(kI * (tau + h) * lam);
    rhs(G, psi, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
    for (std::size_t i = 0; i < n; ++i) acc[i] += h / 6.0 * (w0 * psi[i] + 2.0 * wm * tmp[i]);
    rhs(G, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
    for (std::size_t i = 0; i < n; ++i) acc[i] += h / 6.0 * 2.0 * wm * tmp[i];
    rhs(G, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = psi[i] + h * k3[i];
    for (std::size_t i = 0; i < n; ++i) acc[i] += h / 6.0 * w1 * tmp[i];
    rhs(G, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tau += h;
  }
  ResolventResult res;
  res.E = std::move(acc);
  scale(1.0 / (kI * chi), res.E);
  res.truncation_estimate = std::exp(-tau_max * (-chi.imag()) / std::norm(chi));
  res.steps = steps;
  return res;
}

}  // namespace bornscat
