// bornscat command-line front end.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <optional>
#include <string>

#include "bornscat/bounds.hpp"
#include "bornscat/config.hpp"
#include "bornscat/farfield.hpp"
#include "bornscat/io.hpp"
#include "bornscat/mie.hpp"
#include "bornscat/resonance.hpp"
#include "bornscat/selftest.hpp"
#include "bornscat/solve.hpp"

namespace fs = std::filesystem;
using namespace bornscat;

namespace {

struct Globals {
  std::string config;
  std::string out = ".";
  int threads = 0;
  std::uint64_t seed = 7;
  bool force = false;
};

// Collects hard-assertion failures; any failure turns into exit code 1.
struct Status {
  int failures = 0;
  void check(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      fmt::print(stderr, "assertion failed: {}\n", what);
    }
  }
};

RunConfig load(const Globals& g) { return g.config.empty() ? RunConfig{} : load_config(g.config); }

std::ofstream open_out(const Globals& g, const std::string& name) {
  const fs::path p = fs::path(g.out) / name;
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

void write_text(const Globals& g, const std::string& name, const std::string& text) {
  auto f = open_out(g, name);
  f << text;
  if (!f) throw Error("failed writing " + name);
}

bool passive(const VoxelGrid& grid) {
  for (const cplx& c : grid.chi()) {
    if (c.imag() > 0.0) return false;
  }
  return true;
}

cplx uniform_chi(const VoxelGrid& grid) {
  if (!grid.uniform_chi()) throw DomainError("this method needs a uniform susceptibility");
  return grid.chi().front();
}

SolveReport run_method(const RunConfig& cfg, const DyadicOperator& G, const Field& Einc, bool force) {
  const SolverSettings s = solver_settings(cfg.solver, force);
  const std::string& m = cfg.solver.method;
  if (m == "krylov") return krylov_solve(G, Einc, s);
  if (m == "factorized") return factorized_solve(G, Einc, s);
  if (m == "born") return born_series(G, Einc, cfg.solver.order, s);
  // semigroup: resolvent reconstruction from the evolution
  const cplx chi = uniform_chi(G.grid());
  const ResolventResult r = resolvent_via_semigroup(G, chi, Einc, cfg.solver.tau_max, cfg.solver.dtau);
  if (r.truncation_estimate > cfg.solver.tol) {
    fmt::print(stderr, "warning: tau_max truncation estimate {:.2e} exceeds tol\n", r.truncation_estimate);
  }
  SolveReport rep;
  rep.E = r.E;
  rep.iterations = r.steps;
  rep.residual = born_residual(G, rep.E, Einc);
  rep.method = "semigroup";
  return rep;
}

int cmd_solve(const Globals& g) {
  const RunConfig cfg = load(g);
  Status st;
  const VoxelGrid grid = build_grid(cfg.shape);
  const DyadicOperator G(grid);
  const Field Einc = incident_field(grid, incident_spec(cfg.incident));
  const SolveReport rep = run_method(cfg, G, Einc, g.force);
  fmt::print("method {} voxels {} kd {:.6g} iterations {} residual {:.3e}{}\n", rep.method, grid.size(), grid.kd(),
             rep.iterations, rep.residual, rep.forced ? " (forced)" : "");
  if (rep.certificate) fmt::print("certificate {:.6e}\n", *rep.certificate);
  if (cfg.solver.method == "krylov" || cfg.solver.method == "factorized") {
    st.check(rep.residual <= std::max(10.0 * cfg.solver.tol, 1e-12), "solver residual");
  }

  write_text(g, "config.yaml", emit_config(cfg));
  if (cfg.outputs.field) write_field((fs::path(g.out) / "field.bin").string(), grid, rep.E);
  if (cfg.outputs.cross_sections) {
    const CrossSectionReport cs = cross_sections(grid, rep.E, Einc);
    write_text(g, "cross_sections.csv", CrossSectionReport::csv_header() + "\n" + cs.csv_row() + "\n");
    fmt::print("sigma_sc {:.8e} sigma_abs {:.8e} sigma_ext {:.8e} got_residual {:.3e} eer {:.6f}\n", cs.sigma_sc,
               cs.sigma_abs, cs.sigma_ext, cs.got_residual, cs.eer);
    st.check(cs.sigma_sc >= 0.0, "sigma_sc >= 0");
    if (passive(grid)) st.check(cs.sigma_abs >= -1e-14 * std::max(1.0, cs.sigma_ext), "sigma_abs >= 0");
  }
  if (cfg.outputs.trajectory) {
    const int every = std::max(1, cfg.solver.snapshot_every);
    const SemigroupTrajectory tr =
        evolve_semigroup(G, Einc, cfg.solver.tau_max, cfg.solver.dtau, every, cfg.solver.snapshot_every > 0);
    auto f = open_out(g, "trajectory.csv");
    write_trajectory_csv(f, tr);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
      write_field((fs::path(g.out) / fmt::format("snapshot_{:04d}.bin", i)).string(), grid, tr.snapshots[i]);
    }
    if (tr.step_warning) fmt::print(stderr, "warning: dtau is large for the estimated operator norm\n");
  }
  return st.failures ? 1 : 0;
}

const Shape& single_sphere(const RunConfig& cfg) {
  const auto& m = cfg.shape.members;
  if (m.size() != 1 || m[0].kind != Shape::Kind::Sphere) throw DomainError("mie needs a single sphere");
  for (double c : m[0].center) {
    if (c != 0.0) throw DomainError("mie needs the sphere centered at the origin");
  }
  return m[0];
}

int cmd_mie(const Globals& g, bool compare_flag) {
  const RunConfig cfg = load(g);
  Status st;
  single_sphere(cfg);
  const ShapeSpec spec = shape_spec(cfg.shape);
  const double kR = spec.members[0].radius;
  const cplx chi = spec.members[0].chi;
  if (cfg.incident.type != "plane_wave") throw DomainError("mie needs a plane-wave incidence");
  const Vec3& d = cfg.incident.direction;
  if (d[0] != 0.0 || d[1] != 0.0 || !(d[2] > 0.0)) throw DomainError("mie needs incidence along +z");
  const int lmax = cfg.mie.lmax > 0 ? cfg.mie.lmax : mie::default_lmax(kR);
  const auto coeffs = mie::plane_wave_coefficients(lmax, cfg.incident.polarization);
  if (coeffs.truncation_warning) fmt::print(stderr, "warning: multipole truncation residual {:.2e}\n", coeffs.residual);

  {
    auto f = open_out(g, "mie_coefficients.csv");
    f << "ell,m,re_a,im_a,re_b,im_b\n";
    for (int l = 1; l <= lmax; ++l) {
      for (int m = -l; m <= l; ++m) {
        const cplx a = coeffs.a_at(l, m), b = coeffs.b_at(l, m);
        f << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", l, m, a.real(), a.imag(), b.real(), b.imag());
      }
    }
  }

  // Cross sections from a continuum quadrature of the Mie field.
  const int nt = std::max(24, lmax + 8);
  const Scatterer ball = mie::ball_quadrature(kR, chi, std::max(24, static_cast<int>(2 * kR) + 16), nt, 2 * nt);
  const Field Em = mie::mie_internal_field(kR, chi, coeffs, ball.points);
  Field Ei(Em.size());
  IncidentSpec inc = incident_spec(cfg.incident);
  for (std::size_t p = 0; p < ball.size(); ++p) {
    const cplx ph = std::exp(-kI * ball.points[p][2]);
    for (int c = 0; c < 3; ++c) Ei[3 * p + static_cast<std::size_t>(c)] = inc.polarization[static_cast<std::size_t>(c)] * ph;
  }
  const CrossSectionReport cs = cross_sections(ball, Em, Ei, AngularGrid::default_for(kR));
  write_text(g, "mie_cross_sections.csv", CrossSectionReport::csv_header() + "\n" + cs.csv_row() + "\n");
  fmt::print("lmax {} sigma_sc {:.10e} sigma_abs {:.10e} sigma_ext {:.10e} got_residual {:.3e}\n", lmax, cs.sigma_sc,
             cs.sigma_abs, cs.sigma_ext, cs.got_residual);
  st.check(cs.got_residual <= 1e-6, "Mie optical-theorem residual <= 1e-6");

  // Mie field on the voxel centers of the configured grid.
  const VoxelGrid grid = build_grid(cfg.shape);
  std::vector<Vec3> pts;
  for (std::size_t n = 0; n < grid.size(); ++n) pts.push_back(grid.center(n));
  const Field Eg = mie::mie_internal_field(kR, chi, coeffs, pts);
  if (cfg.outputs.field) write_field((fs::path(g.out) / "mie_field.bin").string(), grid, Eg);

  if (compare_flag || cfg.mie.compare) {
    const DyadicOperator G(grid);
    const Field Einc = incident_field(grid, inc);
    const SolveReport rep = run_method(cfg, G, Einc, g.force);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < Eg.size(); ++i) {
      num += std::norm(rep.E[i] - Eg[i]);
      den += std::norm(Eg[i]);
    }
    const double rms = std::sqrt(num / den);
    write_text(g, "compare.csv", fmt::format("kd,voxels,rms\n{:.17g},{},{:.17g}\n", grid.kd(), grid.size(), rms));
    fmt::print("DDA vs Mie: voxels {} kd {:.6g} relative RMS {:.4e}\n", grid.size(), grid.kd(), rms);
  }
  return st.failures ? 1 : 0;
}

int cmd_resonances(const Globals& g, const std::optional<std::string>& family, std::optional<double> kR,
                   std::optional<int> lo, std::optional<int> hi) {
  RunConfig cfg = load(g);
  auto& rc = cfg.resonances;
  if (family) rc.family = *family;
  if (kR) rc.kR = *kR;
  if (lo) rc.index_min = *lo;
  if (hi) rc.index_max = *hi;
  resonance::RootSearch s;
  s.re_min = rc.window[0];
  s.re_max = rc.window[1];
  s.im_min = rc.window[2];
  s.im_max = rc.window[3];
  s.nx = rc.grid[0];
  s.ny = rc.grid[1];
  s.exclude = rc.exclude;
  const auto fam = resonance::parse_family(rc.family);
  const auto modes = resonance::find_roots(fam, rc.index_min, rc.index_max, rc.kR, s);
  auto f = open_out(g, "resonances.csv");
  resonance::write_roots_csv(f, modes);
  const auto cl = resonance::cluster_statistics(modes, 0.05);
  fmt::print("{} kR {} indices {}..{}: {} roots, {} near lambda = 0, {} near lambda = -1/2 (eps 0.05)\n",
             resonance::family_name(fam), rc.kR, rc.index_min, rc.index_max, modes.size(), cl.near_zero,
             cl.near_half);
  return 0;
}

int cmd_amap(const Globals& g, std::optional<double> kR, std::optional<int> lmax) {
  RunConfig cfg = load(g);
  if (kR) cfg.amap.kR = *kR;
  if (lmax) cfg.amap.lmax = *lmax;
  auto f = open_out(g, "amap.csv");
  resonance::write_amap_csv(f, cfg.amap.kR, cfg.amap.chi, cfg.amap.lmax);
  fmt::print("wrote A_l for l = 1..{} at {} susceptibilities, kR = {}\n", cfg.amap.lmax, cfg.amap.chi.size(),
             cfg.amap.kR);
  return 0;
}

int cmd_bounds(const Globals& g) {
  const RunConfig cfg = load(g);
  Status st;
  const VoxelGrid grid = build_grid(cfg.shape);
  const BoundReport r = analytic_bounds(grid, static_cast<std::size_t>(cfg.bounds.samples), g.seed);
  std::string text = bounds_text(r);
  if (cfg.bounds.measure) {
    const DyadicOperator G(grid), S(grid, KernelKind::Static), GS(grid, KernelKind::GammaS);
    const LinearMap D = [&](const Field& x, Field& y) {
      S.apply(x, y);
      for (std::size_t i = 0; i < x.size(); ++i) y[i] += x[i];
    };
    const double nG = estimate_norm(G.as_map(), symmetric_adjoint(G.as_map()), G.dim());
    const double nD = estimate_norm(D, symmetric_adjoint(D), G.dim());
    const double nS = estimate_norm(GS.as_map(), symmetric_adjoint(GS.as_map()), G.dim());
    text += fmt::format("measured_G = {:.17g}\nmeasured_D = {:.17g}\nmeasured_gammaS = {:.17g}\n", nG, nD, nS);
    fmt::print("measured ||G|| {:.6f} (g_upper {:.6f}), ||D|| {:.6f}, ||gamma_S|| {:.6f} (bound {:.6f})\n", nG,
               r.g_upper, nD, nS, r.gammaS_bound);
  }
  st.check(std::isfinite(r.g_upper) && std::isfinite(r.gamma_HS), "finite bounds");
  write_text(g, "bounds.txt", text);
  write_text(g, "bounds.csv", bounds_csv_header() + "\n" + bounds_csv_row(r) + "\n");
  fmt::print("{}", bounds_text(r));
  return st.failures ? 1 : 0;
}

int cmd_selftest(const Globals& g) {
  int failed = 0;
  for (const auto& c : run_selftest(g.seed)) {
    fmt::print("{} {:<40} err {:.3e} tol {:.1e}\n", c.pass ? "PASS" : "FAIL", c.name, c.value, c.tol);
    if (!c.pass) ++failed;
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-integral light scattering on voxel grids"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "YAML run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory (created if missing)");
  app.add_option("--threads", g.threads, "worker threads (default: $BORNSCAT_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "seed for Monte Carlo and random checks");
  app.add_flag("--force", g.force, "run certified methods without a certificate");

  auto* solve = app.add_subcommand("solve", "solve the Born equation; write field, cross sections, trajectory");
  auto* mie = app.add_subcommand("mie", "exact Mie fields and cross sections for a ball");
  bool compare = false;
  mie->add_flag("--compare", compare, "also solve the DDA problem and print the relative RMS difference");
  auto* res = app.add_subcommand("resonances", "locate resonance roots in the 1/chi plane");
  std::optional<std::string> family;
  std::optional<double> rkR;
  std::optional<int> lo, hi;
  res->add_option("--family", family, "TE | TM | CYL_PAR | CYL_PERP");
  res->add_option("--kR", rkR, "size parameter");
  res->add_option("--index-min", lo, "first index");
  res->add_option("--index-max", hi, "last index");
  auto* amap = app.add_subcommand("amap", "amplification factors A_l");
  std::optional<double> akR;
  std::optional<int> almax;
  amap->add_option("--kR", akR, "size parameter");
  amap->add_option("--lmax", almax, "largest order");
  auto* bounds = app.add_subcommand("bounds", "analytic operator-norm bounds and measured norms");
  auto* selftest = app.add_subcommand("selftest", "identity suites");

  CLI11_PARSE(app, argc, argv);

  if (g.threads > 0) set_num_threads(g.threads);
  try {
    fs::create_directories(g.out);
    if (*solve) return cmd_solve(g);
    if (*mie) return cmd_mie(g, compare);
    if (*res) return cmd_resonances(g, family, rkR, lo, hi);
    if (*amap) return cmd_amap(g, akR, almax);
    if (*bounds) return cmd_bounds(g);
    if (*selftest) return cmd_selftest(g);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}
