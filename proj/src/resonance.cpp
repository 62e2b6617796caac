#include "bornscat/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <ostream>

#include "bornscat/linalg.hpp"
#include "bornscat/specfun.hpp"

namespace bornscat::resonance {

std::string family_name(Family f) {
  switch (f) {
    case Family::TE:
      return "TE";
    case Family::TM:
      return "TM";
    case Family::CylPar:
      return "CYL_PAR";
    case Family::CylPerp:
      return "CYL_PERP";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "TE" || s == "te") return Family::TE;
  if (s == "TM" || s == "tm") return Family::TM;
  if (s == "CYL_PAR" || s == "cyl_par" || s == "par") return Family::CylPar;
  if (s == "CYL_PERP" || s == "cyl_perp" || s == "perp") return Family::CylPerp;
  throw ParseError("unknown resonance family '" + s + "'");
}

namespace {

void check_sphere(int ell, double kR) {
  if (ell < 1 || ell > specfun::kEllMax) {
    throw DomainError(fmt::format("order {} outside [1, {}]", ell, specfun::kEllMax));
  }
  if (!(kR > 0.0)) throw DomainError("kR must be positive");
}

void check_cyl(int m, double kR) {
  if (m < 1 || m > kMMax) throw DomainError(fmt::format("cylinder order {} outside [1, {}]", m, kMMax));
  if (!(kR > 0.0)) throw DomainError("kR must be positive");
}

// (kR)^l f_l with eps the TM factor. H_l = x^{l+1} h_l / (2l-1)!! and
// H_l' = x H_{l-1}/(2l-1); jhat is carried as (2l+1)!! jhat_l.
cplx sphere_scaled(int ell, cplx eps, cplx chi, double x, cplx H, cplx Hm1) {
  const cplx w = (1.0 + chi) * x * x;
  const cplx js = specfun::scaled_j_ratio(ell, w);
  const cplx js_d = -specfun::scaled_j_ratio(ell + 1, w) / (2.0 * (2.0 * ell + 3.0));
  const double l = ell;
  const cplx dH = x * Hm1 / (2.0 * l - 1.0);
  return (eps * js * (dH - l * H / x) - (H / x) * ((l + 1.0) * js + 2.0 * w * js_d)) / (2.0 * l + 1.0);
}

cplx sphere_scaled(int ell, bool tm, cplx chi, double x) {
  const auto H = specfun::scaled_h2_array(ell, cplx{x});
  const cplx eps = tm ? 1.0 + chi : cplx{1.0};
  return sphere_scaled(ell, eps, chi, x, H[static_cast<std::size_t>(ell)], H[static_cast<std::size_t>(ell - 1)]);
}

// J_m(z)/z^m as an entire function of v = z^2.
cplx cyl_jhat(int m, cplx v) {
  if (std::abs(v) <= 100.0) {
    cplx term = std::exp(-std::lgamma(m + 1.0) - m * std::log(2.0));
    cplx sum = term;
    for (int k = 1; k < 400; ++k) {
      term *= -v / (4.0 * k * (m + k));
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum) && k > 2) break;
    }
    return sum;
  }
  const cplx z = std::sqrt(v);
  return specfun::cyl_J(m, z) / std::pow(z, m);
}

struct CylParts {
  cplx a;  // x^{m-1} (m jhat + 2 v jhat')
  cplx b;  // x^m jhat
  cplx H;
  cplx dH;
};

CylParts cyl_parts(int m, cplx chi, double x) {
  const cplx v = (1.0 + chi) * x * x;
  const cplx jh = cyl_jhat(m, v);
  const cplx jh_d = -0.5 * cyl_jhat(m + 1, v);
  const auto H = specfun::cyl_H2_array(m + 1, cplx{x});
  CylParts p;
  p.H = H[static_cast<std::size_t>(m)];
  p.dH = H[static_cast<std::size_t>(m - 1)] - static_cast<double>(m) / x * p.H;
  p.a = std::pow(x, m - 1) * (static_cast<double>(m) * jh + 2.0 * v * jh_d);
  p.b = std::pow(x, m) * jh;
  return p;
}

}  // namespace

cplx f_TE_scaled(int ell, cplx chi, double kR) {
  check_sphere(ell, kR);
  return sphere_scaled(ell, false, chi, kR);
}

cplx f_TM_scaled(int ell, cplx chi, double kR) {
  check_sphere(ell, kR);
  return sphere_scaled(ell, true, chi, kR);
}

cplx f_TE(int ell, cplx chi, double kR) { return f_TE_scaled(ell, chi, kR) / std::pow(kR, ell); }

cplx f_TM(int ell, cplx chi, double kR) { return f_TM_scaled(ell, chi, kR) / std::pow(kR, ell); }

cplx f_cyl_par(int m, cplx chi, double kR) {
  check_cyl(m, kR);
  const CylParts p = cyl_parts(m, chi, kR);
  return p.a * p.H - p.b * p.dH;
}

cplx f_cyl_perp(int m, cplx chi, double kR) {
  check_cyl(m, kR);
  const CylParts p = cyl_parts(m, chi, kR);
  return p.a * p.H - (1.0 + chi) * p.b * p.dH;
}

cplx denominator(Family f, int index, cplx chi, double kR) {
  switch (f) {
    case Family::TE:
      return f_TE_scaled(index, chi, kR);
    case Family::TM:
      return f_TM_scaled(index, chi, kR);
    case Family::CylPar:
      return f_cyl_par(index, chi, kR);
    case Family::CylPerp:
      return f_cyl_perp(index, chi, kR);
  }
  return {};
}

cplx heur_exp_TM(int ell, cplx chi, double kR) {
  const double l = ell;
  const cplx t1 = -kI * (l * (chi + 2.0) + 1.0) / ((2.0 * l + 1.0) * kR);
  const cplx t2 = kI * chi * (l * (-chi + 2.0 * l * (chi + 2.0) + 4.0) + 3.0) * kR /
                  (2.0 * (2.0 * l - 1.0) * (2.0 * l + 1.0) * (2.0 * l + 3.0));
  return t1 + t2;
}

cplx asymptotic_root_TM(int ell, double kR) {
  if (ell < 1) throw DomainError("order must be >= 1");
  const double l = ell;
  return {-2.0 - (1.0 / l) * (1.0 + kR * kR / l), 0.0};
}

cplx cyl_par_asymptotic(int m, cplx chi, double kR) {
  return 2.0 * kI / (kPi * kR) - kI * chi * kR / (2.0 * kPi * m);
}

cplx cyl_perp_asymptotic(int m, cplx chi, double kR) {
  const double mm = m;
  return kI * (chi + 2.0) / (kPi * kR) - kI * chi * (mm * (chi + 2.0) - chi) * kR / (4.0 * (mm * mm - 1.0) * kPi);
}

cplx zeta(cplx chi) {
  if (chi == cplx{-2.0, 0.0}) throw DomainError("zeta undefined at chi = -2");
  return chi * chi / (chi + 2.0);
}

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrapped(cplx a, cplx b) {
  double d = std::arg(b) - std::arg(a);
  while (d > kPi) d -= kTwoPi;
  while (d <= -kPi) d += kTwoPi;
  return d;
}

class Scan {
 public:
  Scan(Family f, int index, double kR, const RootSearch& s) : f_(f), index_(index), kR_(kR), s_(s) {
    if (!(s.re_max > s.re_min) || !(s.im_max > s.im_min) || s.nx < 1 || s.ny < 1) {
      throw DomainError("invalid root-search rectangle");
    }
    hx_ = (s.re_max - s.re_min) / s.nx;
    hy_ = (s.im_max - s.im_min) / s.ny;
    // Excluded block of cells around lambda = 0.
    ex_lo_ = std::max(0, static_cast<int>(std::floor((-s.exclude - s.re_min) / hx_)));
    ex_hi_ = std::min(s.nx, static_cast<int>(std::ceil((s.exclude - s.re_min) / hx_)));
    ey_lo_ = std::max(0, static_cast<int>(std::floor((-s.exclude - s.im_min) / hy_)));
    ey_hi_ = std::min(s.ny, static_cast<int>(std::ceil((s.exclude - s.im_min) / hy_)));
    has_hole_ = ex_lo_ < ex_hi_ && ey_lo_ < ey_hi_ && s.re_min < s.exclude && s.re_max > -s.exclude &&
                s.im_min < s.exclude && s.im_max > -s.exclude;
    if (has_hole_ && (ex_lo_ == 0 || ey_lo_ == 0 || ex_hi_ == s.nx || ey_hi_ == s.ny)) {
      throw DomainError("the root-search rectangle must enclose the excluded square around lambda = 0");
    }
    if (!has_hole_ && s.re_min <= 0.0 && s.re_max >= 0.0 && s.im_min <= 0.0 && s.im_max >= 0.0) {
      throw DomainError("the root-search rectangle must exclude lambda = 0");
    }
    if (f == Family::TE || f == Family::TM) {
      const auto H = specfun::scaled_h2_array(index, cplx{kR});
      H_ = H[static_cast<std::size_t>(index)];
      Hm1_ = H[static_cast<std::size_t>(index - 1)];
    }
  }

  cplx node(int i, int j) const { return {s_.re_min + i * hx_, s_.im_min + j * hy_}; }

  bool in_hole(int ci, int cj) const {
    return has_hole_ && ci >= ex_lo_ && ci < ex_hi_ && cj >= ey_lo_ && cj < ey_hi_;
  }
  bool node_in_hole_interior(int i, int j) const {
    return has_hole_ && i > ex_lo_ && i < ex_hi_ && j > ey_lo_ && j < ey_hi_;
  }

  cplx eval(cplx lambda) const {
    const cplx chi = 1.0 / lambda;
    switch (f_) {
      case Family::TE:
        return sphere_scaled(index_, cplx{1.0}, chi, kR_, H_, Hm1_);
      case Family::TM:
        return sphere_scaled(index_, 1.0 + chi, chi, kR_, H_, Hm1_);
      default:
        return denominator(f_, index_, chi, kR_);
    }
  }

  // Phase change along the segment a -> b, bisecting where it jumps by more than pi/2.
  double segment_phase(cplx a, cplx b, cplx fa, cplx fb, int depth = 0) const {
    const double d = wrapped(fa, fb);
    if (std::abs(d) <= 0.5 * kPi || depth > 30) return d;
    const cplx m = 0.5 * (a + b);
    const cplx fm = eval(m);
    return segment_phase(a, m, fa, fm, depth + 1) + segment_phase(m, b, fm, fb, depth + 1);
  }

  // Counterclockwise winding around the cell block [i0, i1) x [j0, j1).
  int block_winding(int i0, int i1, int j0, int j1) const {
    std::vector<std::pair<int, int>> path;
    for (int i = i0; i < i1; ++i) path.emplace_back(i, j0);
    for (int j = j0; j < j1; ++j) path.emplace_back(i1, j);
    for (int i = i1; i > i0; --i) path.emplace_back(i, j1);
    for (int j = j1; j > j0; --j) path.emplace_back(i0, j);
    std::vector<cplx> vals(path.size());
    parallel_for(path.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) vals[k] = eval(node(path[k].first, path[k].second));
    });
    double total = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const std::size_t n = (k + 1) % path.size();
      total += segment_phase(node(path[k].first, path[k].second), node(path[n].first, path[n].second), vals[k],
                             vals[n]);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
  }

  int region_winding() const {
    int w = block_winding(0, s_.nx, 0, s_.ny);
    if (has_hole_) w -= block_winding(ex_lo_, ex_hi_, ey_lo_, ey_hi_);
    return w;
  }

  bool newton(cplx& lam) const {
    for (int it = 0; it < s_.newton_max; ++it) {
      const double h = 1e-7 * std::max(std::abs(lam), 1e-3);
      const cplx f0 = eval(lam);
      const cplx d = (eval(lam + h) - eval(lam - h)) / (2.0 * h);
      if (d == cplx{0.0} || !std::isfinite(std::abs(d))) return false;
      const cplx step = f0 / d;
      lam -= step;
      if (!std::isfinite(std::abs(lam))) return false;
      if (std::abs(step) <= s_.newton_tol * std::max(1.0, std::abs(lam))) return true;
    }
    return false;
  }

  bool inside_region(cplx lam) const {
    if (lam.real() < s_.re_min || lam.real() > s_.re_max || lam.imag() < s_.im_min || lam.imag() > s_.im_max) {
      return false;
    }
    if (!has_hole_) return true;
    const double xl = s_.re_min + ex_lo_ * hx_;
    const double xh = s_.re_min + ex_hi_ * hx_;
    const double yl = s_.im_min + ey_lo_ * hy_;
    const double yh = s_.im_min + ey_hi_ * hy_;
    return !(lam.real() > xl && lam.real() < xh && lam.imag() > yl && lam.imag() < yh);
  }

  std::vector<ResonanceMode> run() const {
    const int nx = s_.nx;
    const int ny = s_.ny;
    const std::size_t stride = static_cast<std::size_t>(ny + 1);
    std::vector<cplx> vals(static_cast<std::size_t>(nx + 1) * stride);
    parallel_for(static_cast<std::size_t>(nx + 1), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        for (int j = 0; j <= ny; ++j) {
          if (node_in_hole_interior(static_cast<int>(i), j)) continue;
          vals[i * stride + static_cast<std::size_t>(j)] = eval(node(static_cast<int>(i), j));
        }
      }
    });
    auto at = [&](int i, int j) { return vals[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j)]; };

    std::vector<cplx> found;
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        if (in_hole(i, j)) continue;
        const double ph = wrapped(at(i, j), at(i + 1, j)) + wrapped(at(i + 1, j), at(i + 1, j + 1)) +
                          wrapped(at(i + 1, j + 1), at(i, j + 1)) + wrapped(at(i, j + 1), at(i, j));
        if (std::lround(ph / kTwoPi) <= 0) continue;
        const cplx c = node(i, j) + cplx{0.5 * hx_, 0.5 * hy_};
        const cplx starts[5] = {c, node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
        for (const cplx& st : starts) {
          cplx lam = st;
          if (newton(lam) && inside_region(lam) && std::abs(eval(lam)) <= s_.residual_tol) {
            found.push_back(lam);
            break;
          }
        }
      }
    }
    std::sort(found.begin(), found.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    std::vector<cplx> unique;
    for (const cplx& z : found) {
      bool dup = false;
      for (const cplx& u : unique) dup = dup || std::abs(u - z) <= s_.dedup * std::max(1.0, std::abs(z));
      if (!dup) unique.push_back(z);
    }
    const int w = region_winding();
    if (w != static_cast<int>(unique.size())) {
      throw IncompleteSearchError(fmt::format("{} index {}: winding number {} but {} roots located", family_name(f_),
                                              index_, w, unique.size()),
                                  index_);
    }
    std::vector<ResonanceMode> out;
    for (const cplx& lam : unique) {
      ResonanceMode m;
      m.family = f_;
      m.index = index_;
      m.lambda = lam;
      m.chi = 1.0 / lam;
      m.residual = std::abs(eval(lam));
      m.kR = kR_;
      out.push_back(m);
    }
    return out;
  }

 private:
  Family f_;
  int index_;
  double kR_;
  RootSearch s_;
  double hx_ = 0.0;
  double hy_ = 0.0;
  int ex_lo_ = 0, ex_hi_ = 0, ey_lo_ = 0, ey_hi_ = 0;
  bool has_hole_ = false;
  cplx H_, Hm1_;
};

void check_index(Family f, int index, double kR) {
  if (f == Family::TE || f == Family::TM) {
    check_sphere(index, kR);
  } else {
    check_cyl(index, kR);
  }
}

}  // namespace

std::vector<ResonanceMode> find_roots(Family f, int index, double kR, const RootSearch& s) {
  check_index(f, index, kR);
  return Scan(f, index, kR, s).run();
}

std::vector<ResonanceMode> find_roots(Family f, int lo, int hi, double kR, const RootSearch& s) {
  std::vector<ResonanceMode> out;
  for (int l = lo; l <= hi; ++l) {
    auto r = find_roots(f, l, kR, s);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

int winding_number(Family f, int index, double kR, const RootSearch& s) {
  check_index(f, index, kR);
  return Scan(f, index, kR, s).region_winding();
}

double amplification_A(int ell, cplx chi, double kR) {
  const double a = std::abs(f_TM_scaled(ell, chi, kR));
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / a;
}

ClusterStats cluster_statistics(const std::vector<ResonanceMode>& modes, double eps) {
  ClusterStats c;
  for (const auto& m : modes) {
    if (std::abs(m.lambda) < eps) ++c.near_zero;
    if (std::abs(m.lambda + 0.5) < eps) ++c.near_half;
  }
  return c;
}

void write_roots_csv(std::ostream& os, const std::vector<ResonanceMode>& modes) {
  os << "family,index,re_lambda,im_lambda,re_chi,im_chi,residual\n";
  for (const auto& m : modes) {
    os << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.3e}\n", family_name(m.family), m.index,
                      m.lambda.real(), m.lambda.imag(), m.chi.real(), m.chi.imag(), m.residual);
  }
}

void write_amap_csv(std::ostream& os, double kR, const std::vector<cplx>& chis, int lmax) {
  os << "re_chi,im_chi,ell,A\n";
  for (const cplx& chi : chis) {
    for (int l = 1; l <= lmax; ++l) {
      os << fmt::format("{:.17g},{:.17g},{},{:.17g}\n", chi.real(), chi.imag(), l, amplification_A(l, chi, kR));
    }
  }
}

}  // namespace bornscat::resonance
