#include "bornscat/mie.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "bornscat/linalg.hpp"
#include "bornscat/resonance.hpp"
#include "bornscat/specfun.hpp"

namespace bornscat::mie {

int default_lmax(double kR) {
  if (!(kR > 0.0)) throw DomainError("kR must be positive");
  return static_cast<int>(std::ceil(kR + 4.0 * std::cbrt(kR) + 8.0));
}

namespace {

struct Spherical {
  double r;
  double theta;
  double phi;
  Vec3 rhat;
};

Spherical to_spherical(const Vec3& p) {
  Spherical s;
  s.r = norm(p);
  if (s.r < 1e-14) {
    // The fields are smooth at the origin; evaluate just off it.
    s.r = 1e-14;
    s.theta = 0.0;
    s.phi = 0.0;
    s.rhat = {0.0, 0.0, 1.0};
    return s;
  }
  s.theta = std::acos(std::clamp(p[2] / s.r, -1.0, 1.0));
  s.phi = std::atan2(p[1], p[0]);
  s.rhat = {p[0] / s.r, p[1] / s.r, p[2] / s.r};
  return s;
}

// Y_lm for l <= lmax, |m| <= l, at index l^2 + l + m.
std::vector<cplx> harmonics(int lmax, double theta, double phi) {
  std::vector<cplx> Y(static_cast<std::size_t>((lmax + 1) * (lmax + 1)));
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      Y[static_cast<std::size_t>(l * l + l + m)] = specfun::spherical_harmonic(l, m, theta, phi);
    }
  }
  return Y;
}

cplx Yat(const std::vector<cplx>& Y, int l, int m) {
  if (std::abs(m) > l) return {0.0};
  return Y[static_cast<std::size_t>(l * l + l + m)];
}

// L Y_lm in Cartesian components.
Vec3c angular_momentum(const std::vector<cplx>& Y, int l, int m) {
  const double lp = std::sqrt(static_cast<double>((l - m) * (l + m + 1)));
  const double lm = std::sqrt(static_cast<double>((l + m) * (l - m + 1)));
  const cplx up = lp * Yat(Y, l, m + 1);
  const cplx dn = lm * Yat(Y, l, m - 1);
  return {0.5 * (up + dn), (up - dn) / (2.0 * kI), static_cast<double>(m) * Yat(Y, l, m)};
}

// curl(r f Y) = -i f L Y.
Vec3c field_M(const Vec3c& LY, cplx f) {
  return {-kI * f * LY[0], -kI * f * LY[1], -kI * f * LY[2]};
}

// curl curl(r f Y) = rhat l(l+1) (f/r) Y + ((r f)'/r) (-i rhat x L Y).
Vec3c field_N(const Spherical& s, const Vec3c& LY, cplx Y, int l, cplx f, cplx drf) {
  const Vec3c c = cross(s.rhat, LY);
  const cplx radial = static_cast<double>(l * (l + 1)) * f / s.r * Y;
  const cplx tang = drf / s.r * (-kI);
  return {s.rhat[0] * radial + tang * c[0], s.rhat[1] * radial + tang * c[1], s.rhat[2] * radial + tang * c[2]};
}

cplx cdot(const Vec3c& a, const Vec3c& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1] + std::conj(a[2]) * b[2];
}

}  // namespace

Vec3c vacuum_multipole(int ell, int m, bool transverse_magnetic, const Vec3& r) {
  if (ell < 1 || std::abs(m) > ell) throw DomainError(fmt::format("invalid multipole ({}, {})", ell, m));
  const Spherical s = to_spherical(r);
  const auto Y = harmonics(ell, s.theta, s.phi);
  const auto j = specfun::spherical_j_array(ell, cplx{s.r});
  const double norm_l = std::sqrt(static_cast<double>(ell * (ell + 1)));
  const Vec3c LY = angular_momentum(Y, ell, m);
  const cplx jl = j[static_cast<std::size_t>(ell)];
  Vec3c out;
  if (!transverse_magnetic) {
    // j X = i M / sqrt(l(l+1))
    const Vec3c M = field_M(LY, jl);
    for (int a = 0; a < 3; ++a) out[static_cast<std::size_t>(a)] = kI * M[static_cast<std::size_t>(a)] / norm_l;
  } else {
    // curl(j X) = i N / sqrt(l(l+1))
    const cplx drj = s.r * j[static_cast<std::size_t>(ell - 1)] - static_cast<double>(ell) * jl;
    const Vec3c N = field_N(s, LY, Yat(Y, ell, m), ell, jl, drj);
    for (int a = 0; a < 3; ++a) out[static_cast<std::size_t>(a)] = kI * N[static_cast<std::size_t>(a)] / norm_l;
  }
  return out;
}

Field vacuum_field(const MultipoleCoefficients& c, const std::vector<Vec3>& points) {
  Field out(3 * points.size());
  parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Spherical s = to_spherical(points[p]);
      const auto Y = harmonics(c.lmax + 1, s.theta, s.phi);
      const auto j = specfun::spherical_j_array(c.lmax, cplx{s.r});
      Vec3c acc{0.0, 0.0, 0.0};
      for (int l = 1; l <= c.lmax; ++l) {
        const cplx jl = j[static_cast<std::size_t>(l)];
        const cplx drj = s.r * j[static_cast<std::size_t>(l - 1)] - static_cast<double>(l) * jl;
        for (int m = -l; m <= l; ++m) {
          const cplx a = c.a_at(l, m);
          const cplx bb = c.b_at(l, m);
          if (a == cplx{0.0} && bb == cplx{0.0}) continue;
          const Vec3c LY = angular_momentum(Y, l, m);
          const Vec3c M = field_M(LY, jl);
          const Vec3c N = field_N(s, LY, Yat(Y, l, m), l, jl, drj);
          for (std::size_t k = 0; k < 3; ++k) acc[k] += a * M[k] + bb * N[k];
        }
      }
      for (std::size_t k = 0; k < 3; ++k) out[3 * p + k] = acc[k];
    }
  });
  return out;
}

MultipoleCoefficients plane_wave_coefficients(int lmax, const Vec3c& pol, double check_radius) {
  if (lmax < 1) throw DomainError("plane_wave_coefficients: lmax must be >= 1");
  if (std::abs(pol[2]) != 0.0) throw DomainError("plane_wave_coefficients: polarization must be normal to z");
  MultipoleCoefficients c;
  c.lmax = lmax;
  const std::size_t count = static_cast<std::size_t>((lmax + 1) * (lmax + 1) - 1);
  c.a.assign(count, cplx{0.0});
  c.b.assign(count, cplx{0.0});
  for (int l = 1; l <= lmax; ++l) {
    // Project on the sphere r0 = l + 1, away from the zeros of j_l.
    const double r0 = l + 1.0;
    const int nt = l + static_cast<int>(std::ceil(r0)) + 20;
    const AngularGrid quad = AngularGrid::gauss_product(nt, 2 * nt);
    const cplx jl = specfun::spherical_j(l, cplx{r0});
    const double ll = static_cast<double>(l * (l + 1));
    std::vector<cplx> pa(static_cast<std::size_t>(2 * l + 1), cplx{0.0});
    std::vector<cplx> pb(static_cast<std::size_t>(2 * l + 1), cplx{0.0});
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Vec3& n = quad.nodes[q];
      const Spherical s = to_spherical({r0 * n[0], r0 * n[1], r0 * n[2]});
      const auto Y = harmonics(l, s.theta, s.phi);
      const cplx ph = std::exp(-kI * r0 * n[2]) * quad.weights[q];
      const Vec3c E{pol[0] * ph, pol[1] * ph, pol[2] * ph};
      const cplx radial = s.rhat[0] * E[0] + s.rhat[1] * E[1] + s.rhat[2] * E[2];
      for (int m = -l; m <= l; ++m) {
        const Vec3c LY = angular_momentum(Y, l, m);
        pa[static_cast<std::size_t>(m + l)] += cdot(LY, E);
        pb[static_cast<std::size_t>(m + l)] += std::conj(Yat(Y, l, m)) * radial;
      }
    }
    for (int m = -l; m <= l; ++m) {
      // <X, E> = <LY, E>/sqrt(l(l+1)), a = i <X, E> / (j sqrt(l(l+1))).
      c.a[MultipoleCoefficients::index(l, m)] = kI * pa[static_cast<std::size_t>(m + l)] / (jl * ll);
      c.b[MultipoleCoefficients::index(l, m)] = r0 * pb[static_cast<std::size_t>(m + l)] / (ll * jl);
    }
  }
  // Reconstruction check on a sphere.
  const AngularGrid check = AngularGrid::gauss_product(16, 32);
  std::vector<Vec3> pts;
  for (const auto& n : check.nodes) pts.push_back({check_radius * n[0], check_radius * n[1], check_radius * n[2]});
  const Field rec = vacuum_field(c, pts);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const cplx ph = std::exp(-kI * pts[p][2]);
    for (std::size_t k = 0; k < 3; ++k) {
      num += std::norm(rec[3 * p + k] - pol[k] * ph);
      den += std::norm(pol[k] * ph);
    }
  }
  c.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  c.truncation_warning = c.residual > 1e-6;
  return c;
}

Field mie_internal_field(double kR, cplx chi, const MultipoleCoefficients& c, const std::vector<Vec3>& points) {
  if (!(kR > 0.0)) throw DomainError("kR must be positive");
  for (const auto& p : points) {
    if (norm(p) >= kR) throw DomainError("mie_internal_field: point outside the open ball");
  }
  const int L = c.lmax;
  // Internal coefficients: -i a / (R D_TE) and -i b / (R D_TM) with the
  // stripped determinants D = (kR)^l f_l.
  std::vector<cplx> cte(static_cast<std::size_t>(L + 1));
  std::vector<cplx> ctm(static_cast<std::size_t>(L + 1));
  for (int l = 1; l <= L; ++l) {
    const cplx dte = resonance::f_TE_scaled(l, chi, kR);
    const cplx dtm = resonance::f_TM_scaled(l, chi, kR);
    if (std::abs(dte) < 1e-13) {
      throw NearResonanceError(fmt::format("near resonance: l = {}, TE denominator {:.3e}", l, std::abs(dte)), l,
                               false);
    }
    if (std::abs(dtm) < 1e-13) {
      throw NearResonanceError(fmt::format("near resonance: l = {}, TM denominator {:.3e}", l, std::abs(dtm)), l,
                               true);
    }
    // The interior radial function is r^l jhat_l(n^2 r^2); the (2l+1)!! of
    // jhat is folded in here.
    const double df = std::exp(-specfun::log_double_factorial(2 * l + 1));
    cte[static_cast<std::size_t>(l)] = -kI / (kR * dte) * df;
    ctm[static_cast<std::size_t>(l)] = -kI / (kR * dtm) * df;
  }
  const cplx n2 = 1.0 + chi;
  Field out(3 * points.size());
  parallel_for(points.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const Spherical s = to_spherical(points[p]);
      const auto Y = harmonics(L + 1, s.theta, s.phi);
      const cplx w = n2 * s.r * s.r;
      Vec3c acc{0.0, 0.0, 0.0};
      for (int l = 1; l <= L; ++l) {
        const double rl = std::pow(s.r, l);
        const cplx js = specfun::scaled_j_ratio(l, w);
        const cplx js_d = -specfun::scaled_j_ratio(l + 1, w) / (2.0 * (2.0 * l + 3.0));
        const cplx f = rl * js;
        const cplx drf = rl * ((l + 1.0) * js + 2.0 * w * js_d);
        for (int m = -l; m <= l; ++m) {
          const cplx a = c.a_at(l, m) * cte[static_cast<std::size_t>(l)];
          const cplx bb = c.b_at(l, m) * ctm[static_cast<std::size_t>(l)];
          if (a == cplx{0.0} && bb == cplx{0.0}) continue;
          const Vec3c LY = angular_momentum(Y, l, m);
          const Vec3c M = field_M(LY, f);
          const Vec3c N = field_N(s, LY, Yat(Y, l, m), l, f, drf);
          for (std::size_t k = 0; k < 3; ++k) acc[k] += a * M[k] + bb * N[k];
        }
      }
      for (std::size_t k = 0; k < 3; ++k) out[3 * p + k] = acc[k];
    }
  });
  return out;
}

std::pair<Field, Field> te_tm_split(const AngularGrid& quad, const Field& E, int lmax) {
  if (E.size() != 3 * quad.size()) throw DimensionError("te_tm_split: field length does not match the grid");
  if (lmax < 1 || lmax > quad.n_theta - 1 || 2 * lmax + 1 > quad.n_phi) {
    throw DomainError("te_tm_split: lmax too large for the angular grid");
  }
  std::vector<std::vector<cplx>> Ys(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Spherical s = to_spherical(quad.nodes[q]);
    Ys[q] = harmonics(lmax + 1, s.theta, s.phi);
  }
  Field te(E.size(), cplx{0.0});
  for (int l = 1; l <= lmax; ++l) {
    const double nl = std::sqrt(static_cast<double>(l * (l + 1)));
    for (int m = -l; m <= l; ++m) {
      cplx proj{0.0};
      for (std::size_t q = 0; q < quad.size(); ++q) {
        const Vec3c X = angular_momentum(Ys[q], l, m);
        const Vec3c e{E[3 * q], E[3 * q + 1], E[3 * q + 2]};
        proj += quad.weights[q] * cdot(X, e) / nl;
      }
      for (std::size_t q = 0; q < quad.size(); ++q) {
        const Vec3c X = angular_momentum(Ys[q], l, m);
        for (std::size_t k = 0; k < 3; ++k) te[3 * q + k] += proj * X[k] / nl;
      }
    }
  }
  Field tm(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) tm[i] = E[i] - te[i];
  return {te, tm};
}

Scatterer ball_quadrature(double kR, cplx chi, int n_r, int n_theta, int n_phi) {
  if (!(kR > 0.0) || n_r < 1) throw DomainError("ball_quadrature: invalid arguments");
  std::vector<double> xr;
  std::vector<double> wr;
  specfun::gauss_legendre(n_r, xr, wr);
  const AngularGrid ang = AngularGrid::gauss_product(n_theta, n_phi);
  Scatterer s;
  for (int i = 0; i < n_r; ++i) {
    const double r = 0.5 * kR * (xr[static_cast<std::size_t>(i)] + 1.0);
    const double wrad = 0.5 * kR * wr[static_cast<std::size_t>(i)] * r * r;
    for (std::size_t q = 0; q < ang.size(); ++q) {
      const Vec3& n = ang.nodes[q];
      s.points.push_back({r * n[0], r * n[1], r * n[2]});
      s.weights.push_back(wrad * ang.weights[q]);
      s.chi.push_back(chi);
    }
  }
  return s;
}

}  // namespace bornscat::mie
