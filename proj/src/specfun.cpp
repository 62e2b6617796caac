#include "bornscat/specfun.hpp"

#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <limits>
#include <string>

namespace bornscat::specfun {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_order(int ell) {
  if (ell < 0 || ell > kEllMax) {
    throw DomainError("order " + std::to_string(ell) + " outside [0, " + std::to_string(kEllMax) + "]");
  }
}

// The entire ratios take one order beyond ELL_MAX so that derivatives at
// ELL_MAX are available.
void check_ratio_order(int ell) {
  if (ell < 0 || ell > kEllMax + 1) {
    throw DomainError("order " + std::to_string(ell) + " outside [0, " + std::to_string(kEllMax + 1) + "]");
  }
}

// Ratios r_n = f_n / f_{n-1} of the minimal solution of the spherical
// recurrence f_{n-1} + f_{n+1} = (2n+1)/z f_n, for n in (lo, hi].
std::vector<cplx> spherical_ratios(int lo, int hi, cplx z) {
  const int start = hi + 40 + static_cast<int>(std::abs(z));
  std::vector<cplx> r(static_cast<std::size_t>(hi + 1), cplx{0.0});
  cplx next{0.0};
  for (int n = start; n > lo; --n) {
    cplx den = static_cast<double>(2 * n + 1) - z * next;
    if (den == cplx{0.0}) den = cplx{kEps * kEps};
    next = z / den;
    if (n <= hi) r[static_cast<std::size_t>(n)] = next;
  }
  return r;
}

// (2l+1)!! jhat_l(w) by its power series; accurate for |w| up to ~25.
cplx scaled_j_series(int ell, cplx w) {
  cplx term{1.0};
  cplx sum{1.0};
  for (int m = 0; m < 500; ++m) {
    term *= -w / (2.0 * (m + 1) * (2.0 * ell + 2.0 * m + 3.0));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && m > 2) break;
  }
  return sum;
}

// log((2l+1)!! j_l(z) / z^l) for |z| beyond the series range.
cplx log_scaled_j(int ell, cplx z) {
  const cplx lz = std::log(z);
  const double ldf = log_double_factorial(2 * ell + 1);
  const cplx j0 = std::sin(z) / z;
  const cplx j1 = std::sin(z) / (z * z) - std::cos(z) / z;
  if (ell == 0) return std::log(j0);
  const auto r = spherical_ratios(0, ell, z);
  const int anchor = std::abs(j0) >= std::abs(j1) ? 0 : 1;
  cplx acc = std::log(anchor == 0 ? j0 : j1);
  for (int n = anchor + 1; n <= ell; ++n) acc += std::log(r[static_cast<std::size_t>(n)]);
  return acc + ldf - static_cast<double>(ell) * lz;
}

// Hankel asymptotic expansion of H^(2)_nu, valid for large |z|.
cplx hankel2_asymptotic(int nu, cplx z) {
  const double mu = 4.0 * nu * nu;
  const cplx omega = z - 0.5 * nu * kPi - 0.25 * kPi;
  cplx term{1.0};
  cplx sum{1.0};
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double a = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
    term *= -kI * a / z;
    const double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
    if (mag < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(2.0 / (kPi * z)) * std::exp(-kI * omega) * sum;
}

constexpr double kHankelAsymptoticRadius = 25.0;

}  // namespace

double log_double_factorial(int n) {
  if (n <= 0) return 0.0;
  if (n % 2 == 0) {
    const int h = n / 2;
    return h * std::log(2.0) + std::lgamma(h + 1.0);
  }
  const int h = (n + 1) / 2;
  return std::lgamma(2.0 * h + 1.0) - h * std::log(2.0) - std::lgamma(h + 1.0);
}

std::vector<cplx> spherical_j_array(int lmax, cplx z) {
  check_order(lmax);
  std::vector<cplx> j(static_cast<std::size_t>(lmax + 1), cplx{0.0});
  const double az = std::abs(z);
  if (az == 0.0) {
    j[0] = 1.0;
    return j;
  }
  if (az <= 1.0) {
    const cplx w = z * z;
    cplx zl{1.0};
    for (int l = 0; l <= lmax; ++l) {
      j[static_cast<std::size_t>(l)] = zl * scaled_j_series(l, w) * std::exp(-log_double_factorial(2 * l + 1));
      zl *= z;
    }
    return j;
  }
  j[0] = std::sin(z) / z;
  if (lmax == 0) return j;
  j[1] = std::sin(z) / (z * z) - std::cos(z) / z;
  // Ratios from a downward sweep, anchored on the larger of j_0, j_1.
  // Upward recurrence loses digits once Im z is comparable to Re z, so
  // the ratio products are used for every order.
  const auto r = spherical_ratios(0, lmax, z);
  const int anchor = std::abs(j[0]) >= std::abs(j[1]) ? 0 : 1;
  for (int l = anchor + 1; l <= lmax; ++l) {
    j[static_cast<std::size_t>(l)] = j[static_cast<std::size_t>(l - 1)] * r[static_cast<std::size_t>(l)];
  }
  return j;
}

cplx spherical_j(int ell, cplx z) { return spherical_j_array(ell, z)[static_cast<std::size_t>(ell)]; }

cplx spherical_y(int ell, cplx z) {
  check_order(ell);
  if (z == cplx{0.0}) throw DomainError("spherical_y: z = 0");
  cplx y0 = -std::cos(z) / z;
  if (ell == 0) return y0;
  cplx y1 = -std::cos(z) / (z * z) - std::sin(z) / z;
  for (int l = 1; l < ell; ++l) {
    const cplx y2 = static_cast<double>(2 * l + 1) / z * y1 - y0;
    y0 = y1;
    y1 = y2;
  }
  return y1;
}

std::vector<cplx> spherical_h2_array(int lmax, cplx z) {
  check_order(lmax);
  if (z == cplx{0.0}) throw DomainError("spherical_h2: z = 0");
  std::vector<cplx> h(static_cast<std::size_t>(lmax + 1));
  const cplx e = std::exp(-kI * z);
  h[0] = kI * e / z;
  if (lmax == 0) return h;
  h[1] = e * (kI / (z * z) - 1.0 / z);
  for (int l = 1; l < lmax; ++l) {
    h[static_cast<std::size_t>(l + 1)] =
        static_cast<double>(2 * l + 1) / z * h[static_cast<std::size_t>(l)] - h[static_cast<std::size_t>(l - 1)];
  }
  return h;
}

cplx spherical_h2(int ell, cplx z) { return spherical_h2_array(ell, z)[static_cast<std::size_t>(ell)]; }

std::vector<cplx> scaled_h2_array(int lmax, cplx z) {
  check_order(lmax);
  std::vector<cplx> H(static_cast<std::size_t>(lmax + 1));
  const cplx e = std::exp(-kI * z);
  H[0] = kI * e;
  if (lmax == 0) return H;
  H[1] = e * (kI - z);
  const cplx z2 = z * z;
  for (int l = 1; l < lmax; ++l) {
    H[static_cast<std::size_t>(l + 1)] =
        H[static_cast<std::size_t>(l)] - z2 * H[static_cast<std::size_t>(l - 1)] / ((2.0 * l + 1.0) * (2.0 * l - 1.0));
  }
  return H;
}

cplx scaled_j_ratio(int ell, cplx w) {
  check_ratio_order(ell);
  const double aw = std::abs(w);
  if (!std::isfinite(aw) || aw > kEntireWMax) {
    throw AccuracyError("entire_j_ratio: |w| beyond the reliable summation radius");
  }
  if (aw <= 25.0) return scaled_j_series(ell, w);
  return std::exp(log_scaled_j(ell, std::sqrt(w)));
}

cplx entire_j_ratio(int ell, cplx w) {
  check_ratio_order(ell);
  const double aw = std::abs(w);
  if (!std::isfinite(aw) || aw > kEntireWMax) {
    throw AccuracyError("entire_j_ratio: |w| beyond the reliable summation radius");
  }
  const double ldf = log_double_factorial(2 * ell + 1);
  if (aw <= 25.0) return scaled_j_series(ell, w) * std::exp(-ldf);
  return std::exp(log_scaled_j(ell, std::sqrt(w)) - ldf);
}

cplx entire_j_ratio_deriv(int ell, cplx w) {
  check_order(ell);
  return -0.5 * entire_j_ratio(ell + 1, w);
}

std::vector<cplx> cyl_J_array(int mmax, cplx z) {
  if (mmax < 0) throw DomainError("cyl_J: negative order");
  std::vector<cplx> J(static_cast<std::size_t>(mmax + 1), cplx{0.0});
  const double az = std::abs(z);
  if (az == 0.0) {
    J[0] = 1.0;
    return J;
  }
  int start = std::max(mmax, static_cast<int>(az)) + 40 + static_cast<int>(std::sqrt(40.0 * (az + mmax)));
  if (start % 2) ++start;
  // Ratios r_n = J_n / J_{n-1}, then products relative to J_0.
  std::vector<cplx> r(static_cast<std::size_t>(start + 1), cplx{0.0});
  cplx next{0.0};
  for (int n = start; n >= 1; --n) {
    cplx den = 2.0 * n - z * next;
    if (den == cplx{0.0}) den = cplx{kEps * kEps};
    next = z / den;
    r[static_cast<std::size_t>(n)] = next;
  }
  std::vector<cplx> rel(static_cast<std::size_t>(start + 1));
  rel[0] = 1.0;
  for (int n = 1; n <= start; ++n) rel[static_cast<std::size_t>(n)] = rel[static_cast<std::size_t>(n - 1)] * r[static_cast<std::size_t>(n)];
  cplx j0;
  if (std::abs(z.real()) >= std::abs(z.imag())) {
    cplx s{1.0};
    for (int n = 2; n <= start; n += 2) s += 2.0 * rel[static_cast<std::size_t>(n)];
    j0 = 1.0 / s;
  } else if (az < kHankelAsymptoticRadius) {
    const cplx q = -0.25 * z * z;
    cplx term{1.0};
    j0 = 1.0;
    for (int k = 1; k < 400; ++k) {
      term *= q / (static_cast<double>(k) * k);
      j0 += term;
      if (std::abs(term) < 1e-17 * std::abs(j0)) break;
    }
  } else {
    // J_0 = (H^(1)_0 + H^(2)_0)/2 with H^(1)_0(z) = conj(H^(2)_0(conj z)).
    j0 = 0.5 * (std::conj(hankel2_asymptotic(0, std::conj(z))) + hankel2_asymptotic(0, z));
  }
  for (int n = 0; n <= mmax; ++n) J[static_cast<std::size_t>(n)] = j0 * rel[static_cast<std::size_t>(n)];
  return J;
}

cplx cyl_J(int m, cplx z) { return cyl_J_array(m, z)[static_cast<std::size_t>(m)]; }

std::vector<cplx> cyl_H2_array(int mmax, cplx z) {
  if (mmax < 0) throw DomainError("cyl_H2: negative order");
  if (z == cplx{0.0}) throw DomainError("cyl_H2: z = 0");
  std::vector<cplx> H(static_cast<std::size_t>(std::max(mmax, 1) + 1));
  if (std::abs(z) >= kHankelAsymptoticRadius) {
    H[0] = hankel2_asymptotic(0, z);
    H[1] = hankel2_asymptotic(1, z);
  } else {
    // Neumann series for Y_0, Y_1 in terms of the Miller sequence.
    const int kmax = static_cast<int>(std::abs(z)) + 60;
    const auto J = cyl_J_array(2 * kmax + 1, z);
    const cplx lg = std::log(0.5 * z) + kEulerGamma;
    cplx s0{0.0};
    cplx s1{0.0};
    for (int k = kmax; k >= 1; --k) {
      const double sgn = (k % 2) ? -1.0 : 1.0;
      s0 += sgn * J[static_cast<std::size_t>(2 * k)] / static_cast<double>(k);
      s1 += sgn * (J[static_cast<std::size_t>(2 * k - 1)] - J[static_cast<std::size_t>(2 * k + 1)]) / static_cast<double>(k);
    }
    const cplx y0 = (2.0 / kPi) * lg * J[0] - (4.0 / kPi) * s0;
    const cplx y1 = -(2.0 / kPi) * J[0] / z + (2.0 / kPi) * lg * J[1] + (2.0 / kPi) * s1;
    H[0] = J[0] - kI * y0;
    H[1] = J[1] - kI * y1;
  }
  for (int m = 1; m < mmax; ++m) {
    H[static_cast<std::size_t>(m + 1)] = 2.0 * m / z * H[static_cast<std::size_t>(m)] - H[static_cast<std::size_t>(m - 1)];
  }
  H.resize(static_cast<std::size_t>(mmax + 1));
  return H;
}

cplx cyl_H2(int m, cplx z) { return cyl_H2_array(m, z)[static_cast<std::size_t>(m)]; }

cplx cyl_Y(int m, cplx z) {
  // H2 = J - iY.
  return kI * (cyl_H2(m, z) - cyl_J(m, z));
}

cplx spherical_harmonic(int ell, int m, double theta, double phi) {
  if (ell < 0 || std::abs(m) > ell) {
    throw DomainError("spherical_harmonic: need |m| <= l, got l=" + std::to_string(ell) + " m=" + std::to_string(m));
  }
  return boost::math::spherical_harmonic<double>(static_cast<unsigned>(ell), m, theta, phi);
}

double lommel_integral(int ell, double x) {
  check_order(ell);
  if (!(x > 0.0)) throw DomainError("lommel_integral: x must be positive");
  if (x < ell + 1.0) {
    // x * sum_L [2(l+1+2L)+1] j_{l+1+2L}(x)^2, positive terms only.
    const int top = std::min(kEllMax, ell + 1 + 2 * (static_cast<int>(x) + 30));
    const auto j = spherical_j_array(top, cplx{x});
    double s = 0.0;
    for (int n = ell + 1; n <= top; n += 2) {
      const double v = j[static_cast<std::size_t>(n)].real();
      s += (2.0 * n + 1.0) * v * v;
    }
    return x * s;
  }
  const auto j = spherical_j_array(ell + 1, cplx{x});
  const double jl = j[static_cast<std::size_t>(ell)].real();
  const double jp = j[static_cast<std::size_t>(ell + 1)].real();
  const double jm = (ell == 0) ? std::cos(x) / x : j[static_cast<std::size_t>(ell - 1)].real();
  return 0.5 * x * x * x * (jl * jl - jm * jp);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

}  // namespace bornscat::specfun
