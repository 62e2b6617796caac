#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "bornscat/specfun.hpp"

using namespace bornscat;
using namespace bornscat::specfun;

namespace {

// j_l(z) = z^l sum_m (-z^2/2)^m / (m! (2l+2m+1)!!), summed in long double.
std::complex<long double> j_series(int ell, std::complex<long double> z) {
  std::complex<long double> term = 1.0L;
  for (int k = 1; k <= ell; ++k) term *= z / static_cast<long double>(2 * k + 1);
  std::complex<long double> sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= -z * z / (2.0L * m * (2.0L * ell + 2.0L * m + 1.0L));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum)) break;
  }
  return sum;
}

// h_l(z) = i^{l+1} exp(-iz)/z sum_k (l+k)!/(k!(l-k)!) (2iz)^{-k}
cplx h2_closed(int ell, cplx z) {
  cplx sum = 0.0;
  double c = 1.0;
  for (int k = 0; k <= ell; ++k) {
    if (k > 0) c *= static_cast<double>((ell + k) * (ell - k + 1)) / k;
    sum += c * std::pow(1.0 / (2.0 * kI * z), k);
  }
  return std::pow(kI, ell + 1) * std::exp(-kI * z) / z * sum;
}

// J_m(z) = sum_k (-1)^k (z/2)^{2k+m} / (k! (k+m)!)
cplx J_series(int m, cplx z) {
  std::complex<long double> zz(z.real(), z.imag());
  std::complex<long double> term = 1.0L;
  for (int k = 1; k <= m; ++k) term *= zz / (2.0L * k);
  std::complex<long double> sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -(zz * zz) / (4.0L * k * (k + m));
    sum += term;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Specfun, SphericalJSpecialValues) {
  EXPECT_DOUBLE_EQ(spherical_j(0, 0.0).real(), 1.0);
  EXPECT_LT(std::abs(spherical_j(0, kPi)), 1e-14);
  const auto ref = j_series(3, 2.5L);
  EXPECT_LT(rel(spherical_j(3, 2.5), cplx(static_cast<double>(ref.real()), 0.0)), 1e-12);
}

TEST(Specfun, SphericalJMatchesSeriesOnComplexArguments) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int t = 0; t < 40; ++t) {
    const cplx z{u(rng), u(rng)};
    for (int l : {0, 2, 7, 15}) {
      const auto r = j_series(l, {z.real(), z.imag()});
      EXPECT_LT(rel(spherical_j(l, z), cplx(static_cast<double>(r.real()), static_cast<double>(r.imag()))), 1e-11)
          << "l=" << l << " z=" << z;
    }
  }
}

TEST(Specfun, HankelClosedForms) {
  EXPECT_LT(rel(spherical_h2(0, 1.0), kI * std::exp(-kI)), 1e-15);
  const cplx z{3.0, 0.5};
  EXPECT_LT(rel(spherical_h2(5, z), h2_closed(5, z)), 1e-11);
  const auto arr = spherical_h2_array(8, z);
  for (int l = 0; l <= 8; ++l) EXPECT_LT(rel(arr[static_cast<std::size_t>(l)], h2_closed(l, z)), 1e-11);
  EXPECT_THROW(spherical_h2(1, 0.0), DomainError);
}

TEST(Specfun, ScaledHankelArray) {
  const cplx z{0.7, 0.0};
  const auto H = scaled_h2_array(6, z);
  const auto h = spherical_h2_array(6, z);
  for (int l = 0; l <= 6; ++l) {
    const cplx expect = std::pow(z, l + 1) * h[static_cast<std::size_t>(l)] / std::exp(log_double_factorial(2 * l - 1));
    EXPECT_LT(rel(H[static_cast<std::size_t>(l)], expect), 1e-13);
  }
  EXPECT_LT(std::abs(scaled_h2_array(3, 0.0)[3] - kI), 1e-15);
}

TEST(Specfun, WronskiansOverRange) {
  for (double x = 0.1; x <= 50.0; x *= 1.17) {
    const auto j = spherical_j_array(6, x);
    const auto h = spherical_h2_array(6, x);
    for (std::size_t l = 1; l <= 5; ++l) {
      // det [Re h, Im h; (Re h)', (Im h)'] = -1/x^2
      const double re = j[l].real(), im = h[l].imag();
      const double dre = j[l - 1].real() - (l + 1.0) / x * re;
      const double dim = h[l - 1].imag() - (l + 1.0) / x * im;
      EXPECT_LT(std::abs((re * dim - im * dre) * x * x + 1.0), 1e-11) << x;
    }
    const auto J = cyl_J_array(6, x);
    const auto H = cyl_H2_array(6, x);
    for (std::size_t m = 1; m <= 5; ++m) {
      const double re = J[m].real(), im = H[m].imag();
      const double dre = J[m - 1].real() - (m / x) * re;
      const double dim = H[m - 1].imag() - (m / x) * im;
      EXPECT_LT(std::abs((re * dim - im * dre) * kPi * x / 2.0 + 1.0), 1e-11) << x;
    }
  }
}

TEST(Specfun, EntireRatio) {
  EXPECT_NEAR(entire_j_ratio(1, 0.0).real(), 1.0 / 3.0, 4e-16);
  EXPECT_LT(rel(entire_j_ratio(2, 4.0), spherical_j(2, 2.0) / 4.0), 1e-14);
  EXPECT_LT(rel(entire_j_ratio(0, -1.0), std::sinh(1.0)), 1e-14);
  EXPECT_LT(rel(scaled_j_ratio(4, 0.0), 1.0), 1e-15);
}

TEST(Specfun, EntireRatioIsBranchFree) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int t = 0; t < 100; ++t) {
    const cplx z{u(rng), u(rng)};
    for (int l : {0, 1, 3, 10, 25}) {
      const cplx a = entire_j_ratio(l, z * z) * std::pow(z, l);
      const cplx b = entire_j_ratio(l, (-z) * (-z)) * std::pow(z, l);
      EXPECT_EQ(a, b);
      EXPECT_LT(rel(a, spherical_j(l, z)), 1e-10);
    }
  }
}

TEST(Specfun, EntireRatioDerivative) {
  const cplx w{1.3, -0.4};
  const double h = 1e-5;
  for (int l : {0, 2, 6}) {
    const cplx fd = (entire_j_ratio(l, w + h) - entire_j_ratio(l, w - h)) / (2.0 * h);
    EXPECT_LT(rel(entire_j_ratio_deriv(l, w), fd), 1e-8);
    EXPECT_LT(rel(entire_j_ratio_deriv(l, w), -0.5 * entire_j_ratio(l + 1, w)), 1e-14);
  }
}

TEST(Specfun, OrderLimit) {
  EXPECT_THROW(spherical_j(kEllMax + 1, 1.0), DomainError);
  EXPECT_NO_THROW(spherical_j(kEllMax, 1.0));
}

TEST(Specfun, CylindricalBessel) {
  const cplx z{1e-3, 0.0};
  EXPECT_NEAR(cyl_J(0, z).real(), 1.0 - 0.25e-6 + 1e-12 / 64, 4e-16);
  const cplx w{2.0, -1.0};
  EXPECT_LT(rel(cyl_J(3, w), J_series(3, w)), 1e-11);
  EXPECT_THROW(cyl_H2(0, 0.0), DomainError);
}

TEST(Specfun, SphericalHarmonics) {
  EXPECT_NEAR(spherical_harmonic(0, 0, 0.4, 1.2).real(), 1.0 / std::sqrt(4 * kPi), 1e-15);
  EXPECT_NEAR(spherical_harmonic(1, 0, 0.4, 1.2).real(), std::sqrt(3 / (4 * kPi)) * std::cos(0.4), 1e-15);
  EXPECT_THROW(spherical_harmonic(1, 2, 0.1, 0.1), DomainError);
  std::vector<double> x, w;
  gauss_legendre(12, x, w);
  const int nphi = 16;
  cplx s21 = 0.0, s21_20 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < nphi; ++j) {
      const double th = std::acos(x[i]), ph = 2 * kPi * j / nphi;
      const cplx y21 = spherical_harmonic(2, 1, th, ph);
      s21 += w[i] * (2 * kPi / nphi) * std::norm(y21);
      s21_20 += w[i] * (2 * kPi / nphi) * std::conj(y21) * spherical_harmonic(2, 0, th, ph);
    }
  }
  EXPECT_NEAR(s21.real(), 1.0, 1e-10);
  EXPECT_LT(std::abs(s21_20), 1e-12);
}

TEST(Specfun, GaussLegendreExactness) {
  std::vector<double> x, w;
  gauss_legendre(10, x, w);
  for (int p = 0; p <= 19; ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], p);
    EXPECT_NEAR(s, p % 2 ? 0.0 : 2.0 / (p + 1), 1e-14);
  }
}

TEST(Specfun, LommelIntegral) {
  EXPECT_NEAR(lommel_integral(0, 1e-3) / (1e-9 / 3), 1.0, 1e-6);
  using boost::math::quadrature::gauss_kronrod;
  for (int l : {0, 2, 7, 20}) {
    for (double x : {0.3, 5.0, 17.0, 30.0}) {
      const double q = gauss_kronrod<double, 61>::integrate(
          [&](double t) { return std::norm(spherical_j(l, t)) * t * t; }, 0.0, x, 15, 1e-14);
      EXPECT_NEAR(lommel_integral(l, x), q, 1e-10 * std::max(1.0, q)) << l << " " << x;
    }
  }
}

TEST(Specfun, LommelObeysBesselBound) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> L(0, 60);
  std::uniform_real_distribution<double> X(-3.0, std::log(60.0));
  for (int t = 0; t < 2000; ++t) {
    const int l = L(rng);
    const double x = std::exp(X(rng));
    const double bound = std::min({x * x * x / 3, x * x / 2, 5 * x / 8});
    EXPECT_LE(lommel_integral(l, x), bound * (1 + 1e-12)) << l << " " << x;
  }
}

TEST(Specfun, DoubleFactorialLogs) {
  EXPECT_DOUBLE_EQ(log_double_factorial(-1), 0.0);
  EXPECT_DOUBLE_EQ(log_double_factorial(0), 0.0);
  EXPECT_NEAR(log_double_factorial(7), std::log(105.0), 1e-14);
  EXPECT_TRUE(std::isfinite(log_double_factorial(401)));
}
