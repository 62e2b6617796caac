#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "bornscat/bounds.hpp"
#include "bornscat/kernel.hpp"
#include "bornscat/specfun.hpp"

using namespace bornscat;

namespace {

// kd^3 (k^2 g 1 + grad grad g) written through g'(R) and g''(R) of g = exp(-ikR)/(4 pi R).
Mat3c hessian_oracle(double kd, const Index3& n, double k) {
  const Vec3 r{n[0] * kd, n[1] * kd, n[2] * kd};
  const double R = norm(r);
  const cplx e = std::exp(cplx(0.0, -k * R)) / (4 * kPi);
  const cplx g = e / R;
  const cplx g1 = -(1.0 + kI * k * R) * e / (R * R);
  const cplx g2 = (2.0 + 2.0 * kI * k * R - k * k * R * R) * e / (R * R * R);
  Mat3c M;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double rr = r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)] / (R * R);
      const double d = i == j ? 1.0 : 0.0;
      M(i, j) = kd * kd * kd * (k * k * g * d + g2 * rr + g1 / R * (d - rr));
    }
  }
  return M;
}

VoxelGrid random_box(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const VoxelGrid g = voxelize(ShapeSpec{Shape::box({6, 6, 6}, 1.0)}, 1.0 / (0.7 + 0.2 * seed));
  std::vector<cplx> chi(g.size());
  for (auto& c : chi) c = {u(rng), -std::abs(u(rng))};
  return g.with_chi(chi);
}

double rel(const Field& a, const Field& b) {
  Field d = a;
  axpy(-1.0, b, d);
  return norm2(d) / norm2(b);
}

}  // namespace

TEST(Kernel, StaticDipoleLimit) {
  const double kd = 0.2;
  const Mat3c S = dyadic_kernel(kd, {0, 0, 3}, 0.0);
  const double R = 3 * kd;
  const double a = kd * kd * kd / (4 * kPi * R * R * R);
  EXPECT_NEAR(std::abs(S(2, 2) - 2.0 * a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(S(0, 0) + a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(S(0, 1)), 0.0, 1e-15);
  const Mat3c small = dyadic_kernel(1e-4, {0, 0, 3}, 1.0);
  const Mat3c small0 = dyadic_kernel(1e-4, {0, 0, 3}, 0.0);
  EXPECT_LT((small - small0).norm() / small0.norm(), 1e-6);
}

TEST(Kernel, BlockStructure) {
  const Index3 n{2, -1, 3};
  const Mat3c M = dyadic_kernel(0.3, n, 1.0);
  EXPECT_LT((M - M.transpose()).norm(), 1e-16);
  Eigen::Vector3cd rhat(2.0, -1.0, 3.0);
  rhat /= rhat.norm();
  const Eigen::Vector3cd Mr = M * rhat;
  const cplx lam = rhat.dot(Mr);
  EXPECT_LT((Mr - lam * rhat).norm(), 1e-15);
}

TEST(Kernel, MatchesHessianOracle) {
  for (const Index3& n : {Index3{1, 0, 0}, Index3{2, -1, 3}, Index3{-4, 2, 1}}) {
    const double kd = 0.7 / std::sqrt(static_cast<double>(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]));
    const Mat3c A = dyadic_kernel(kd, n, 1.0), B = hessian_oracle(kd, n, 1.0);
    EXPECT_LT((A - B).norm() / B.norm(), 1e-13);
  }
}

TEST(Kernel, SinKernelIsMinusImaginaryPart) {
  for (const Index3& n : {Index3{1, 0, 0}, Index3{2, -1, 3}, Index3{9, 4, 0}}) {
    const Mat3c A = dyadic_kernel(0.1, n, 1.0);
    const Mat3c S = dyadic_kernel_sin(0.1, n);
    EXPECT_LT((S + A.imag().cast<cplx>()).norm(), 1e-15 + 1e-12 * S.norm());
  }
}

TEST(Kernel, SelfTerm) {
  EXPECT_LT(std::abs(self_term(1e-4) + 1.0 / 3.0), 1e-8);
  const double kd1 = std::cbrt(4 * kPi / 3);  // ka = 1
  const cplx expect = -1.0 / 3.0 + (2.0 / 3.0) * (std::exp(-kI) * (1.0 + kI) - 1.0);
  EXPECT_LT(std::abs(self_term(kd1) - expect), 1e-15);
  // k^2 int_{|r|<a} exp(-ikr)/(4 pi r) = k^2 int_0^a r exp(-ikr) dr, by quadrature
  using boost::math::quadrature::gauss_kronrod;
  for (double kd : {0.05, 0.3, 1.2}) {
    const double a = kd * std::cbrt(3.0 / (4 * kPi));
    const double re = gauss_kronrod<double, 31>::integrate([](double r) { return r * std::cos(r); }, 0.0, a);
    const double im = gauss_kronrod<double, 31>::integrate([](double r) { return -r * std::sin(r); }, 0.0, a);
    EXPECT_LT(std::abs(scalar_self_term(kd) - cplx(re, im)), 1e-13);
    EXPECT_LT(std::abs(self_term(kd) - (-1.0 / 3.0 + (2.0 / 3.0) * cplx(re, im))), 1e-13);
  }
}

TEST(Kernel, SelfImaginaryMatchesSinKernelAtOrigin) {
  // -Im s = kd^3/(6 pi) to leading order: the R -> 0 value of the sin kernel.
  for (double kd : {0.02, 0.05}) {
    const double lead = kd * kd * kd / (6 * kPi);
    EXPECT_NEAR(-self_term(kd).imag() / lead, 1.0, 0.01);
  }
}

TEST(Kernel, FftMatchesDense) {
  for (unsigned seed : {1u, 2u, 3u}) {
    const VoxelGrid g = random_box(seed);
    for (KernelKind kind : {KernelKind::Full, KernelKind::Static, KernelKind::Gamma, KernelKind::GammaS}) {
      const DyadicOperator G(g, kind);
      const Field x = random_field(G.dim(), 10 + seed);
      Field a, b;
      G.apply(x, a);
      G.apply_direct(x, b);
      EXPECT_LT(rel(a, b), 1e-12);
      const Eigen::MatrixXcd M = G.dense();
      const Eigen::VectorXcd y = M * Eigen::Map<const Eigen::VectorXcd>(x.data(), static_cast<Eigen::Index>(x.size()));
      EXPECT_LT(rel(a, Field(y.data(), y.data() + y.size())), 1e-12);
    }
  }
}

TEST(Kernel, DenseMatrixIsComplexSymmetric) {
  const DyadicOperator G(random_box(1));
  const Eigen::MatrixXcd M = G.dense();
  EXPECT_EQ((M - M.transpose()).cwiseAbs().maxCoeff(), 0.0);
  // <F, (lam - G) E> = <E*, (lam - G) F*>
  const Field E = random_field(G.dim(), 3), F = random_field(G.dim(), 4);
  const cplx lam{0.3, -1.1};
  auto apply = [&](const Field& x) {
    Field y = G.apply(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lam * x[i] - y[i];
    return y;
  };
  Field Ec = E, Fc = F;
  for (auto& v : Ec) v = std::conj(v);
  for (auto& v : Fc) v = std::conj(v);
  EXPECT_LT(std::abs(inner(F, apply(E)) - inner(Ec, apply(Fc))), 1e-12 * norm2(E) * norm2(F));
}

TEST(Kernel, SpectralRoundTrip) {
  for (KernelKind kind : {KernelKind::Full, KernelKind::Static, KernelKind::GammaS}) {
    const DyadicOperator G(voxelize(ShapeSpec{Shape::sphere(1.0, 1.0)}, 0.2), kind);
    EXPECT_LT(G.roundtrip_error(), 1e-12);
  }
}

TEST(Kernel, TranslationCovariance) {
  const ShapeSpec a{Shape::box({1.2, 0.8, 1.2}, 1.0)};
  const ShapeSpec b{Shape::box({1.2, 0.8, 1.2}, 1.0, {0.6, -0.4, 1.0})};
  const VoxelGrid ga = voxelize(a, 0.2), gb = voxelize(b, 0.2);
  ASSERT_EQ(ga.size(), gb.size());
  const DyadicOperator Ga(ga), Gb(gb);
  const Field x = random_field(Ga.dim(), 8);
  EXPECT_LT(rel(Ga.apply(x), Gb.apply(x)), 1e-13);
}

TEST(Kernel, Linearity) {
  const DyadicOperator G(random_box(2));
  const Field x = random_field(G.dim(), 1), y = random_field(G.dim(), 2);
  Field s = x;
  axpy(cplx(0.5, 2.0), y, s);
  Field expect = G.apply(x);
  axpy(cplx(0.5, 2.0), G.apply(y), expect);
  EXPECT_LT(rel(G.apply(s), expect), 1e-13);
}

TEST(Kernel, BornOperatorModes) {
  const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(1.0, cplx(0.4, -0.1))}, 0.25);
  const DyadicOperator G(g);
  const Field E = random_field(G.dim(), 5);
  EXPECT_EQ(apply_born(G, 0.0, E), E);
  EXPECT_LT(rel(apply_born(G, E), apply_born(G, cplx(0.4, -0.1), E)), 1e-15);
  EXPECT_THROW(G.apply(Field(5)), DimensionError);
}

TEST(Kernel, DissipativeCoercivity) {
  const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(1.0, 0.0)}, 0.125);
  const DyadicOperator G(g);
  for (cplx chi : {cplx(0.0, -1.0), cplx(2.0, -0.5), cplx(-3.0, -0.2)}) {
    const double lower = -chi.imag() / std::abs(chi);
    for (int t = 0; t < 3; ++t) {
      const Field E = random_field(G.dim(), 40 + static_cast<unsigned>(t));
      EXPECT_GE(norm2(apply_born(G, chi, E)), lower * norm2(E) * (1 - 1e-6));
    }
  }
}

TEST(Kernel, StaticOperatorRandomQuotients) {
  const DyadicOperator S(voxelize(ShapeSpec{Shape::sphere(1.0, 0.0)}, 1.0 / 8), KernelKind::Static);
  for (int t = 0; t < 5; ++t) {
    const Field E = random_field(S.dim(), 60 + static_cast<unsigned>(t));
    const Field y = apply_static_dipole(S, E);
    const cplx q = inner(E, y) / inner(E, E);
    EXPECT_LT(std::abs(q.imag()), 1e-12);
    EXPECT_GE(q.real(), 0.0);
    EXPECT_LE(q.real(), 1.0);
  }
}

TEST(Kernel, StaticRayleighQuotients) {
  const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(1.0, 0.0)}, 1.0 / 12);
  const DyadicOperator S(g, KernelKind::Static);
  // grad(z) and grad(z^2 - (x^2 + y^2)/2)
  Field e1(S.dim()), e2(S.dim());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 c = g.center(n);
    e1[3 * n + 2] = 1.0;
    e2[3 * n] = -c[0];
    e2[3 * n + 1] = -c[1];
    e2[3 * n + 2] = 2 * c[2];
  }
  const double q1 = inner(e1, apply_static_dipole(S, e1)).real() / inner(e1, e1).real();
  const double q2 = inner(e2, apply_static_dipole(S, e2)).real() / inner(e2, e2).real();
  EXPECT_NEAR(q1, 1.0 / 3.0, 0.05 / 3.0);
  EXPECT_NEAR(q2, 2.0 / 5.0, 0.05 * 2.0 / 5.0);
}

TEST(Kernel, GradientFieldsApproachEigenvalueMinusOne) {
  // E = grad exp(-r^2 / 2 s^2), s = R/5: ||(G + I) E|| / ||E|| shrinks as kd -> 0.
  double prev = 1e9;
  for (double div : {6.0, 10.0, 14.0}) {
    const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(1.0, 0.0)}, 1.0 / div);
    const DyadicOperator G(g);
    const double s = 0.2;
    Field E(G.dim());
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 c = g.center(n);
      const double f = std::exp(-dot(c, c) / (2 * s * s)) / (s * s);
      for (int k = 0; k < 3; ++k) E[3 * n + static_cast<std::size_t>(k)] = -c[static_cast<std::size_t>(k)] * f;
    }
    Field y = G.apply(E);
    axpy(1.0, E, y);
    const double ratio = norm2(y) / norm2(E);
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
  EXPECT_LT(prev, 0.25);
}

TEST(Kernel, GammaSIsPositive) {
  const DyadicOperator GS(voxelize(ShapeSpec{Shape::sphere(1.5, 0.0)}, 0.25), KernelKind::GammaS);
  for (int t = 0; t < 5; ++t) {
    const Field E = random_field(GS.dim(), 70 + static_cast<unsigned>(t));
    const cplx q = inner(E, GS.apply(E));
    EXPECT_GE(q.real(), -1e-12 * norm2(E) * norm2(E));
    EXPECT_LT(std::abs(q.imag()), 1e-12 * norm2(E) * norm2(E));
  }
}

TEST(Kernel, GammaSTopEigenvalueBelowLommelMax) {
  for (double kR : {0.5, 1.0}) {
    const DyadicOperator GS(voxelize(ShapeSpec{Shape::sphere(kR, 0.0)}, kR / 8), KernelKind::GammaS);
    const double top = estimate_norm(GS.as_map(), symmetric_adjoint(GS.as_map()), GS.dim());
    double lom = 0.0;
    for (int l = 0; l <= 10; ++l) lom = std::max(lom, specfun::lommel_integral(l, kR));
    EXPECT_LE(top, lom * 1.05);
    EXPECT_GE(top, 0.6 * lom);
  }
}

TEST(Kernel, ScalarOperator) {
  const VoxelGrid g = random_box(1);
  const ScalarOperator C(g);
  ScalarField u(C.dim());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (auto& v : u) v = {nd(rng), nd(rng)};
  const ScalarField a = C.apply(u);
  const Eigen::MatrixXcd M = C.dense();
  const Eigen::VectorXcd b = M * Eigen::Map<const Eigen::VectorXcd>(u.data(), static_cast<Eigen::Index>(u.size()));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[static_cast<Eigen::Index>(i)]);
    den += std::norm(b[static_cast<Eigen::Index>(i)]);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-12);
  EXPECT_EQ(apply_scalar_born(C, 0.0, u), u);
}

TEST(Kernel, ScalarNewtonPotential) {
  // k -> 0: int_{|r|<R} 1/(4 pi r) d^3r = R^2/2 at the center; here k = 1 and kR = 0.1.
  const double R = 0.1;
  const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(R, 0.0)}, R / 12);
  const ScalarOperator C(g);
  const ScalarField u(C.dim(), 1.0);
  const ScalarField v = C.apply(u);
  std::size_t centre = 0;
  double best = 1e9;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (norm(g.center(n)) < best) {
      best = norm(g.center(n));
      centre = n;
    }
  }
  EXPECT_NEAR(v[centre].real() / (R * R / 2), 1.0, 0.03);
}
