#include <gtest/gtest.h>

#include <cmath>

#include "bornscat/mie.hpp"
#include "bornscat/resonance.hpp"

using namespace bornscat;
using namespace bornscat::mie;

namespace {

const Vec3c kXPol{cplx{1.0}, cplx{0.0}, cplx{0.0}};

std::vector<Vec3> ball_points(double R, int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    const double r = R * std::cbrt(t) * 0.98;
    const double th = std::acos(1 - 2 * std::fmod(0.618034 * i, 1.0));
    const double ph = 2.399963 * i;
    pts.push_back({r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)});
  }
  return pts;
}

}  // namespace

TEST(Mie, DefaultOrder) {
  EXPECT_EQ(default_lmax(1.0), 13);
  EXPECT_GT(default_lmax(10.0), 10 + 8);
  EXPECT_THROW(default_lmax(0.0), DomainError);
}

TEST(Mie, PlaneWaveSelectsAzimuthalOrdersPlusMinusOne) {
  const auto c = plane_wave_coefficients(10, kXPol);
  for (int l = 1; l <= 10; ++l) {
    for (int m = -l; m <= l; ++m) {
      if (std::abs(m) == 1) {
        EXPECT_GT(std::abs(c.a_at(l, m)) + std::abs(c.b_at(l, m)), 1e-14);
      } else {
        EXPECT_LT(std::abs(c.a_at(l, m)) + std::abs(c.b_at(l, m)), 1e-13) << l << " " << m;
      }
    }
  }
}

TEST(Mie, ReconstructionAccuracy) {
  const auto c = plane_wave_coefficients(default_lmax(1.0), kXPol, 1.0);
  EXPECT_LT(c.residual, 1e-8);
  EXPECT_FALSE(c.truncation_warning);
  const auto pts = ball_points(1.0, 40);
  const Field E = vacuum_field(c, pts);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const cplx ph = std::exp(-kI * pts[p][2]);
    EXPECT_LT(std::abs(E[3 * p] - ph), 1e-8);
    EXPECT_LT(std::abs(E[3 * p + 1]), 1e-8);
    EXPECT_LT(std::abs(E[3 * p + 2]), 1e-8);
  }
  EXPECT_TRUE(plane_wave_coefficients(2, kXPol, 3.0).truncation_warning);
  EXPECT_THROW(plane_wave_coefficients(4, {cplx{1.0}, cplx{0.0}, cplx{1.0}}), DomainError);
}

TEST(Mie, ZeroContrastIsVacuum) {
  const auto c = plane_wave_coefficients(default_lmax(1.5), {cplx{0.0}, cplx{1.0}, cplx{0.0}}, 1.5);
  const auto pts = ball_points(1.5, 30);
  const Field E = mie_internal_field(1.5, 0.0, c, pts);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    EXPECT_LT(std::abs(E[3 * p + 1] - std::exp(-kI * pts[p][2])), 1e-8);
    EXPECT_LT(std::abs(E[3 * p]), 1e-8);
  }
  EXPECT_THROW(mie_internal_field(1.5, 0.0, c, {{0.0, 0.0, 1.5}}), DomainError);
}

TEST(Mie, InternalFieldIsEntireInContrast) {
  // chi across the branch cut of sqrt(1 + chi) on the negative real axis
  const auto c = plane_wave_coefficients(default_lmax(0.5), kXPol, 0.5);
  const auto pts = ball_points(0.5, 10);
  const Field a = mie_internal_field(0.5, cplx(-3.0, 1e-9), c, pts);
  const Field b = mie_internal_field(0.5, cplx(-3.0, -1e-9), c, pts);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-6);
}

TEST(Mie, OpticalTheoremFromMieField) {
  const double kR = 1.0;
  const cplx chi{0.5, -0.5};
  const auto c = plane_wave_coefficients(default_lmax(kR), kXPol, kR);
  const Scatterer s = ball_quadrature(kR, chi, 24, 24, 48);
  const Field E = mie_internal_field(kR, chi, c, s.points);
  Field Einc(E.size());
  for (std::size_t p = 0; p < s.size(); ++p) Einc[3 * p] = std::exp(-kI * s.points[p][2]);
  const CrossSectionReport r = cross_sections(s, E, Einc, AngularGrid::default_for(kR));
  EXPECT_LT(r.got_residual, 1e-10);
  EXPECT_GT(r.sigma_abs, 0.0);
}

TEST(Mie, BallQuadratureVolume) {
  const Scatterer s = ball_quadrature(2.0, 1.0, 8, 6, 12);
  double v = 0.0;
  for (double w : s.weights) v += w;
  EXPECT_NEAR(v, 4 * kPi / 3 * 8, 1e-12);
  EXPECT_EQ(s.size(), 8u * 6u * 12u);
}

TEST(Mie, VacuumMultipoles) {
  const Vec3 r{0.3, -0.4, 0.5};
  const Vec3c te = vacuum_multipole(2, 1, false, r);
  EXPECT_LT(std::abs(te[0] * r[0] + te[1] * r[1] + te[2] * r[2]), 1e-15);
  const Vec3c tm = vacuum_multipole(2, 1, true, r);
  EXPECT_GT(std::abs(tm[0] * r[0] + tm[1] * r[1] + tm[2] * r[2]), 1e-3);
  EXPECT_THROW(vacuum_multipole(0, 0, false, r), DomainError);
  EXPECT_THROW(vacuum_multipole(1, 2, false, r), DomainError);
}

TEST(Mie, TeTmSplit) {
  const AngularGrid q = AngularGrid::gauss_product(12, 24);
  Field te(3 * q.size()), tm(3 * q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Vec3c a = vacuum_multipole(3, -2, false, q.nodes[i]);
    const Vec3c b = vacuum_multipole(2, 1, true, q.nodes[i]);
    for (std::size_t k = 0; k < 3; ++k) {
      te[3 * i + k] = a[k];
      tm[3 * i + k] = b[k];
    }
  }
  Field sum = te;
  axpy(1.0, tm, sum);
  const auto [x, y] = te_tm_split(q, sum, 8);
  Field dx = x, dy = y;
  axpy(-1.0, te, dx);
  axpy(-1.0, tm, dy);
  EXPECT_LT(norm2(dx) / norm2(te), 1e-12);
  EXPECT_LT(norm2(dy) / norm2(tm), 1e-12);
  EXPECT_THROW(te_tm_split(q, sum, 20), DomainError);
}

TEST(Mie, NearResonanceRaises) {
  const auto roots = resonance::find_roots(resonance::Family::TM, 1, 0.5);
  ASSERT_FALSE(roots.empty());
  const auto c = plane_wave_coefficients(default_lmax(0.5), kXPol, 0.5);
  try {
    mie_internal_field(0.5, roots.front().chi, c, {{0.1, 0.0, 0.0}});
    FAIL() << "expected NearResonanceError";
  } catch (const NearResonanceError& e) {
    EXPECT_EQ(e.ell(), 1);
    EXPECT_TRUE(e.transverse_magnetic());
  }
}
