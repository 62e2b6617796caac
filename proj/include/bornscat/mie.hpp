#pragma once

#include <utility>
#include <vector>

#include "bornscat/farfield.hpp"
#include "bornscat/types.hpp"

// Interior Mie fields of a homogeneous ball centered at the origin (k = 1).
//
// Basis: M_lm = curl(r j_l(r) Y_lm) and N_lm = curl curl(r j_l(r) Y_lm) in
// vacuum; inside the ball j_l(r) is replaced by j_l(n r)/n^l with n^2 = 1+chi,
// which is entire in chi.
namespace bornscat::mie {

int default_lmax(double kR);

struct MultipoleCoefficients {
  int lmax = 0;
  // E_inc = sum a_lm M_lm + b_lm N_lm, stored at index(l, m).
  std::vector<cplx> a;
  std::vector<cplx> b;
  double residual = 0.0;  // relative RMS of the reconstruction on the check sphere
  bool truncation_warning = false;

  static std::size_t index(int ell, int m) { return static_cast<std::size_t>(ell * ell + ell + m - 1); }
  cplx a_at(int ell, int m) const { return a[index(ell, m)]; }
  cplx b_at(int ell, int m) const { return b[index(ell, m)]; }
};

// Coefficients of e exp(-i z) (e normal to z) by projection onto the vector
// multipoles. The reconstruction residual is measured on |r| = check_radius.
MultipoleCoefficients plane_wave_coefficients(int lmax, const Vec3c& polarization, double check_radius = 0.7);

// Reconstruct the vacuum expansion at the given points.
Field vacuum_field(const MultipoleCoefficients& c, const std::vector<Vec3>& points);

// TE: j_l(r) X_lm; TM: curl(j_l X_lm), with X_lm = L Y_lm / sqrt(l(l+1)).
Vec3c vacuum_multipole(int ell, int m, bool transverse_magnetic, const Vec3& r);

class NearResonanceError : public Error {
 public:
  NearResonanceError(const std::string& what, int ell, bool tm) : Error(what), ell_(ell), tm_(tm) {}
  int ell() const { return ell_; }
  bool transverse_magnetic() const { return tm_; }

 private:
  int ell_;
  bool tm_;
};

// Internal field at points with |r| < kR.
Field mie_internal_field(double kR, cplx chi, const MultipoleCoefficients& c, const std::vector<Vec3>& points);

// TE part: projection onto X_lm for l <= lmax under the quadrature; TM part:
// the remainder. Fields are sampled at r * quad.nodes.
std::pair<Field, Field> te_tm_split(const AngularGrid& quad, const Field& E, int lmax);

// Product Gauss rule on the ball (radial GL x GL in cos theta x uniform phi),
// with chi attached to every node.
Scatterer ball_quadrature(double kR, cplx chi, int n_r, int n_theta, int n_phi);

}  // namespace bornscat::mie
