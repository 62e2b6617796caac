#pragma once

#include <string>
#include <vector>

#include "bornscat/kernel.hpp"

namespace bornscat {

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
// uniform phi grid. Integrates Y_lm exactly for l <= 2 n_theta - 1 and
// |m| <= n_phi - 1.
struct AngularGrid {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to 4 pi
  int n_theta = 0;
  int n_phi = 0;

  static AngularGrid gauss_product(int n_theta, int n_phi);
  // 32 x 64, doubled for kR_V > 4.
  static AngularGrid default_for(double kRV);
  std::size_t size() const { return nodes.size(); }
};

// Weighted point set carrying the polarization sources: voxel centers with
// weight kd^3, or the nodes of a continuum quadrature.
struct Scatterer {
  std::vector<Vec3> points;
  std::vector<double> weights;
  std::vector<cplx> chi;

  static Scatterer from_grid(const VoxelGrid& grid);
  std::size_t size() const { return points.size(); }
};

// f(n) = -(k^2/4 pi) n x [n x sum_j chi_j E_j exp(ik n.r_j) w_j].
std::vector<Vec3c> far_amplitude(const Scatterer& s, const Field& E, const AngularGrid& quad);
std::vector<Vec3c> far_amplitude(const Scatterer& s, const Field& E, const std::vector<Vec3>& directions);
double sigma_sc(const std::vector<Vec3c>& f, const AngularGrid& quad);
// -k sum_j Im(chi_j) |E_j|^2 w_j.
double sigma_abs(const Scatterer& s, const Field& E);
// (4 pi/k) Im[-(k^2/4 pi) sum_j chi_j <E_inc,j, E_j> w_j].
double sigma_ext(const Scatterer& s, const Field& E, const Field& Einc);
// |ext - sc - abs| / max(ext, tiny); 0 when all three vanish.
double optical_theorem_residual(double ext, double sc, double abs);
// sum |E|^2 w / sum |E_inc|^2 w.
double eer(const Field& E, const Field& Einc);
double eer(const Scatterer& s, const Field& E, const Field& Einc);

struct CrossSectionReport {
  double sigma_sc = 0.0;
  double sigma_abs = 0.0;
  double sigma_ext = 0.0;
  double got_residual = 0.0;
  double eer = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};

CrossSectionReport cross_sections(const Scatterer& s, const Field& E, const Field& Einc, const AngularGrid& quad);
CrossSectionReport cross_sections(const VoxelGrid& grid, const Field& E, const Field& Einc);

// Second route to sigma_sc: kd^3 Im<G P, P> with P = chi E.
double sigma_sc_operator(const DyadicOperator& G, const Field& E);
// (1/16 pi^2) int |n x sum_j E_j exp(i n.r_j) kd^3|^2 dOmega; equals
// kd^3 Im<G E, E> up to the self-term discretization.
double farfield_quadratic_form(const VoxelGrid& grid, const Field& E, const AngularGrid& quad);

}  // namespace bornscat
