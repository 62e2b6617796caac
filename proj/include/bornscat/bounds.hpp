#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bornscat/kernel.hpp"

namespace bornscat {

// Geometric inputs of the analytic bounds (k = 1 units).
struct GeometryFunctionals {
  double kRV = 0.0;  // circumscribed radius
  double krV = 0.0;  // inscribed radius
  double k3V = 0.0;  // volume
};

GeometryFunctionals measure_geometry(const VoxelGrid& grid);

struct BoundReport {
  GeometryFunctionals geometry;
  double gamma_HS = 0.0;  // Hilbert-Schmidt norm of the wave correction
  double gamma_HS_err = 0.0;  // two-sigma Monte Carlo error
  double area_bound = 0.0;  // (3/(5 pi)) (k^3 V)^{2/3}
  double circ_bound = 0.0;  // 3 sqrt2 kR_V
  double bessel_bound = 0.0;  // (5/8) kR_V
  double vol_bound = 0.0;  // k^3 V / (4 pi)
  double gammaC_bound = 0.0;  // min(area, circ)
  double gammaS_bound = 0.0;  // min(vol, area, bessel)
  double gamma_bound = 0.0;  // gammaC_bound + gammaS_bound
  double g_upper = 0.0;  // 1 + gamma_bound
  double g_lower = 0.0;  // (sqrt2/3) kr_V, lower bound on ||G + I||
};

// Closed-form bounds for the given functionals; gamma_HS left at zero.
BoundReport analytic_bounds(const GeometryFunctionals& geo);
// Bounds from the voxel geometry, with the Hilbert-Schmidt norm estimated by
// Monte Carlo over `samples` point pairs (0 skips it).
BoundReport analytic_bounds(const VoxelGrid& grid, std::size_t samples = 1000000, std::uint64_t seed = 7);

struct HSEstimate {
  double value = 0.0;
  double err2sigma = 0.0;
};
// sqrt of int_V int_V |k^2 g 1 + grad grad (g - 1/(4 pi R))|_F^2.
HSEstimate gamma_hilbert_schmidt(const VoxelGrid& grid, std::size_t samples, std::uint64_t seed);

struct Solvability {
  bool certified = false;
  std::string criterion;  // dissipative | neumann | gamma-disk | gamma-dist | gs-disk | gc-disk | none
  double inverse_norm = 0.0;  // bound on ||(I - chi G)^{-1}||; 0 when absent
};

// First criterion that certifies invertibility of I - chi G. gamma_norm < 0
// uses report.gamma_bound.
Solvability solvable_region(cplx chi, const BoundReport& report, double gamma_norm = -1.0);

// ||A|| by power iteration on A^H A from a fixed-seed random start.
double estimate_norm(const LinearMap& A, const LinearMap& A_adjoint, std::size_t dim, int iterations = 200,
                     double rtol = 1e-8, std::uint64_t seed = 1);
// Adjoint of a complex-symmetric map: A^H x = conj(A conj(x)).
LinearMap symmetric_adjoint(const LinearMap& A);

// max(analytic g_upper, measured ||G||): used as ||G||_est by the solvers.
double g_norm_estimate(const DyadicOperator& G);

struct RitzResult {
  std::vector<cplx> values;
  std::vector<double> residuals;
  int subspace = 0;
  bool breakdown = false;
};

// m-step Arnoldi Ritz values (m <= 300).
RitzResult estimate_spectrum(const LinearMap& A, std::size_t dim, int m, std::uint64_t seed = 1);

struct GammaSCheck {
  int trials = 0;
  double min_quadratic_form = 0.0;  // min over trials of Im<GE,E>/<E,E>
  double max_route_mismatch = 0.0;  // max relative gap between operator and far-field routes
  std::vector<double> operator_route;
  std::vector<double> farfield_route;
};

// Im<GE,E> >= 0 and Im<GE,E> = (k^3/16 pi^2) int |n x E~(kn)|^2 dOmega on random fields.
GammaSCheck gammaS_positivity_check(const DyadicOperator& G, int trials, std::uint64_t seed = 3);

// ||(D + gamma) E||^2 on the ball for E = e_z exp(ikr)/(i r sqrt(4 pi R)):
// the closed form and an independent radial quadrature of the same quantity.
double witness_norm_closed_form(double kR);
double witness_norm_quadrature(double kR, int nodes = 400);

}  // namespace bornscat
