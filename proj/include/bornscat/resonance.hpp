#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bornscat/types.hpp"

// Mie resonance denominators of the ball (TE, TM) and the infinite cylinder
// at normal incidence (parallel and perpendicular polarizations), in k = 1
// units. Every function is evaluated through entire ratios of the interior
// Bessel functions, so no square root of 1 + chi is ever taken.
namespace bornscat::resonance {

enum class Family { TE, TM, CylPar, CylPerp };

std::string family_name(Family f);
Family parse_family(const std::string& s);

inline constexpr int kMMax = 100;

// f_l(chi) = [(1+chi) kR^2]^{-l/2} [eps j_l(n kR) (x h_l)'(kR) - h_l(kR) (y j_l)'(n kR)]
// with eps = 1 (TE) or 1 + chi (TM).
cplx f_TE(int ell, cplx chi, double kR);
cplx f_TM(int ell, cplx chi, double kR);
// (kR)^l f_l: O(1) for all l, the form used for roots and amplification.
cplx f_TE_scaled(int ell, cplx chi, double kR);
cplx f_TM_scaled(int ell, cplx chi, double kR);

// [sqrt(1+chi) J_m'(n kR) H_m(kR) - J_m(n kR) H_m'(kR)] / (1+chi)^{m/2}
cplx f_cyl_par(int m, cplx chi, double kR);
// [J_m'(n kR) H_m(kR) - sqrt(1+chi) J_m(n kR) H_m'(kR)] / (1+chi)^{(m-1)/2}
cplx f_cyl_perp(int m, cplx chi, double kR);

// The function whose zeros are searched: scaled f for TE/TM, f for the cylinder.
cplx denominator(Family f, int index, cplx chi, double kR);

// Two-term large-order expansions.
cplx heur_exp_TM(int ell, cplx chi, double kR);
cplx asymptotic_root_TM(int ell, double kR);
cplx cyl_par_asymptotic(int m, cplx chi, double kR);
cplx cyl_perp_asymptotic(int m, cplx chi, double kR);

// zeta = (n^2 - 1)^2 / (n^2 + 1) = chi^2 / (chi + 2).
cplx zeta(cplx chi);

struct ResonanceMode {
  Family family = Family::TM;
  int index = 1;
  cplx chi;
  cplx lambda;
  double residual = 0.0;  // |denominator| at the root
  double kR = 0.0;
};

// Search window in the lambda = 1/chi plane. The cells touching the square
// |Re lambda|, |Im lambda| <= exclude are left out.
struct RootSearch {
  double re_min = -1.2;
  double re_max = 0.6;
  double im_min = -0.1;
  double im_max = 1.0;
  int nx = 600;
  int ny = 400;
  double exclude = 0.01;
  int newton_max = 50;
  double newton_tol = 1e-12;
  double residual_tol = 1e-10;
  double dedup = 1e-8;
};

class IncompleteSearchError : public Error {
 public:
  IncompleteSearchError(const std::string& what, int index) : Error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

// Roots for one index, sorted by Re lambda. Throws IncompleteSearchError when
// the boundary winding number differs from the number of roots found.
std::vector<ResonanceMode> find_roots(Family f, int index, double kR, const RootSearch& s = {});
// Indices lo..hi, sorted by index then Re lambda.
std::vector<ResonanceMode> find_roots(Family f, int lo, int hi, double kR, const RootSearch& s = {});
// Zeros minus poles enclosed by the search region.
int winding_number(Family f, int index, double kR, const RootSearch& s = {});

// A_l = 1 / |(kR)^l f_TM_l(chi)|; +infinity at an exact root.
double amplification_A(int ell, cplx chi, double kR);

struct ClusterStats {
  int near_zero = 0;  // |lambda| < eps
  int near_half = 0;  // |lambda + 1/2| < eps
};
ClusterStats cluster_statistics(const std::vector<ResonanceMode>& modes, double eps);

// family,index,re_lambda,im_lambda,re_chi,im_chi,residual
void write_roots_csv(std::ostream& os, const std::vector<ResonanceMode>& modes);
// chi_re,chi_im,ell,A
void write_amap_csv(std::ostream& os, double kR, const std::vector<cplx>& chis, int lmax);

}  // namespace bornscat::resonance
