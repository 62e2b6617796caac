#pragma once

#include <vector>

#include "bornscat/types.hpp"

// Complex-argument Bessel-family functions. Everything here is a pure
// function of its arguments and may be called from any thread.
namespace bornscat::specfun {

inline constexpr int kEllMax = 200;

// log(n!!) for n >= -1, with (-1)!! = 0!! = 1.
double log_double_factorial(int n);

// Spherical Bessel j_l(z): power series for |z| <= 1, otherwise ratios
// from a Miller-type downward sweep anchored on the closed forms of j_0, j_1.
cplx spherical_j(int ell, cplx z);
// j_0 .. j_lmax in one sweep.
std::vector<cplx> spherical_j_array(int lmax, cplx z);

cplx spherical_y(int ell, cplx z);

// Spherical Hankel function of the second kind, h_l = j_l - i y_l
// (outgoing under exp(i omega t)). Upward recurrence from closed forms, so
// Re h_l carries only the absolute accuracy of h_l; use spherical_j for l > |z|.
cplx spherical_h2(int ell, cplx z);
std::vector<cplx> spherical_h2_array(int lmax, cplx z);

// H_l(z) = z^{l+1} h_l(z) / (2l-1)!!, finite as z -> 0 and free of
// overflow for large l. H_l(0) = i.
std::vector<cplx> scaled_h2_array(int lmax, cplx z);

// jhat_l(w) = j_l(z)/z^l with w = z^2, an entire function of w.
// Branch free: any square root of w gives the same value.
cplx entire_j_ratio(int ell, cplx w);
// d jhat_l / dw = -jhat_{l+1}(w)/2.
cplx entire_j_ratio_deriv(int ell, cplx w);
// (2l+1)!! * jhat_l(w); equals 1 at w = 0 and stays O(1) for |w| << l^2.
cplx scaled_j_ratio(int ell, cplx w);
// Largest |w| accepted by the entire-function evaluators.
inline constexpr double kEntireWMax = 1.0e6;

// Cylindrical Bessel J_m, Neumann Y_m and Hankel H_m^(2) = J_m - i Y_m.
cplx cyl_J(int m, cplx z);
cplx cyl_Y(int m, cplx z);
cplx cyl_H2(int m, cplx z);
std::vector<cplx> cyl_J_array(int mmax, cplx z);
std::vector<cplx> cyl_H2_array(int mmax, cplx z);

// Orthonormal Y_lm with the Condon-Shortley phase.
cplx spherical_harmonic(int ell, int m, double theta, double phi);

// int_0^x j_l(t)^2 t^2 dt.
double lommel_integral(int ell, double x);

// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
// degree 2n-1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace bornscat::specfun
