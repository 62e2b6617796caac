#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bornscat/types.hpp"

namespace bornscat {

// y = A x for a square operator on fields of fixed length.
using LinearMap = std::function<void(const Field& x, Field& y)>;

// <a, b> = sum conj(a_i) b_i with a fixed pairwise summation tree.
cplx inner(const Field& a, const Field& b);
double norm2(const Field& a);
double sum_pairwise(const std::vector<double>& v);

void axpy(cplx a, const Field& x, Field& y);
void scale(cplx a, Field& x);
Field random_field(std::size_t n, std::uint64_t seed);

// Worker threads used by parallel loops. Results never depend on this value.
void set_num_threads(int n);
int num_threads();
// Default from the BORNSCAT_THREADS environment variable, else 1.
int default_num_threads();
void parallel_for(std::size_t n, const std::function<void(std::size_t begin, std::size_t end)>& body);

struct GmresOptions {
  int restart = 60;
  double tol = 1e-8;
  int max_iter = 2000;
};

struct GmresResult {
  Field x;
  int iterations = 0;
  double residual = 0.0;  // true relative residual ||b - A x|| / ||b||
  bool converged = false;
};

// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
GmresResult gmres(const LinearMap& A, const Field& b, const GmresOptions& opt, const Field* x0 = nullptr);

class NoConvergenceError : public Error {
 public:
  NoConvergenceError(const std::string& what, Field best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}
  const Field& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  Field best_;
  double residual_;
};

}  // namespace bornscat
