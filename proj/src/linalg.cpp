#include "bornscat/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace bornscat {

namespace {

std::atomic<int> g_threads{0};

template <class T, class F>
T pairwise(std::size_t lo, std::size_t hi, const F& term) {
  if (hi - lo <= 32) {
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise<T>(lo, mid, term) + pairwise<T>(mid, hi, term);
}

}  // namespace

cplx inner(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw DimensionError("inner product of fields with different lengths");
  return pairwise<cplx>(0, a.size(), [&](std::size_t i) { return std::conj(a[i]) * b[i]; });
}

double norm2(const Field& a) {
  return std::sqrt(pairwise<double>(0, a.size(), [&](std::size_t i) { return std::norm(a[i]); }));
}

double sum_pairwise(const std::vector<double>& v) {
  return pairwise<double>(0, v.size(), [&](std::size_t i) { return v[i]; });
}

void axpy(cplx a, const Field& x, Field& y) {
  if (x.size() != y.size()) throw DimensionError("axpy on fields with different lengths");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(cplx a, Field& x) {
  for (auto& v : x) v *= a;
}

Field random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Field f(n);
  for (auto& v : f) {
    const double re = nd(rng);
    const double im = nd(rng);
    v = {re, im};
  }
  return f;
}

int default_num_threads() {
  if (const char* env = std::getenv("BORNSCAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void set_num_threads(int n) { g_threads = std::max(1, n); }

int num_threads() {
  int n = g_threads.load();
  if (n <= 0) {
    n = default_num_threads();
    g_threads = n;
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), n);
  if (workers <= 1) {
    if (n > 0) body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

GmresResult gmres(const LinearMap& A, const Field& b, const GmresOptions& opt, const Field* x0) {
  const std::size_t n = b.size();
  const int m = std::max(1, opt.restart);
  GmresResult res;
  res.x = x0 ? *x0 : Field(n, cplx{0.0});
  if (res.x.size() != n) throw DimensionError("gmres: initial guess has wrong length");
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, cplx{0.0});
    res.converged = true;
    return res;
  }
  Field r(n);
  Field w(n);
  std::vector<Field> V(static_cast<std::size_t>(m) + 1, Field(n));
  std::vector<std::vector<cplx>> H(static_cast<std::size_t>(m) + 1, std::vector<cplx>(static_cast<std::size_t>(m), cplx{0.0}));
  std::vector<cplx> cs(static_cast<std::size_t>(m));
  std::vector<cplx> sn(static_cast<std::size_t>(m));
  std::vector<cplx> g(static_cast<std::size_t>(m) + 1);

  auto true_residual = [&](const Field& x) {
    A(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    return norm2(r);
  };

  double beta = true_residual(res.x);
  Field best = res.x;
  double best_res = beta / bnorm;
  while (res.iterations < opt.max_iter) {
    if (beta / bnorm <= opt.tol) break;
    V[0] = r;
    scale(1.0 / beta, V[0]);
    std::fill(g.begin(), g.end(), cplx{0.0});
    g[0] = beta;
    int j = 0;
    for (; j < m && res.iterations < opt.max_iter; ++j) {
      ++res.iterations;
      A(V[static_cast<std::size_t>(j)], w);
      for (int i = 0; i <= j; ++i) {
        const cplx h = inner(V[static_cast<std::size_t>(i)], w);
        H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = h;
        axpy(-h, V[static_cast<std::size_t>(i)], w);
      }
      const double hn = norm2(w);
      H[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(j)] = hn;
      if (hn > 0.0) {
        V[static_cast<std::size_t>(j) + 1] = w;
        scale(1.0 / hn, V[static_cast<std::size_t>(j) + 1]);
      }
      for (int i = 0; i < j; ++i) {
        auto& hi = H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        auto& hi1 = H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(j)];
        const cplx t = std::conj(cs[static_cast<std::size_t>(i)]) * hi + std::conj(sn[static_cast<std::size_t>(i)]) * hi1;
        hi1 = -sn[static_cast<std::size_t>(i)] * hi + cs[static_cast<std::size_t>(i)] * hi1;
        hi = t;
      }
      auto& hjj = H[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
      auto& hj1 = H[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(j)];
      const double den = std::hypot(std::abs(hjj), std::abs(hj1));
      if (den == 0.0) {
        cs[static_cast<std::size_t>(j)] = 1.0;
        sn[static_cast<std::size_t>(j)] = 0.0;
      } else {
        cs[static_cast<std::size_t>(j)] = hjj / den;
        sn[static_cast<std::size_t>(j)] = hj1 / den;
      }
      hjj = den;
      hj1 = 0.0;
      g[static_cast<std::size_t>(j) + 1] = -sn[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(j)];
      g[static_cast<std::size_t>(j)] = std::conj(cs[static_cast<std::size_t>(j)]) * g[static_cast<std::size_t>(j)];
      if (std::abs(g[static_cast<std::size_t>(j) + 1]) / bnorm <= 0.5 * opt.tol || hn == 0.0) {
        ++j;
        break;
      }
    }
    // Back substitution for the least-squares coefficients.
    std::vector<cplx> y(static_cast<std::size_t>(j));
    for (int i = j - 1; i >= 0; --i) {
      cplx s = g[static_cast<std::size_t>(i)];
      for (int k = i + 1; k < j; ++k) s -= H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
      y[static_cast<std::size_t>(i)] = s / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < j; ++i) axpy(y[static_cast<std::size_t>(i)], V[static_cast<std::size_t>(i)], res.x);
    const double prev = beta;
    beta = true_residual(res.x);
    if (beta / bnorm < best_res) {
      best_res = beta / bnorm;
      best = res.x;
    }
    if (beta >= prev * (1.0 - 1e-14) && j == m) break;  // stagnation over a full cycle
  }
  res.residual = beta / bnorm;
  res.converged = res.residual <= opt.tol;
  if (!res.converged && best_res < res.residual) {
    res.x = best;
    res.residual = best_res;
  }
  return res;
}

}  // namespace bornscat
