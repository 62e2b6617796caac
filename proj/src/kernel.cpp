#include "bornscat/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "bornscat/specfun.hpp"

namespace bornscat {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : size(n), data(static_cast<cplx*>(fftw_malloc(sizeof(cplx) * n))) {
    if (!data) throw Error("fftw_malloc failed");
    std::fill(data, data + n, cplx{0.0});
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* raw() { return reinterpret_cast<fftw_complex*>(data); }
  std::size_t size;
  cplx* data;
};

// Zero-padded circulant embedding of a Toeplitz convolution on the bounding box.
class Circulant {
 public:
  explicit Circulant(const Index3& dims) : dims_(dims) {
    for (int a = 0; a < 3; ++a) pad_[a] = 2 * dims[a];
    total_ = static_cast<std::size_t>(pad_[0]) * pad_[1] * pad_[2];
    FftwBuffer tmp(total_);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fwd_ = fftw_plan_dft_3d(pad_[0], pad_[1], pad_[2], tmp.raw(), tmp.raw(), FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(pad_[0], pad_[1], pad_[2], tmp.raw(), tmp.raw(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw Error("FFTW plan creation failed");
  }
  ~Circulant() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Circulant(const Circulant&) = delete;
  Circulant& operator=(const Circulant&) = delete;

  std::size_t total() const { return total_; }
  const Index3& pad() const { return pad_; }
  const Index3& dims() const { return dims_; }

  std::size_t padded_index(int i, int j, int k) const {
    auto wrap = [](int v, int p) { return v < 0 ? v + p : v; };
    return (static_cast<std::size_t>(wrap(i, pad_[0])) * pad_[1] + wrap(j, pad_[1])) * pad_[2] + wrap(k, pad_[2]);
  }

  void forward(FftwBuffer& b) const { fftw_execute_dft(fwd_, b.raw(), b.raw()); }
  void backward(FftwBuffer& b) const { fftw_execute_dft(bwd_, b.raw(), b.raw()); }

  // Fills a buffer with f(offset) over all offsets in [-(n-1), n-1]^3.
  template <class F>
  void fill_table(FftwBuffer& b, const F& f) const {
    for (int i = -(dims_[0] - 1); i <= dims_[0] - 1; ++i) {
      for (int j = -(dims_[1] - 1); j <= dims_[1] - 1; ++j) {
        for (int k = -(dims_[2] - 1); k <= dims_[2] - 1; ++k) {
          b.data[padded_index(i, j, k)] = f(Index3{i, j, k});
        }
      }
    }
  }

 private:
  Index3 dims_;
  Index3 pad_;
  std::size_t total_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

constexpr int kComp[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
constexpr int kSlot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

double equivalent_radius(double kd) { return kd * std::cbrt(3.0 / (4.0 * kPi)); }

Mat3c block_for(double kd, const Index3& d, KernelKind kind) {
  if (d[0] == 0 && d[1] == 0 && d[2] == 0) return self_value(kd, kind) * Mat3c::Identity();
  switch (kind) {
    case KernelKind::Full:
      return dyadic_kernel(kd, d, 1.0);
    case KernelKind::Static:
      return dyadic_kernel(kd, d, 0.0);
    case KernelKind::Gamma:
      return dyadic_kernel(kd, d, 1.0) - dyadic_kernel(kd, d, 0.0);
    case KernelKind::GammaS:
      return dyadic_kernel_sin(kd, d);
  }
  return Mat3c::Zero();
}

cplx scalar_block(double kd, const Index3& d) {
  if (d[0] == 0 && d[1] == 0 && d[2] == 0) return scalar_self_term(kd);
  const double R = kd * std::sqrt(static_cast<double>(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]));
  return kd * kd * kd * std::exp(-kI * R) / (4.0 * kPi * R);
}

}  // namespace

Mat3c dyadic_kernel(double kd, const Index3& n, double k) {
  if (n[0] == 0 && n[1] == 0 && n[2] == 0) throw DomainError("dyadic_kernel: zero offset, use self_term");
  const Vec3 r{n[0] * kd, n[1] * kd, n[2] * kd};
  const double R = norm(r);
  const Eigen::Vector3d u(r[0] / R, r[1] / R, r[2] / R);
  const double x = k * R;
  const cplx pref = kd * kd * kd * std::exp(-kI * x) / (4.0 * kPi * R * R * R);
  const cplx a = x * x - kI * x - 1.0;
  const cplx b = -x * x + 3.0 * kI * x + 3.0;
  Mat3c m = a * Mat3c::Identity() + b * (u * u.transpose()).cast<cplx>();
  return pref * m;
}

Mat3c dyadic_kernel_sin(double kd, const Index3& n) {
  if (n[0] == 0 && n[1] == 0 && n[2] == 0) throw DomainError("dyadic_kernel_sin: zero offset");
  const Vec3 r{n[0] * kd, n[1] * kd, n[2] * kd};
  const double R = norm(r);
  const Eigen::Vector3d u(r[0] / R, r[1] / R, r[2] / R);
  const auto j = specfun::spherical_j_array(2, cplx{R});
  const double j0 = j[0].real();
  const double j1 = j[1].real();
  const double j2 = j[2].real();
  const double pref = kd * kd * kd / (4.0 * kPi);
  Eigen::Matrix3d m = (j0 - j1 / R) * Eigen::Matrix3d::Identity() + j2 * (u * u.transpose());
  return (pref * m).cast<cplx>();
}

cplx scalar_self_term(double kd) {
  if (!(kd > 0.0)) throw DomainError("self term needs kd > 0");
  const double a = equivalent_radius(kd);
  return std::exp(-kI * a) * (1.0 + kI * a) - 1.0;
}

cplx self_term(double kd) { return -1.0 / 3.0 + (2.0 / 3.0) * scalar_self_term(kd); }

cplx self_value(double kd, KernelKind kind) {
  switch (kind) {
    case KernelKind::Full:
      return self_term(kd);
    case KernelKind::Static:
      return -1.0 / 3.0;
    case KernelKind::Gamma:
      return (2.0 / 3.0) * scalar_self_term(kd);
    case KernelKind::GammaS:
      return -self_term(kd).imag();
  }
  return 0.0;
}

struct DyadicOperator::Impl {
  explicit Impl(const Index3& dims) : circ(dims) {}
  Circulant circ;
  std::vector<std::unique_ptr<FftwBuffer>> spectra;  // 6 symmetric components
};

DyadicOperator::DyadicOperator(const VoxelGrid& grid, KernelKind kind)
    : grid_(grid), kind_(kind), impl_(std::make_unique<Impl>(grid.dims())) {
  const double kd = grid_.kd();
  const auto& circ = impl_->circ;
  // Tabulate each block once, then scatter its six entries.
  std::vector<std::unique_ptr<FftwBuffer>> tables;
  for (int c = 0; c < 6; ++c) tables.push_back(std::make_unique<FftwBuffer>(circ.total()));
  const auto& d = grid_.dims();
  for (int i = -(d[0] - 1); i <= d[0] - 1; ++i) {
    for (int j = -(d[1] - 1); j <= d[1] - 1; ++j) {
      for (int k = -(d[2] - 1); k <= d[2] - 1; ++k) {
        const Mat3c b = block_for(kd, {i, j, k}, kind_);
        const std::size_t p = circ.padded_index(i, j, k);
        for (int c = 0; c < 6; ++c) tables[static_cast<std::size_t>(c)]->data[p] = b(kComp[c][0], kComp[c][1]);
      }
    }
  }
  parallel_for(6, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) circ.forward(*tables[c]);
  });
  impl_->spectra = std::move(tables);
}

DyadicOperator::~DyadicOperator() = default;

Mat3c DyadicOperator::block(const Index3& offset) const { return block_for(grid_.kd(), offset, kind_); }

void DyadicOperator::apply(const Field& x, Field& y) const {
  const std::size_t n = grid_.size();
  if (x.size() != 3 * n) throw DimensionError("field length does not match the voxel grid");
  const auto& circ = impl_->circ;
  std::vector<std::unique_ptr<FftwBuffer>> buf;
  for (int c = 0; c < 3; ++c) buf.push_back(std::make_unique<FftwBuffer>(circ.total()));
  for (std::size_t v = 0; v < n; ++v) {
    const auto& cell = grid_.cell(v);
    const std::size_t p = circ.padded_index(cell[0], cell[1], cell[2]);
    for (int c = 0; c < 3; ++c) buf[static_cast<std::size_t>(c)]->data[p] = x[3 * v + static_cast<std::size_t>(c)];
  }
  parallel_for(3, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) circ.forward(*buf[c]);
  });
  const auto& S = impl_->spectra;
  parallel_for(circ.total(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      const cplx a0 = buf[0]->data[p];
      const cplx a1 = buf[1]->data[p];
      const cplx a2 = buf[2]->data[p];
      buf[0]->data[p] = S[0]->data[p] * a0 + S[1]->data[p] * a1 + S[2]->data[p] * a2;
      buf[1]->data[p] = S[1]->data[p] * a0 + S[3]->data[p] * a1 + S[4]->data[p] * a2;
      buf[2]->data[p] = S[2]->data[p] * a0 + S[4]->data[p] * a1 + S[5]->data[p] * a2;
    }
  });
  parallel_for(3, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) circ.backward(*buf[c]);
  });
  const double inv = 1.0 / static_cast<double>(circ.total());
  y.resize(3 * n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& cell = grid_.cell(v);
    const std::size_t p = circ.padded_index(cell[0], cell[1], cell[2]);
    for (int c = 0; c < 3; ++c) y[3 * v + static_cast<std::size_t>(c)] = buf[static_cast<std::size_t>(c)]->data[p] * inv;
  }
}

Field DyadicOperator::apply(const Field& x) const {
  Field y;
  apply(x, y);
  return y;
}

void DyadicOperator::apply_direct(const Field& x, Field& y) const {
  const std::size_t n = grid_.size();
  if (x.size() != 3 * n) throw DimensionError("field length does not match the voxel grid");
  y.assign(3 * n, cplx{0.0});
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
    for (std::size_t j = 0; j < n; ++j) {
      const auto& ci = grid_.cell(i);
      const auto& cj = grid_.cell(j);
      const Mat3c b = block({ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2]});
      acc += b * Eigen::Vector3cd(x[3 * j], x[3 * j + 1], x[3 * j + 2]);
    }
    for (int c = 0; c < 3; ++c) y[3 * i + static_cast<std::size_t>(c)] = acc(c);
  }
}

Eigen::MatrixXcd DyadicOperator::dense() const {
  const std::size_t n = grid_.size();
  if (n > kDenseCap) throw DimensionError("dense assembly is limited to 4096 voxels");
  const auto N = static_cast<Eigen::Index>(3 * n);
  Eigen::MatrixXcd M(N, N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& ci = grid_.cell(i);
      const auto& cj = grid_.cell(j);
      M.block<3, 3>(static_cast<Eigen::Index>(3 * i), static_cast<Eigen::Index>(3 * j)) =
          block({ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2]});
    }
  }
  return M;
}

double DyadicOperator::roundtrip_error() const {
  const auto& circ = impl_->circ;
  double err = 0.0;
  for (int c = 0; c < 6; ++c) {
    FftwBuffer b(circ.total());
    std::copy(impl_->spectra[static_cast<std::size_t>(c)]->data, impl_->spectra[static_cast<std::size_t>(c)]->data + circ.total(), b.data);
    circ.backward(b);
    const double inv = 1.0 / static_cast<double>(circ.total());
    const auto& d = grid_.dims();
    double scale_ref = 0.0;
    double diff = 0.0;
    for (int i = -(d[0] - 1); i <= d[0] - 1; ++i) {
      for (int j = -(d[1] - 1); j <= d[1] - 1; ++j) {
        for (int k = -(d[2] - 1); k <= d[2] - 1; ++k) {
          const cplx ref = block({i, j, k})(kComp[c][0], kComp[c][1]);
          const cplx got = b.data[circ.padded_index(i, j, k)] * inv;
          diff = std::max(diff, std::abs(got - ref));
          scale_ref = std::max(scale_ref, std::abs(ref));
        }
      }
    }
    err = std::max(err, scale_ref > 0.0 ? diff / scale_ref : diff);
  }
  return err;
}

LinearMap DyadicOperator::as_map() const {
  return [this](const Field& x, Field& y) { apply(x, y); };
}

struct ScalarOperator::Impl {
  explicit Impl(const Index3& dims) : circ(dims) {}
  Circulant circ;
  std::unique_ptr<FftwBuffer> spectrum;
};

ScalarOperator::ScalarOperator(const VoxelGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>(grid.dims())) {
  auto t = std::make_unique<FftwBuffer>(impl_->circ.total());
  const double kd = grid_.kd();
  impl_->circ.fill_table(*t, [&](const Index3& d) { return scalar_block(kd, d); });
  impl_->circ.forward(*t);
  impl_->spectrum = std::move(t);
}

ScalarOperator::~ScalarOperator() = default;

void ScalarOperator::apply(const ScalarField& u, ScalarField& v) const {
  const std::size_t n = grid_.size();
  if (u.size() != n) throw DimensionError("scalar field length does not match the voxel grid");
  const auto& circ = impl_->circ;
  FftwBuffer b(circ.total());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = grid_.cell(i);
    b.data[circ.padded_index(c[0], c[1], c[2])] = u[i];
  }
  circ.forward(b);
  for (std::size_t p = 0; p < circ.total(); ++p) b.data[p] *= impl_->spectrum->data[p];
  circ.backward(b);
  const double inv = 1.0 / static_cast<double>(circ.total());
  v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = grid_.cell(i);
    v[i] = b.data[circ.padded_index(c[0], c[1], c[2])] * inv;
  }
}

ScalarField ScalarOperator::apply(const ScalarField& u) const {
  ScalarField v;
  apply(u, v);
  return v;
}

Eigen::MatrixXcd ScalarOperator::dense() const {
  const std::size_t n = grid_.size();
  if (n > DyadicOperator::kDenseCap) throw DimensionError("dense assembly is limited to 4096 voxels");
  Eigen::MatrixXcd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& ci = grid_.cell(i);
      const auto& cj = grid_.cell(j);
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          scalar_block(grid_.kd(), {ci[0] - cj[0], ci[1] - cj[1], ci[2] - cj[2]});
    }
  }
  return M;
}

void apply_born(const DyadicOperator& G, const Field& E, Field& out) {
  G.apply(E, out);
  const auto& chi = G.grid().chi();
  for (std::size_t v = 0; v < chi.size(); ++v) {
    for (std::size_t c = 0; c < 3; ++c) out[3 * v + c] = E[3 * v + c] - chi[v] * out[3 * v + c];
  }
}

Field apply_born(const DyadicOperator& G, const Field& E) {
  Field out;
  apply_born(G, E, out);
  return out;
}

Field apply_born(const DyadicOperator& G, cplx chi, const Field& E) {
  Field out = G.apply(E);
  for (std::size_t i = 0; i < E.size(); ++i) out[i] = E[i] - chi * out[i];
  return out;
}

Field apply_static_dipole(const DyadicOperator& G_static, const Field& E) {
  if (G_static.kind() != KernelKind::Static) throw DomainError("apply_static_dipole needs a static kernel");
  Field out = G_static.apply(E);
  for (auto& v : out) v = -v;
  return out;
}

ScalarField apply_scalar_born(const ScalarOperator& C, cplx chi, const ScalarField& u) {
  ScalarField out = C.apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - chi * out[i];
  return out;
}

}  // namespace bornscat
