#pragma once

#include <Eigen/Dense>
#include <memory>

#include "bornscat/geometry.hpp"
#include "bornscat/linalg.hpp"

namespace bornscat {

using Mat3c = Eigen::Matrix3cd;

// Which part of the dyadic operator a table represents.
//   Full    G, the digitized Green operator (Born operator is I - chi G)
//   Static  the k -> 0 limit of G (so I - D = -Static)
//   Gamma   G - Static, the wave correction
//   GammaS  -Im G, the sin-kernel part; Im<GE,E> = <GammaS E, E>
enum class KernelKind { Full, Static, Gamma, GammaS };

// Off-diagonal block kd^3 (k^2 g + grad grad g) at lattice offset n != 0,
// g = exp(-ikR)/(4 pi R). k = 0 gives the static dipole block.
Mat3c dyadic_kernel(double kd, const Index3& offset, double k = 1.0);
// -Im of dyadic_kernel, evaluated through j_0, j_1, j_2 so it stays accurate as kR -> 0.
Mat3c dyadic_kernel_sin(double kd, const Index3& offset);

// Diagonal value of G: -1/3 from the principal-value dyadic plus
// (2/3)(exp(-ika)(1+ika) - 1), the regular part over the sphere of radius
// a = kd (3/4pi)^{1/3} that has the voxel's volume.
cplx self_term(double kd);
// k^2 int_{|r|<a} exp(-ikr)/(4 pi r) d^3r = exp(-ika)(1+ika) - 1.
cplx scalar_self_term(double kd);
// Diagonal value of a given kernel kind.
cplx self_value(double kd, KernelKind kind);

// Block-Toeplitz operator on a voxel grid, applied with zero-padded FFTs.
class DyadicOperator {
 public:
  DyadicOperator(const VoxelGrid& grid, KernelKind kind = KernelKind::Full);
  ~DyadicOperator();
  DyadicOperator(const DyadicOperator&) = delete;
  DyadicOperator& operator=(const DyadicOperator&) = delete;

  const VoxelGrid& grid() const { return grid_; }
  KernelKind kind() const { return kind_; }
  std::size_t dim() const { return 3 * grid_.size(); }

  void apply(const Field& x, Field& y) const;
  Field apply(const Field& x) const;
  // Direct O(N^2) sum, used as an oracle for small grids.
  void apply_direct(const Field& x, Field& y) const;
  // Dense 3N x 3N matrix; throws DimensionError above kDenseCap voxels.
  Eigen::MatrixXcd dense() const;
  // Kernel block for the offset between two occupied voxels (self block on the diagonal).
  Mat3c block(const Index3& offset) const;

  // Max deviation between the spatial table and its forward+inverse transform.
  double roundtrip_error() const;

  LinearMap as_map() const;

  static constexpr std::size_t kDenseCap = 4096;

 private:
  struct Impl;
  VoxelGrid grid_;
  KernelKind kind_;
  std::unique_ptr<Impl> impl_;
};

// Scalar kernel kd^3 exp(-ikR)/(4 pi R) with the self value scalar_self_term:
// apply returns k^2 C u, so the scalar Born operator is u - chi k^2 C u.
class ScalarOperator {
 public:
  explicit ScalarOperator(const VoxelGrid& grid);
  ~ScalarOperator();
  ScalarOperator(const ScalarOperator&) = delete;
  ScalarOperator& operator=(const ScalarOperator&) = delete;

  std::size_t dim() const { return grid_.size(); }
  void apply(const ScalarField& u, ScalarField& v) const;
  ScalarField apply(const ScalarField& u) const;
  Eigen::MatrixXcd dense() const;

 private:
  struct Impl;
  VoxelGrid grid_;
  std::unique_ptr<Impl> impl_;
};

// Born operator (I - chi G) E with chi taken per voxel from the grid.
void apply_born(const DyadicOperator& G, const Field& E, Field& out);
Field apply_born(const DyadicOperator& G, const Field& E);
// Same with a single susceptibility for every voxel.
Field apply_born(const DyadicOperator& G, cplx chi, const Field& E);
// (I - D) E = -G_static E.
Field apply_static_dipole(const DyadicOperator& G_static, const Field& E);
ScalarField apply_scalar_born(const ScalarOperator& C, cplx chi, const ScalarField& u);

}  // namespace bornscat
