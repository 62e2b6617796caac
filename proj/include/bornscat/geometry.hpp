#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bornscat/types.hpp"

namespace bornscat {

using Index3 = std::array<int, 3>;

// One primitive of a shape union. Lengths are in units of 1/k.
struct Shape {
  enum class Kind { Sphere, Cylinder, Box, Mask };

  Kind kind = Kind::Sphere;
  Vec3 center{0.0, 0.0, 0.0};
  double radius = 1.0;  // sphere radius, cylinder radius
  double height = 1.0;  // cylinder length along z
  Vec3 size{1.0, 1.0, 1.0};  // box edge lengths
  std::string mask_path;  // Kind::Mask
  cplx chi{0.0, 0.0};

  static Shape sphere(double kR, cplx chi, Vec3 center = {0.0, 0.0, 0.0});
  static Shape cylinder(double krho, double kh, cplx chi, Vec3 center = {0.0, 0.0, 0.0});
  static Shape box(Vec3 size, cplx chi, Vec3 center = {0.0, 0.0, 0.0});
  static Shape mask(std::string path);

  bool operator==(const Shape&) const = default;
};

// Union of primitives; where members overlap the first one wins.
struct ShapeSpec {
  std::vector<Shape> members;
  bool require_passive = false;  // reject Im chi > 0 when set

  ShapeSpec() = default;
  ShapeSpec(std::initializer_list<Shape> s) : members(s) {}
};

// Occupied voxels of the global lattice with centers at (i + 1/2) kd.
// Occupied voxels are numbered in row-major order of the bounding box
// (z fastest); fields are stored in this order.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(double kd, Index3 origin, Index3 dims, std::vector<std::uint8_t> mask, std::vector<cplx> chi);

  double kd() const { return kd_; }
  double cell_volume() const { return kd_ * kd_ * kd_; }
  const Index3& origin() const { return origin_; }
  const Index3& dims() const { return dims_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t box_size() const { return mask_.size(); }

  const std::vector<std::uint8_t>& mask() const { return mask_; }
  // Local lattice coordinates of occupied voxel n.
  const Index3& cell(std::size_t n) const { return cells_[n]; }
  // Linear bounding-box index of occupied voxel n.
  std::size_t box_index(std::size_t n) const { return box_index_[n]; }
  Vec3 center(std::size_t n) const;

  const std::vector<cplx>& chi() const { return chi_; }
  // True when every voxel carries the same susceptibility.
  bool uniform_chi() const;
  VoxelGrid with_chi(cplx chi) const;
  VoxelGrid with_chi(std::vector<cplx> chi) const;

 private:
  double kd_ = 1.0;
  Index3 origin_{0, 0, 0};
  Index3 dims_{0, 0, 0};
  std::vector<std::uint8_t> mask_;
  std::vector<Index3> cells_;
  std::vector<std::size_t> box_index_;
  std::vector<cplx> chi_;
};

VoxelGrid voxelize(const ShapeSpec& shape, double kd);

// Minimal enclosing ball of the voxel centers plus half the voxel diagonal.
double circumscribed_radius(const VoxelGrid& grid);
// Largest distance from an occupied center to the nearest empty center,
// less one voxel edge, clamped at zero.
double inscribed_radius(const VoxelGrid& grid);
double volume(const VoxelGrid& grid);

// Continuum values for a single primitive (sphere, cylinder, box);
// negative when the shape has no closed form.
struct AnalyticGeometry {
  double circumscribed = -1.0;
  double inscribed = -1.0;
  double volume = -1.0;
};
AnalyticGeometry analytic_geometry(const ShapeSpec& shape);

// Voxel-mask file (see docs/formats.md).
void write_mask(const std::string& path, const VoxelGrid& grid);
VoxelGrid read_mask(const std::string& path);

}  // namespace bornscat
