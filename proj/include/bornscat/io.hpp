#pragma once

#include <iosfwd>
#include <string>

#include "bornscat/bounds.hpp"
#include "bornscat/geometry.hpp"
#include "bornscat/solve.hpp"

namespace bornscat {

// Field dump (docs/formats.md): "BSFIELD 1\n", one metadata line
// "nx ny nz kd i0 j0 k0 nvox\n", the occupancy bytes of the bounding box,
// then six little-endian doubles per occupied voxel in grid order.
void write_field(const std::string& path, const VoxelGrid& grid, const Field& E);
void write_field(std::ostream& os, const VoxelGrid& grid, const Field& E);

struct FieldDump {
  VoxelGrid grid;  // geometry only; chi is zero
  Field E;
};
FieldDump read_field(const std::string& path);
FieldDump read_field(std::istream& is, const std::string& source = "<stream>");

// BoundReport as "key = value" lines and as a CSV header/row pair.
std::string bounds_text(const BoundReport& r);
std::string bounds_csv_header();
std::string bounds_csv_row(const BoundReport& r);

// tau,norm,rate
void write_trajectory_csv(std::ostream& os, const SemigroupTrajectory& t);

}  // namespace bornscat
