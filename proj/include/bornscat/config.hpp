#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bornscat/geometry.hpp"
#include "bornscat/solve.hpp"

namespace bornscat {

inline constexpr int kConfigVersion = 1;

struct ShapeConfig {
  std::vector<Shape> members;
  bool require_passive = false;
  double kd = 0.0;  // lattice spacing; 0 means derive it from `voxels`
  long voxels = 0;  // target occupied count
  // When set, lengths are physical and scaled by k = 2 pi / wavelength.
  std::optional<double> wavelength;

  bool operator==(const ShapeConfig&) const = default;
};

struct SolverConfig {
  std::string method = "krylov";  // krylov | born | factorized | semigroup
  double tol = 1e-8;
  int restart = 60;
  int max_iter = 2000;
  int order = 5;  // Born-series truncation
  double tau_max = 50.0;  // semigroup
  double dtau = 0.0;  // 0 selects the default step
  int snapshot_every = 0;  // 0: no snapshots

  bool operator==(const SolverConfig&) const = default;
};

struct IncidentConfig {
  std::string type = "plane_wave";  // plane_wave | multipole
  Vec3 direction{0.0, 0.0, 1.0};
  Vec3c polarization{cplx{1.0}, cplx{0.0}, cplx{0.0}};
  int ell = 1;
  int m = 0;
  bool tm = false;

  bool operator==(const IncidentConfig&) const = default;
};

struct OutputConfig {
  bool field = true;
  bool cross_sections = true;
  bool trajectory = true;

  bool operator==(const OutputConfig&) const = default;
};

struct MieConfig {
  int lmax = 0;  // 0: default_lmax(kR)
  bool compare = false;

  bool operator==(const MieConfig&) const = default;
};

struct ResonanceConfig {
  std::string family = "TM";
  double kR = 0.5;
  int index_min = 1;
  int index_max = 20;
  std::vector<double> window{-1.2, 0.6, -0.1, 1.0};
  std::vector<int> grid{600, 400};
  double exclude = 0.01;

  bool operator==(const ResonanceConfig&) const = default;
};

struct AmapConfig {
  double kR = 0.5;
  std::vector<cplx> chi{cplx{-2.0, 0.0}, cplx{-1.0, 0.0}, cplx{0.0, -1.0}};
  int lmax = 200;

  bool operator==(const AmapConfig&) const = default;
};

struct BoundsConfig {
  long samples = 1000000;
  bool measure = true;  // power-iteration norms on the grid

  bool operator==(const BoundsConfig&) const = default;
};

struct RunConfig {
  int version = kConfigVersion;
  ShapeConfig shape;
  IncidentConfig incident;
  SolverConfig solver;
  OutputConfig outputs;
  MieConfig mie;
  ResonanceConfig resonances;
  AmapConfig amap;
  BoundsConfig bounds;

  bool operator==(const RunConfig&) const = default;
};

// Parse YAML text; `source` names the input in error messages. Unknown keys,
// wrong types and bad values raise ParseError with the line number.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
// YAML text that parses back to an identical RunConfig.
std::string emit_config(const RunConfig& cfg);

// Shape in k = 1 units, with wavelength scaling applied.
ShapeSpec shape_spec(const ShapeConfig& s);
double lattice_spacing(const ShapeConfig& s);
VoxelGrid build_grid(const ShapeConfig& s);
IncidentSpec incident_spec(const IncidentConfig& c);
SolverSettings solver_settings(const SolverConfig& c, bool force);

}  // namespace bornscat
