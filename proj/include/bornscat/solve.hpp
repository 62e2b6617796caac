#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bornscat/kernel.hpp"

namespace bornscat {

// Incident field inside the scatterer.
struct IncidentSpec {
  enum class Kind { PlaneWave, Multipole, Raw };

  Kind kind = Kind::PlaneWave;
  // Plane wave e exp(-ik n.r); e is projected onto the plane normal to n.
  Vec3 direction{0.0, 0.0, 1.0};
  Vec3c polarization{cplx{1.0}, cplx{0.0}, cplx{0.0}};
  // Multipole: TE is j_l(kr) X_lm, TM is curl(j_l X_lm)/k.
  int ell = 1;
  int m = 0;
  bool transverse_magnetic = false;
  Field raw;

  static IncidentSpec plane_wave(Vec3 direction, Vec3c polarization);
};

Field incident_field(const VoxelGrid& grid, const IncidentSpec& inc);

struct SolverSettings {
  double tol = 1e-8;
  int restart = 60;
  int max_iter = 2000;
  bool force = false;  // run certified methods even without a certificate
};

struct ScatteringProblem {
  VoxelGrid grid;
  IncidentSpec incident;
  SolverSettings settings;
};

struct SolveReport {
  Field E;
  int iterations = 0;
  double residual = 0.0;  // ||B E - E_inc|| / ||E_inc||
  std::optional<double> certificate;  // a-priori bound on ||E - E_exact||
  std::string method;
  bool forced = false;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

// Relative residual of the Born equation for per-voxel chi.
double born_residual(const DyadicOperator& G, const Field& E, const Field& Einc);

// E_m = sum_{s<=m} (chi G)^s E_inc with the certificate
// (|chi| g)^{max(m,1)} ||E_inc|| / (1 - |chi| g), g = g_norm. A non-positive
// g_norm is replaced by max(analytic g_upper, measured ||G||).
SolveReport born_series(const DyadicOperator& G, const Field& Einc, int order, const SolverSettings& s = {},
                        double g_norm = -1.0);

// Restarted GMRES on (I - chi G) E = E_inc.
SolveReport krylov_solve(const DyadicOperator& G, const Field& Einc, const SolverSettings& s = {});

// Uniform chi != -2: solve (I - zeta G (I + 2G)) F = E_inc with zeta = chi^2/(chi+2),
// then E = F + 2chi/(chi+2) G F.
SolveReport factorized_solve(const DyadicOperator& G, const Field& Einc, const SolverSettings& s = {});

SolveReport born_series(const ScatteringProblem& p, int order);
SolveReport krylov_solve(const ScatteringProblem& p);
SolveReport factorized_solve(const ScatteringProblem& p);

struct SemigroupTrajectory {
  std::vector<double> tau;
  std::vector<double> norms;  // ||psi_tau||
  std::vector<double> rates;  // -2 Im <G psi, psi>, the exact d||psi||^2/dtau
  std::vector<Field> snapshots;  // filled when requested
  double dtau = 0.0;
  bool step_warning = false;  // dtau beyond the RK4 comfort zone for ||G||
};

// RK4 for i dpsi/dtau = G psi, psi_0 = E_inc. dtau <= 0 selects 0.5/||G||_est.
SemigroupTrajectory evolve_semigroup(const DyadicOperator& G, const Field& Einc, double tau_max, double dtau = -1.0,
                                     int sample_every = 1, bool keep_snapshots = false, double g_norm = -1.0);

struct ResolventResult {
  Field E;
  double truncation_estimate = 0.0;  // exp(-tau_max (-Im chi)/|chi|^2)
  int steps = 0;
};

// (1/(i chi)) int_0^tau_max exp(i tau/chi) psi_tau dtau for a uniform chi with Im chi < 0.
ResolventResult resolvent_via_semigroup(const DyadicOperator& G, cplx chi, const Field& Einc, double tau_max,
                                        double dtau = -1.0, double g_norm = -1.0);

}  // namespace bornscat
