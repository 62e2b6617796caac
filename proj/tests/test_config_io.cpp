#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "bornscat/config.hpp"
#include "bornscat/io.hpp"

using namespace bornscat;

namespace {

std::string parse_error(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig d;
  EXPECT_EQ(parse_config(emit_config(d)), d);
}

TEST(Config, FullRoundTrip) {
  RunConfig c;
  c.shape.members = {Shape::sphere(1.0, cplx(0.5, -0.5)), Shape::cylinder(0.4, 1.5, 0.05, {1.0, 2.0, -0.25}),
                     Shape::box({1, 2, 3}, cplx(-1.0, 0.1))};
  c.shape.kd = 1.0 / 12;
  c.shape.require_passive = true;
  c.shape.wavelength = 0.75;
  c.incident.type = "multipole";
  c.incident.ell = 3;
  c.incident.m = -2;
  c.incident.tm = true;
  c.incident.polarization = {cplx(0.0, 1.0), cplx(1.0), cplx(0.0)};
  c.solver.method = "semigroup";
  c.solver.tau_max = 60;
  c.solver.dtau = 0.1;
  c.solver.snapshot_every = 25;
  c.outputs.trajectory = false;
  c.mie.compare = true;
  c.resonances.family = "CYL_PERP";
  c.resonances.window = {-1.0, 0.5, -0.2, 0.9};
  c.amap.chi = {cplx(-2.0), cplx(0.3, -0.7)};
  c.bounds.samples = 1234;
  c.bounds.measure = false;
  const RunConfig r = parse_config(emit_config(c));
  EXPECT_EQ(r, c);
  EXPECT_EQ(emit_config(r), emit_config(c));
}

TEST(Config, ComplexAndRealScalars) {
  const RunConfig c = parse_config("shape:\n  kd: 0.1\n  members:\n    - type: sphere\n      chi: 2\n");
  ASSERT_EQ(c.shape.members.size(), 1u);
  EXPECT_EQ(c.shape.members[0].chi, cplx(2.0));
  const RunConfig d = parse_config("shape:\n  kd: 0.1\n  members:\n    - type: sphere\n      chi: [1, -0.5]\n");
  EXPECT_EQ(d.shape.members[0].chi, cplx(1.0, -0.5));
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error("version: 1\nbogus: 3\n").find("t.yaml:2: unknown key 'bogus'"), std::string::npos);
  EXPECT_NE(parse_error("solver:\n  method: magic\n").find("t.yaml:2: unknown solver method"), std::string::npos);
  EXPECT_NE(parse_error("solver:\n  tol: abc\n").find("t.yaml:2:"), std::string::npos);
  EXPECT_NE(parse_error("version: 9\n").find("unsupported config version"), std::string::npos);
  EXPECT_NE(parse_error("shape:\n  members:\n    - type: cone\n").find("t.yaml:3: unknown shape type"),
            std::string::npos);
  EXPECT_NE(parse_error("shape:\n  members:\n    - type: sphere\n      radius: -1\n").find("must be positive"),
            std::string::npos);
  EXPECT_NE(parse_error("a: [1, 2\n").find("t.yaml:"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/x.yaml"), ParseError);
}

TEST(Config, DerivedObjects) {
  ShapeConfig s;
  s.members = {Shape::sphere(1.0, 0.5)};
  s.voxels = 4000;
  const double kd = lattice_spacing(s);
  const VoxelGrid g = build_grid(s);
  EXPECT_DOUBLE_EQ(g.kd(), kd);
  EXPECT_NEAR(static_cast<double>(g.size()) / 4000.0, 1.0, 0.1);
  s.voxels = 0;
  EXPECT_THROW(lattice_spacing(s), DomainError);

  ShapeConfig w;
  w.members = {Shape::sphere(1.0, 0.5)};
  w.wavelength = 2 * kPi;
  w.kd = 0.25;
  const ShapeSpec spec = shape_spec(w);
  EXPECT_NEAR(spec.members[0].radius, 1.0, 1e-15);
  w.wavelength = kPi;
  EXPECT_NEAR(shape_spec(w).members[0].radius, 2.0, 1e-15);

  IncidentConfig ic;
  ic.type = "multipole";
  ic.ell = 2;
  EXPECT_EQ(incident_spec(ic).kind, IncidentSpec::Kind::Multipole);
  SolverConfig sc;
  sc.tol = 1e-5;
  const SolverSettings st = solver_settings(sc, true);
  EXPECT_EQ(st.tol, 1e-5);
  EXPECT_TRUE(st.force);
}

TEST(FieldIO, RoundTrip) {
  const VoxelGrid g = voxelize(ShapeSpec{Shape::cylinder(0.5, 1.0, 1.0)}, 0.2);
  const Field E = random_field(3 * g.size(), 4);
  std::stringstream ss;
  write_field(ss, g, E);
  const FieldDump d = read_field(ss);
  EXPECT_EQ(d.E, E);
  EXPECT_EQ(d.grid.mask(), g.mask());
  EXPECT_EQ(d.grid.origin(), g.origin());
  EXPECT_DOUBLE_EQ(d.grid.kd(), g.kd());

  const std::string path = (std::filesystem::temp_directory_path() / "bornscat_field_test.bin").string();
  write_field(path, g, E);
  EXPECT_EQ(read_field(path).E, E);
  std::filesystem::remove(path);
  EXPECT_THROW(read_field(path), ParseError);
  EXPECT_THROW(write_field(ss, g, Field(3)), DimensionError);
}

TEST(FieldIO, RejectsCorruptInput) {
  std::stringstream bad("BSFIELD 2\n");
  EXPECT_THROW(read_field(bad), ParseError);
  const VoxelGrid g = voxelize(ShapeSpec{Shape::sphere(0.5, 1.0)}, 0.25);
  std::stringstream ss;
  write_field(ss, g, Field(3 * g.size(), cplx(1.0, 2.0)));
  const std::string s = ss.str();
  std::stringstream cut(s.substr(0, s.size() - 10));
  EXPECT_THROW(read_field(cut), ParseError);
}

TEST(TextOutput, TrajectoryAndBounds) {
  SemigroupTrajectory t;
  t.tau = {0.0, 0.5};
  t.norms = {1.0, 0.9};
  t.rates = {-0.2, -0.1};
  std::ostringstream os;
  write_trajectory_csv(os, t);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "tau,norm,rate");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);

  const BoundReport r = analytic_bounds(GeometryFunctionals{1.0, 1.0, 4 * kPi / 3});
  EXPECT_NE(bounds_text(r).find("g_upper = "), std::string::npos);
  const std::string h = bounds_csv_header(), row = bounds_csv_row(r);
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), std::count(row.begin(), row.end(), ','));
}
