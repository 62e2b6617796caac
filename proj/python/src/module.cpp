#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bornscat/bounds.hpp"
#include "bornscat/config.hpp"
#include "bornscat/farfield.hpp"
#include "bornscat/mie.hpp"
#include "bornscat/resonance.hpp"
#include "bornscat/selftest.hpp"
#include "bornscat/solve.hpp"
#include "bornscat/specfun.hpp"

namespace py = pybind11;
using namespace bornscat;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (n, 3) complex array from an interleaved field.
CArray to_array(const Field& E) {
  CArray a({static_cast<py::ssize_t>(E.size() / 3), py::ssize_t{3}});
  std::copy(E.begin(), E.end(), a.mutable_data());
  return a;
}

Field to_field(const CArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw DimensionError("field must have shape (n, 3)");
  return Field(a.data(), a.data() + a.size());
}

std::vector<Vec3> to_points(const RArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw DimensionError("points must have shape (n, 3)");
  std::vector<Vec3> p(static_cast<std::size_t>(a.shape(0)));
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = {a.data()[3 * i], a.data()[3 * i + 1], a.data()[3 * i + 2]};
  return p;
}

RArray centers(const VoxelGrid& g) {
  RArray a({static_cast<py::ssize_t>(g.size()), py::ssize_t{3}});
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 c = g.center(n);
    std::copy(c.begin(), c.end(), a.mutable_data() + 3 * n);
  }
  return a;
}

SolveReport solve(const VoxelGrid& grid, const Field& Einc, const std::string& method, double tol, int order,
                  bool force) {
  const DyadicOperator G(grid);
  SolverSettings s;
  s.tol = tol;
  s.force = force;
  if (method == "krylov") return krylov_solve(G, Einc, s);
  if (method == "factorized") return factorized_solve(G, Einc, s);
  if (method == "born") return born_series(G, Einc, order, s);
  throw DomainError("unknown method '" + method + "'");
}

py::dict report_dict(const CrossSectionReport& r) {
  py::dict d;
  d["sigma_sc"] = r.sigma_sc;
  d["sigma_abs"] = r.sigma_abs;
  d["sigma_ext"] = r.sigma_ext;
  d["got_residual"] = r.got_residual;
  d["eer"] = r.eer;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Volume-integral electromagnetic scattering: solvers, Mie oracle, resonances and norm bounds";

  // translators are tried newest first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  m.def("spherical_j", &specfun::spherical_j, py::arg("ell"), py::arg("z"));
  m.def("spherical_h2", &specfun::spherical_h2, py::arg("ell"), py::arg("z"));
  m.def("lommel_integral", &specfun::lommel_integral, py::arg("ell"), py::arg("x"));

  py::class_<Shape>(m, "Shape")
      .def_static("sphere", &Shape::sphere, py::arg("radius"), py::arg("chi"), py::arg("center") = Vec3{0, 0, 0})
      .def_static("cylinder", &Shape::cylinder, py::arg("radius"), py::arg("height"), py::arg("chi"),
                  py::arg("center") = Vec3{0, 0, 0})
      .def_static("box", &Shape::box, py::arg("size"), py::arg("chi"), py::arg("center") = Vec3{0, 0, 0})
      .def_static("mask", &Shape::mask, py::arg("path"))
      .def_readwrite("chi", &Shape::chi)
      .def_readwrite("center", &Shape::center);

  py::class_<VoxelGrid>(m, "VoxelGrid")
      .def_property_readonly("kd", &VoxelGrid::kd)
      .def_property_readonly("origin", &VoxelGrid::origin)
      .def_property_readonly("dims", &VoxelGrid::dims)
      .def_property_readonly("chi", &VoxelGrid::chi)
      .def("__len__", &VoxelGrid::size)
      .def("centers", &centers)
      .def("with_chi", py::overload_cast<cplx>(&VoxelGrid::with_chi, py::const_), py::arg("chi"));

  m.def(
      "voxelize",
      [](const std::vector<Shape>& members, double kd, bool require_passive) {
        ShapeSpec s;
        s.members = members;
        s.require_passive = require_passive;
        return voxelize(s, kd);
      },
      py::arg("members"), py::arg("kd"), py::arg("require_passive") = false);
  m.def("circumscribed_radius", &circumscribed_radius);
  m.def("inscribed_radius", &inscribed_radius);
  m.def("volume", &volume);
  m.def("write_mask", &write_mask);
  m.def("read_mask", &read_mask);

  m.def(
      "plane_wave",
      [](const VoxelGrid& g, Vec3 direction, Vec3c polarization) {
        return to_array(incident_field(g, IncidentSpec::plane_wave(direction, polarization)));
      },
      py::arg("grid"), py::arg("direction") = Vec3{0, 0, 1},
      py::arg("polarization") = Vec3c{cplx{1.0}, cplx{0.0}, cplx{0.0}});

  m.def(
      "solve",
      [](const VoxelGrid& g, const CArray& Einc, const std::string& method, double tol, int order, bool force) {
        const SolveReport r = solve(g, to_field(Einc), method, tol, order, force);
        py::dict d;
        d["E"] = to_array(r.E);
        d["iterations"] = r.iterations;
        d["residual"] = r.residual;
        d["certificate"] = r.certificate ? py::cast(*r.certificate) : py::none();
        d["method"] = r.method;
        return d;
      },
      py::arg("grid"), py::arg("incident"), py::arg("method") = "krylov", py::arg("tol") = 1e-8,
      py::arg("order") = 5, py::arg("force") = false);

  m.def(
      "cross_sections",
      [](const VoxelGrid& g, const CArray& E, const CArray& Einc) {
        return report_dict(cross_sections(g, to_field(E), to_field(Einc)));
      },
      py::arg("grid"), py::arg("E"), py::arg("incident"));

  m.def(
      "semigroup",
      [](const VoxelGrid& g, const CArray& Einc, double tau_max, double dtau) {
        const DyadicOperator G(g);
        const SemigroupTrajectory t = evolve_semigroup(G, to_field(Einc), tau_max, dtau);
        py::dict d;
        d["tau"] = t.tau;
        d["norm"] = t.norms;
        d["rate"] = t.rates;
        return d;
      },
      py::arg("grid"), py::arg("incident"), py::arg("tau_max"), py::arg("dtau") = -1.0);

  m.def(
      "mie_internal_field",
      [](double kR, cplx chi, const RArray& points, Vec3c polarization, int lmax) {
        const auto c = mie::plane_wave_coefficients(lmax > 0 ? lmax : mie::default_lmax(kR), polarization, kR);
        return to_array(mie::mie_internal_field(kR, chi, c, to_points(points)));
      },
      py::arg("kR"), py::arg("chi"), py::arg("points"),
      py::arg("polarization") = Vec3c{cplx{1.0}, cplx{0.0}, cplx{0.0}}, py::arg("lmax") = 0);

  m.def(
      "find_roots",
      [](const std::string& family, int lo, int hi, double kR) {
        py::list out;
        for (const auto& r : resonance::find_roots(resonance::parse_family(family), lo, hi, kR)) {
          py::dict d;
          d["family"] = resonance::family_name(r.family);
          d["index"] = r.index;
          d["chi"] = r.chi;
          d["lambda"] = r.lambda;
          d["residual"] = r.residual;
          out.append(d);
        }
        return out;
      },
      py::arg("family"), py::arg("index_min"), py::arg("index_max"), py::arg("kR"));
  m.def("amplification", &resonance::amplification_A, py::arg("ell"), py::arg("chi"), py::arg("kR"));
  m.def("f_TM", &resonance::f_TM, py::arg("ell"), py::arg("chi"), py::arg("kR"));
  m.def("f_TE", &resonance::f_TE, py::arg("ell"), py::arg("chi"), py::arg("kR"));

  m.def(
      "analytic_bounds",
      [](double kRV, double krV, double k3V) {
        const BoundReport r = analytic_bounds(GeometryFunctionals{kRV, krV, k3V});
        py::dict d;
        d["gammaC_bound"] = r.gammaC_bound;
        d["gammaS_bound"] = r.gammaS_bound;
        d["gamma_bound"] = r.gamma_bound;
        d["g_upper"] = r.g_upper;
        d["g_lower"] = r.g_lower;
        return d;
      },
      py::arg("kRV"), py::arg("krV"), py::arg("k3V"));
  m.def(
      "solvable_region",
      [](cplx chi, double kRV, double krV, double k3V) {
        const Solvability s = solvable_region(chi, analytic_bounds(GeometryFunctionals{kRV, krV, k3V}));
        return py::make_tuple(s.certified, s.criterion, s.inverse_norm);
      },
      py::arg("chi"), py::arg("kRV"), py::arg("krV"), py::arg("k3V"));

  m.def("load_config", [](const std::string& path) { return emit_config(load_config(path)); }, py::arg("path"),
        "Parse and validate a run config; returns the normalized YAML text.");
  m.def("selftest", []() {
    py::list out;
    for (const auto& c : run_selftest()) out.append(py::make_tuple(c.name, c.value, c.tol, c.pass));
    return out;
  });
}
