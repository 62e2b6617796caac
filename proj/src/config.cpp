#include "bornscat/config.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <yaml-cpp/yaml.h>

namespace bornscat {

namespace {

[[noreturn]] void fail(const std::string& source, const YAML::Node& n, const std::string& msg) {
  const int line = n.Mark().line >= 0 ? n.Mark().line + 1 : 0;
  throw ParseError(fmt::format("{}:{}: {}", source, line, msg));
}

void check_keys(const std::string& source, const YAML::Node& n, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!n.IsMap()) fail(source, n, fmt::format("section '{}' must be a mapping", section));
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(source, kv.first, fmt::format("unknown key '{}' in section '{}'", key, section));
  }
}

template <class T>
T scalar(const std::string& source, const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(source, n, fmt::format("bad value for '{}'", key));
  }
}

cplx complex_value(const std::string& source, const YAML::Node& n, const std::string& key) {
  if (n.IsScalar()) return {scalar<double>(source, n, key), 0.0};
  if (n.IsSequence() && n.size() == 2) {
    return {scalar<double>(source, n[0], key), scalar<double>(source, n[1], key)};
  }
  fail(source, n, fmt::format("'{}' must be a number or [re, im]", key));
}

Vec3 vec3_value(const std::string& source, const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 3) fail(source, n, fmt::format("'{}' must be a list of three numbers", key));
  return {scalar<double>(source, n[0], key), scalar<double>(source, n[1], key), scalar<double>(source, n[2], key)};
}

Vec3c cvec3_value(const std::string& source, const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() != 3) fail(source, n, fmt::format("'{}' must be a list of three entries", key));
  return {complex_value(source, n[0], key), complex_value(source, n[1], key), complex_value(source, n[2], key)};
}

template <class T>
void read(const std::string& source, const YAML::Node& sec, const char* key, T& out) {
  if (sec[key]) out = scalar<T>(source, sec[key], key);
}

Shape parse_member(const std::string& source, const YAML::Node& n) {
  check_keys(source, n, "shape.members", {"type", "radius", "height", "size", "center", "chi", "path"});
  if (!n["type"]) fail(source, n, "shape member needs a 'type'");
  const auto type = scalar<std::string>(source, n["type"], "type");
  Shape s;
  if (type == "sphere") {
    s.kind = Shape::Kind::Sphere;
  } else if (type == "cylinder") {
    s.kind = Shape::Kind::Cylinder;
  } else if (type == "box") {
    s.kind = Shape::Kind::Box;
  } else if (type == "mask") {
    s.kind = Shape::Kind::Mask;
  } else {
    fail(source, n["type"], fmt::format("unknown shape type '{}'", type));
  }
  read(source, n, "radius", s.radius);
  read(source, n, "height", s.height);
  read(source, n, "path", s.mask_path);
  if (n["size"]) s.size = vec3_value(source, n["size"], "size");
  if (n["center"]) s.center = vec3_value(source, n["center"], "center");
  if (n["chi"]) s.chi = complex_value(source, n["chi"], "chi");
  const bool positive = s.radius > 0.0 && s.height > 0.0 && s.size[0] > 0.0 && s.size[1] > 0.0 && s.size[2] > 0.0;
  if (!positive) fail(source, n, "shape lengths must be positive");
  if (s.kind == Shape::Kind::Mask && s.mask_path.empty()) fail(source, n, "mask member needs a 'path'");
  return s;
}

const char* kind_name(Shape::Kind k) {
  switch (k) {
    case Shape::Kind::Sphere:
      return "sphere";
    case Shape::Kind::Cylinder:
      return "cylinder";
    case Shape::Kind::Box:
      return "box";
    case Shape::Kind::Mask:
      return "mask";
  }
  return "?";
}

void emit_complex(YAML::Emitter& e, cplx z) {
  e << YAML::Flow << YAML::BeginSeq << z.real() << z.imag() << YAML::EndSeq;
}

void emit_vec3(YAML::Emitter& e, const Vec3& v) {
  e << YAML::Flow << YAML::BeginSeq << v[0] << v[1] << v[2] << YAML::EndSeq;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& ex) {
    throw ParseError(fmt::format("{}:{}: {}", source, ex.mark.line + 1, ex.msg));
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  check_keys(source, root, "<root>",
             {"version", "shape", "incident", "solver", "outputs", "mie", "resonances", "amap", "bounds"});
  read(source, root, "version", cfg.version);
  if (cfg.version != kConfigVersion) {
    fail(source, root["version"], fmt::format("unsupported config version {}", cfg.version));
  }
  if (const auto s = root["shape"]) {
    check_keys(source, s, "shape", {"kd", "voxels", "require_passive", "wavelength", "members"});
    read(source, s, "kd", cfg.shape.kd);
    read(source, s, "voxels", cfg.shape.voxels);
    read(source, s, "require_passive", cfg.shape.require_passive);
    if (s["wavelength"]) {
      cfg.shape.wavelength = scalar<double>(source, s["wavelength"], "wavelength");
      if (!(*cfg.shape.wavelength > 0.0)) fail(source, s["wavelength"], "wavelength must be positive");
    }
    if (s["members"]) {
      if (!s["members"].IsSequence() || s["members"].size() == 0) {
        fail(source, s["members"], "'members' must be a non-empty list");
      }
      for (const auto& m : s["members"]) cfg.shape.members.push_back(parse_member(source, m));
    }
    if (cfg.shape.kd < 0.0) fail(source, s["kd"], "kd must be positive");
    if (cfg.shape.voxels < 0) fail(source, s["voxels"], "voxels must be positive");
  }
  if (const auto s = root["incident"]) {
    check_keys(source, s, "incident", {"type", "direction", "polarization", "ell", "m", "tm"});
    read(source, s, "type", cfg.incident.type);
    if (cfg.incident.type != "plane_wave" && cfg.incident.type != "multipole") {
      fail(source, s["type"], fmt::format("unknown incident type '{}'", cfg.incident.type));
    }
    if (s["direction"]) cfg.incident.direction = vec3_value(source, s["direction"], "direction");
    if (s["polarization"]) cfg.incident.polarization = cvec3_value(source, s["polarization"], "polarization");
    read(source, s, "ell", cfg.incident.ell);
    read(source, s, "m", cfg.incident.m);
    read(source, s, "tm", cfg.incident.tm);
  }
  if (const auto s = root["solver"]) {
    check_keys(source, s, "solver",
               {"method", "tol", "restart", "max_iter", "order", "tau_max", "dtau", "snapshot_every"});
    read(source, s, "method", cfg.solver.method);
    static const std::set<std::string> methods{"krylov", "born", "factorized", "semigroup"};
    if (!methods.count(cfg.solver.method)) {
      fail(source, s["method"], fmt::format("unknown solver method '{}'", cfg.solver.method));
    }
    read(source, s, "tol", cfg.solver.tol);
    read(source, s, "restart", cfg.solver.restart);
    read(source, s, "max_iter", cfg.solver.max_iter);
    read(source, s, "order", cfg.solver.order);
    read(source, s, "tau_max", cfg.solver.tau_max);
    read(source, s, "dtau", cfg.solver.dtau);
    read(source, s, "snapshot_every", cfg.solver.snapshot_every);
    if (!(cfg.solver.tol > 0.0)) fail(source, s["tol"], "tol must be positive");
  }
  if (const auto s = root["outputs"]) {
    check_keys(source, s, "outputs", {"field", "cross_sections", "trajectory"});
    read(source, s, "field", cfg.outputs.field);
    read(source, s, "cross_sections", cfg.outputs.cross_sections);
    read(source, s, "trajectory", cfg.outputs.trajectory);
  }
  if (const auto s = root["mie"]) {
    check_keys(source, s, "mie", {"lmax", "compare"});
    read(source, s, "lmax", cfg.mie.lmax);
    read(source, s, "compare", cfg.mie.compare);
  }
  if (const auto s = root["resonances"]) {
    check_keys(source, s, "resonances", {"family", "kR", "index_min", "index_max", "window", "grid", "exclude"});
    read(source, s, "family", cfg.resonances.family);
    read(source, s, "kR", cfg.resonances.kR);
    read(source, s, "index_min", cfg.resonances.index_min);
    read(source, s, "index_max", cfg.resonances.index_max);
    read(source, s, "exclude", cfg.resonances.exclude);
    if (s["window"]) {
      cfg.resonances.window = scalar<std::vector<double>>(source, s["window"], "window");
      if (cfg.resonances.window.size() != 4) fail(source, s["window"], "'window' must be [re_min, re_max, im_min, im_max]");
    }
    if (s["grid"]) {
      cfg.resonances.grid = scalar<std::vector<int>>(source, s["grid"], "grid");
      if (cfg.resonances.grid.size() != 2) fail(source, s["grid"], "'grid' must be [nx, ny]");
    }
  }
  if (const auto s = root["amap"]) {
    check_keys(source, s, "amap", {"kR", "chi", "lmax"});
    read(source, s, "kR", cfg.amap.kR);
    read(source, s, "lmax", cfg.amap.lmax);
    if (s["chi"]) {
      if (!s["chi"].IsSequence()) fail(source, s["chi"], "'chi' must be a list");
      cfg.amap.chi.clear();
      for (const auto& c : s["chi"]) cfg.amap.chi.push_back(complex_value(source, c, "chi"));
    }
  }
  if (const auto s = root["bounds"]) {
    check_keys(source, s, "bounds", {"samples", "measure"});
    read(source, s, "samples", cfg.bounds.samples);
    read(source, s, "measure", cfg.bounds.measure);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string emit_config(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "version" << YAML::Value << c.version;

  e << YAML::Key << "shape" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kd" << YAML::Value << c.shape.kd;
  e << YAML::Key << "voxels" << YAML::Value << c.shape.voxels;
  e << YAML::Key << "require_passive" << YAML::Value << c.shape.require_passive;
  if (c.shape.wavelength) e << YAML::Key << "wavelength" << YAML::Value << *c.shape.wavelength;
  if (!c.shape.members.empty()) {
    e << YAML::Key << "members" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : c.shape.members) {
      e << YAML::BeginMap;
      e << YAML::Key << "type" << YAML::Value << kind_name(m.kind);
      e << YAML::Key << "radius" << YAML::Value << m.radius;
      e << YAML::Key << "height" << YAML::Value << m.height;
      e << YAML::Key << "size" << YAML::Value;
      emit_vec3(e, m.size);
      e << YAML::Key << "center" << YAML::Value;
      emit_vec3(e, m.center);
      e << YAML::Key << "chi" << YAML::Value;
      emit_complex(e, m.chi);
      if (!m.mask_path.empty()) e << YAML::Key << "path" << YAML::Value << m.mask_path;
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::EndMap;

  e << YAML::Key << "incident" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "type" << YAML::Value << c.incident.type;
  e << YAML::Key << "direction" << YAML::Value;
  emit_vec3(e, c.incident.direction);
  e << YAML::Key << "polarization" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const cplx& z : c.incident.polarization) emit_complex(e, z);
  e << YAML::EndSeq;
  e << YAML::Key << "ell" << YAML::Value << c.incident.ell;
  e << YAML::Key << "m" << YAML::Value << c.incident.m;
  e << YAML::Key << "tm" << YAML::Value << c.incident.tm;
  e << YAML::EndMap;

  e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "method" << YAML::Value << c.solver.method;
  e << YAML::Key << "tol" << YAML::Value << c.solver.tol;
  e << YAML::Key << "restart" << YAML::Value << c.solver.restart;
  e << YAML::Key << "max_iter" << YAML::Value << c.solver.max_iter;
  e << YAML::Key << "order" << YAML::Value << c.solver.order;
  e << YAML::Key << "tau_max" << YAML::Value << c.solver.tau_max;
  e << YAML::Key << "dtau" << YAML::Value << c.solver.dtau;
  e << YAML::Key << "snapshot_every" << YAML::Value << c.solver.snapshot_every;
  e << YAML::EndMap;

  e << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "field" << YAML::Value << c.outputs.field;
  e << YAML::Key << "cross_sections" << YAML::Value << c.outputs.cross_sections;
  e << YAML::Key << "trajectory" << YAML::Value << c.outputs.trajectory;
  e << YAML::EndMap;

  e << YAML::Key << "mie" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "lmax" << YAML::Value << c.mie.lmax;
  e << YAML::Key << "compare" << YAML::Value << c.mie.compare;
  e << YAML::EndMap;

  e << YAML::Key << "resonances" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "family" << YAML::Value << c.resonances.family;
  e << YAML::Key << "kR" << YAML::Value << c.resonances.kR;
  e << YAML::Key << "index_min" << YAML::Value << c.resonances.index_min;
  e << YAML::Key << "index_max" << YAML::Value << c.resonances.index_max;
  e << YAML::Key << "window" << YAML::Value << YAML::Flow << c.resonances.window;
  e << YAML::Key << "grid" << YAML::Value << YAML::Flow << c.resonances.grid;
  e << YAML::Key << "exclude" << YAML::Value << c.resonances.exclude;
  e << YAML::EndMap;

  e << YAML::Key << "amap" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kR" << YAML::Value << c.amap.kR;
  e << YAML::Key << "chi" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const cplx& z : c.amap.chi) emit_complex(e, z);
  e << YAML::EndSeq;
  e << YAML::Key << "lmax" << YAML::Value << c.amap.lmax;
  e << YAML::EndMap;

  e << YAML::Key << "bounds" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "samples" << YAML::Value << c.bounds.samples;
  e << YAML::Key << "measure" << YAML::Value << c.bounds.measure;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

ShapeSpec shape_spec(const ShapeConfig& s) {
  if (s.members.empty()) throw DomainError("shape has no members");
  const double scale = s.wavelength ? 2.0 * kPi / *s.wavelength : 1.0;
  ShapeSpec spec;
  spec.require_passive = s.require_passive;
  for (Shape m : s.members) {
    m.radius *= scale;
    m.height *= scale;
    for (auto& v : m.size) v *= scale;
    for (auto& v : m.center) v *= scale;
    spec.members.push_back(m);
  }
  return spec;
}

double lattice_spacing(const ShapeConfig& s) {
  const double scale = s.wavelength ? 2.0 * kPi / *s.wavelength : 1.0;
  if (s.kd > 0.0) return s.kd * scale;
  if (s.voxels <= 0) throw DomainError("shape needs either kd or voxels");
  // Target count from the analytic volume of the members.
  const ShapeSpec spec = shape_spec(s);
  double vol = 0.0;
  for (const auto& m : spec.members) {
    ShapeSpec one;
    one.members.push_back(m);
    const AnalyticGeometry g = analytic_geometry(one);
    if (g.volume < 0.0) throw DomainError("voxels target needs analytic member volumes; give kd instead");
    vol += g.volume;
  }
  return std::cbrt(vol / static_cast<double>(s.voxels));
}

VoxelGrid build_grid(const ShapeConfig& s) { return voxelize(shape_spec(s), lattice_spacing(s)); }

IncidentSpec incident_spec(const IncidentConfig& c) {
  IncidentSpec inc;
  if (c.type == "plane_wave") {
    inc = IncidentSpec::plane_wave(c.direction, c.polarization);
  } else if (c.type == "multipole") {
    inc.kind = IncidentSpec::Kind::Multipole;
    inc.ell = c.ell;
    inc.m = c.m;
    inc.transverse_magnetic = c.tm;
  } else {
    throw ParseError("unknown incident type '" + c.type + "'");
  }
  return inc;
}

SolverSettings solver_settings(const SolverConfig& c, bool force) {
  SolverSettings s;
  s.tol = c.tol;
  s.restart = c.restart;
  s.max_iter = c.max_iter;
  s.force = force;
  return s;
}

}  // namespace bornscat
