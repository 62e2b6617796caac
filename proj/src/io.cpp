#include "bornscat/io.hpp"

#include <bit>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bornscat {

namespace {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

void put_double(std::ostream& os, double v) {
  char buf[sizeof(double)];
  std::memcpy(buf, &v, sizeof v);
  os.write(buf, sizeof buf);
}

double get_double(std::istream& is) {
  char buf[sizeof(double)];
  is.read(buf, sizeof buf);
  double v = 0.0;
  std::memcpy(&v, buf, sizeof v);
  return v;
}

}  // namespace

void write_field(std::ostream& os, const VoxelGrid& g, const Field& E) {
  if (E.size() != 3 * g.size()) throw DimensionError("field length does not match the grid");
  os << "BSFIELD 1\n";
  os << fmt::format("{} {} {} {:.17g} {} {} {} {}\n", g.dims()[0], g.dims()[1], g.dims()[2], g.kd(), g.origin()[0],
                    g.origin()[1], g.origin()[2], g.size());
  os.write(reinterpret_cast<const char*>(g.mask().data()), static_cast<std::streamsize>(g.mask().size()));
  for (const cplx& c : E) {
    put_double(os, c.real());
    put_double(os, c.imag());
  }
  if (!os) throw Error("failed writing field dump");
}

void write_field(const std::string& path, const VoxelGrid& grid, const Field& E) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open field file for writing: " + path);
  write_field(out, grid, E);
}

FieldDump read_field(std::istream& in, const std::string& source) {
  std::string magic;
  std::getline(in, magic);
  if (magic != "BSFIELD 1") throw ParseError(source + ": line 1: expected header 'BSFIELD 1'");
  std::string line;
  std::getline(in, line);
  std::istringstream ls(line);
  Index3 dims;
  Index3 origin;
  double kd = 0.0;
  std::size_t nvox = 0;
  if (!(ls >> dims[0] >> dims[1] >> dims[2] >> kd >> origin[0] >> origin[1] >> origin[2] >> nvox)) {
    throw ParseError(source + ": line 2: expected 'nx ny nz kd i0 j0 k0 nvox'");
  }
  if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw ParseError(source + ": line 2: dimensions must be positive");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);
  in.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  if (!in) throw ParseError(source + ": truncated occupancy block");
  std::size_t count = 0;
  for (auto m : mask) {
    if (m > 1) throw ParseError(source + ": occupancy bytes must be 0 or 1");
    count += m;
  }
  if (count != nvox) throw ParseError(source + ": voxel count does not match the occupancy block");
  FieldDump d;
  d.grid = VoxelGrid(kd, origin, dims, std::move(mask), std::vector<cplx>(nvox));
  d.E.resize(3 * nvox);
  for (auto& c : d.E) {
    const double re = get_double(in);
    const double im = get_double(in);
    c = {re, im};
  }
  if (!in) throw ParseError(source + ": truncated field block");
  return d;
}

FieldDump read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open field file: " + path);
  return read_field(in, path);
}

std::string bounds_text(const BoundReport& r) {
  std::string s;
  auto kv = [&](const char* k, double v) { s += fmt::format("{} = {:.17g}\n", k, v); };
  kv("kR_V", r.geometry.kRV);
  kv("kr_V", r.geometry.krV);
  kv("k3V", r.geometry.k3V);
  kv("gamma_HS", r.gamma_HS);
  kv("gamma_HS_err", r.gamma_HS_err);
  kv("area_bound", r.area_bound);
  kv("circ_bound", r.circ_bound);
  kv("bessel_bound", r.bessel_bound);
  kv("vol_bound", r.vol_bound);
  kv("gammaC_bound", r.gammaC_bound);
  kv("gammaS_bound", r.gammaS_bound);
  kv("gamma_bound", r.gamma_bound);
  kv("g_upper", r.g_upper);
  kv("g_lower", r.g_lower);
  return s;
}

std::string bounds_csv_header() {
  return "kR_V,kr_V,k3V,gamma_HS,gamma_HS_err,area_bound,circ_bound,bessel_bound,vol_bound,gammaC_bound,"
         "gammaS_bound,gamma_bound,g_upper,g_lower";
}

std::string bounds_csv_row(const BoundReport& r) {
  return fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                     "{:.17g},{:.17g}",
                     r.geometry.kRV, r.geometry.krV, r.geometry.k3V, r.gamma_HS, r.gamma_HS_err, r.area_bound,
                     r.circ_bound, r.bessel_bound, r.vol_bound, r.gammaC_bound, r.gammaS_bound, r.gamma_bound,
                     r.g_upper, r.g_lower);
}

void write_trajectory_csv(std::ostream& os, const SemigroupTrajectory& t) {
  os << "tau,norm,rate\n";
  for (std::size_t i = 0; i < t.tau.size(); ++i) {
    os << fmt::format("{:.17g},{:.17g},{:.17g}\n", t.tau[i], t.norms[i], t.rates[i]);
  }
}

}  // namespace bornscat
