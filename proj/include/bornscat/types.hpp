#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace bornscat {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Vec3c = std::array<cplx, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Three complex components per occupied voxel, interleaved (x0,y0,z0,x1,...).
using Field = std::vector<cplx>;
// One complex value per occupied voxel.
using ScalarField = std::vector<cplx>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
};

class DegenerateShapeError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline Vec3c cross(const Vec3& a, const Vec3c& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace bornscat
