#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bornscat {

struct CheckResult {
  std::string name;
  double value = 0.0;  // worst observed error
  double tol = 0.0;
  bool pass = false;
};

// Identity suites: Bessel sum rules, Wronskians, entire-ratio consistency,
// dense vs FFT matvec, and a small optical-theorem demo.
std::vector<CheckResult> run_selftest(std::uint64_t seed = 11);

}  // namespace bornscat
