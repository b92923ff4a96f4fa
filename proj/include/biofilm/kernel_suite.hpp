#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace biofilm::kernels {

struct SuiteCheck {
  std::string name;
  double measured = 0.0;   // worst observed deviation
  double tolerance = 0.0;
  bool passed = false;
};

/// Randomized self-verification of the kernel module against finite-difference
/// and quadrature oracles. Backs the `verify-kernels` command.
std::vector<SuiteCheck> run_kernel_suite(std::uint64_t seed = 20240611, int samples = 200);

}  // namespace biofilm::kernels
