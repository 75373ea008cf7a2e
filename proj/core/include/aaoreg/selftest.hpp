#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace aaoreg {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Adjoint, derivative, stencil, symmetry and solve-count invariants on
/// seeded random instances. Fast enough to run on every invocation.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 20240601);

}  // namespace aaoreg
