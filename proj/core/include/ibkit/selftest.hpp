#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ibkit {

struct InvariantCheck {
  std::string name;
  double value;      // worst observed error
  double tolerance;
  bool passed() const { return value <= tolerance; }
};

/// Discrete identities, solver residuals, transfer adjointness and
/// divergence-free interpolation on random data. Cheap (about a second).
std::vector<InvariantCheck> run_invariant_suite(std::uint32_t seed = 12345);

}  // namespace ibkit
