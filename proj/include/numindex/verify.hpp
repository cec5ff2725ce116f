#ifndef NUMINDEX_VERIFY_HPP
#define NUMINDEX_VERIFY_HPP

#include "numindex/duality.hpp"
#include "numindex/sphere_search.hpp"
#include "numindex/tower_spec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace numindex {

struct VerifyConfig {
  TowerSpec space = TowerSpec::flat(4, 2.0);
  int samples = 50;
  std::uint64_t seed = 0;
  double tol = 1e-5;  // equality between two estimates
  SearchBudget search{16, 5000, 1e-8, 0};
  bool inject_fault = false;  // CC runs against a norm with a corrupted exponent
};

struct PropertyResult {
  std::string name;
  int samples = 0;
  double max_violation = 0.0;
  double tol = 0.0;
  bool passed = true;
  bool skipped = false;
  std::string note;
  std::uint64_t seed = 0;  // reruns this property alone
  double seconds = 0.0;    // wall time; kept out of the deterministic report
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool passed() const;
};

// The property suite of the library, run on config.space.
VerifyReport run_verify(const VerifyConfig& config);

// Duality routines whose norm uses exponents scaled by 1.25: a negative
// control that the CC certificate must reject.
DualityModel corrupted_norm_model();

}  // namespace numindex

#endif  // NUMINDEX_VERIFY_HPP
