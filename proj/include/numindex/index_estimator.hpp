#ifndef NUMINDEX_INDEX_ESTIMATOR_HPP
#define NUMINDEX_INDEX_ESTIMATOR_HPP

#include "numindex/numerical_range.hpp"
#include "numindex/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace numindex {

struct IndexBudget {
  int restarts = 32;          // outer descents, one random operator each
  int inner_restarts = 4;     // random sphere starts per radius/norm evaluation
  int inner_iterations = 5000;
  int final_factor = 10;      // inner budget multiplier for the final re-evaluation
  double initial_step = 0.1;
  double final_step = 1e-5;
  int max_sweeps = 400;
  double tol = 1e-8;
};

// Upper-bound estimate of an index: the least ratio found over the searched
// operators.
struct IndexEstimate {
  double value = 1.0;
  Operator witness = Operator::identity(TowerSpec::flat(1, 2.0));  // norm estimate 1
  double witness_radius = 1.0; // nu-hat (or n1-hat) of the witness at the final budget
  std::vector<double> trace;   // re-evaluated final ratio of every restart
  IndexBudget budget;
  std::uint64_t seed = 0;
  int best_restart = 0;
  double restart_variance = 0.0;
  bool noisy = false;          // restart_variance > kNoisyVariance
};

inline constexpr double kNoisyVariance = 0.02;

// inf nu(T)/|T| over operators on `spec`, searched by multistart descent over
// the matrix entries. `warm` (if any) replaces the first random start.
IndexEstimate estimate_index(const TowerSpec& spec, const IndexBudget& budget, std::uint64_t seed,
                             const std::optional<Operator>& warm = std::nullopt);

// inf n1(L)/|L| over operators L on level m of `ambient`.
IndexEstimate estimate_n1_index(const TowerSpec& ambient, int m, const IndexBudget& budget,
                                std::uint64_t seed, const std::optional<Operator>& warm = std::nullopt);

struct ScanRow {
  int m = 0;
  IndexEstimate n;
  IndexEstimate n1;
  bool floor_ok = true;     // n(X_m) >= n(X_deepest) - kScanTolerance
  bool envelope_ok = true;  // |d_m| <= |d_{m-1}| + kScanTolerance
};

struct LimitScan {
  std::vector<ScanRow> rows;
  bool floor_ok = true;
  bool envelope_ok = true;
  bool passed() const { return floor_ok && envelope_ok; }
};

inline constexpr double kScanTolerance = 0.03;

// Rows for m = m_min..m_max of `tower`. Each level warm-starts from the
// previous level's witness zero-padded.
LimitScan limit_scan(const TowerSpec& tower, int m_min, int m_max, const IndexBudget& budget,
                     std::uint64_t seed);

// "pass" or a comma-separated list of failed checks.
std::string row_flag(const ScanRow& row);

}  // namespace numindex

#endif  // NUMINDEX_INDEX_ESTIMATOR_HPP
