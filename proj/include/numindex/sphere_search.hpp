#ifndef NUMINDEX_SPHERE_SEARCH_HPP
#define NUMINDEX_SPHERE_SEARCH_HPP

#include "numindex/tower_spec.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace numindex {

// Multistart parameters shared by every sphere maximization.
struct SearchBudget {
  int restarts = 64;
  int max_iterations = 5000;  // local steps per start
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

// Where an estimate came from.
struct Provenance {
  std::uint64_t seed = 0;
  int restarts = 0;     // starts actually run (warm + structured + random)
  long iterations = 0;  // local steps summed over starts
  double tol = 0.0;
};

// A function on nonzero vectors that is invariant under positive scaling, so
// it is a function on the unit sphere of the space.
struct SphereObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  // Optional; central differences are used when empty.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

struct SearchResult {
  double value = 0.0;
  Eigen::VectorXd witness;  // unit in the tower norm
  int best_start = 0;
  Provenance provenance;
};

// Multistart local ascent over the unit sphere of `spec`.
//
// Starts: `warm_starts`, then coordinate axes (plus sign vectors on flat l_inf
// up to dimension 9), then budget.restarts seeded random sphere points. Each
// start runs BFGS ascent on the sphere (smooth spaces only) followed by a
// compass polish whose moves include zeroing a coordinate and, on l_inf,
// snapping it to the current maximum. The best start wins; ties go to the
// earlier start.
SearchResult maximize_on_sphere(const TowerSpec& spec, const SphereObjective& objective,
                                const SearchBudget& budget,
                                const std::vector<Eigen::VectorXd>& warm_starts = {});

}  // namespace numindex

#endif  // NUMINDEX_SPHERE_SEARCH_HPP
