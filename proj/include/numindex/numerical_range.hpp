#ifndef NUMINDEX_NUMERICAL_RANGE_HPP
#define NUMINDEX_NUMERICAL_RANGE_HPP

#include "numindex/operators.hpp"
#include "numindex/sphere_search.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace numindex {

// A state (x, x*): |x| = 1 and x* a norming functional of x.
struct StatePair {
  Eigen::VectorXd x;
  Eigen::VectorXd functional;  // element of N(x) realizing `pairing`
  double pairing = 0.0;        // x*(T x), signed
};

struct RadiusEstimate {
  double value = 0.0;  // lower bound on the supremum being estimated
  StatePair witness;
  Provenance provenance;
  int projection_level = 0;  // maximizing j for n1, 0 elsewhere
  std::string method;        // "symmetric-eigen" or "multistart"
};

enum class RadiusMethod {
  kAuto,   // symmetric-part eigenvalues on Euclidean spaces, search elsewhere
  kSearch  // always search
};

// nu(T) = sup |x*(T x)| over states. The inner supremum over N(x) is exact
// (duality closed forms); the outer one is a multistart search over the
// sphere, run on +T and -T. On a real Hilbert space nu(T) is the spectral
// radius of (T + T^t)/2, which kAuto uses directly.
RadiusEstimate numerical_radius(const Operator& op, const SearchBudget& budget = {},
                                const std::vector<Eigen::VectorXd>& warm_starts = {},
                                RadiusMethod method = RadiusMethod::kAuto);

// Values x*(T x) at seeded random states. On non-smooth spaces x* is a random
// element of N(x).
std::vector<double> sample_numerical_range(const Operator& op, int samples, std::uint64_t seed);

// P_j L P_j for an operator on level m, as an operator on the ambient space.
Operator compressed_operator(const Operator& op, const TowerSpec& ambient, int j);

// n_1(L) = sup { |x* P_j L P_j x| : j = 1..m, (x, x*) states of the ambient
// space } for L on level m of `ambient`. Ties in j resolve to the smallest j
// within tol of the maximum.
// `warm_starts` seed the search of every level j.
RadiusEstimate n1_of_operator(const Operator& op, const TowerSpec& ambient, const SearchBudget& budget = {},
                              const std::vector<Eigen::VectorXd>& warm_starts = {});

// [w_m, ..., w_{m+j_max}] with w_{m+j}(L) = nu(L o Q_{m,j}) on X_{m+j}.
std::vector<RadiusEstimate> w_sequence(const Operator& op, const TowerSpec& ambient, int j_max,
                                       const SearchBudget& budget = {});

// w_{m,inf}(L) = nu(L o Q_m) on the ambient space.
RadiusEstimate w_infinity(const Operator& op, const TowerSpec& ambient, const SearchBudget& budget = {});

}  // namespace numindex

#endif  // NUMINDEX_NUMERICAL_RANGE_HPP
