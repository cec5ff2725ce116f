#ifndef NUMINDEX_OPERATORS_HPP
#define NUMINDEX_OPERATORS_HPP

#include "numindex/sphere_search.hpp"
#include "numindex/tower.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace numindex {

// Dense linear map of a tower space into itself.
class Operator {
 public:
  Operator(TowerSpec spec, Eigen::MatrixXd matrix);

  static Operator identity(const TowerSpec& spec);
  static Operator zero(const TowerSpec& spec);

  const TowerSpec& spec() const { return spec_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Index dim() const { return matrix_.rows(); }

  Operator scaled(double factor) const { return Operator(spec_, factor * matrix_); }
  friend Operator operator+(const Operator& a, const Operator& b);

 private:
  TowerSpec spec_;
  Eigen::MatrixXd matrix_;
};

Eigen::VectorXd apply(const Operator& op, const Eigen::VectorXd& x);
TowerVector apply(const Operator& op, const TowerVector& x);

struct NormEstimate {
  double value = 0.0;        // |T w| for the unit witness w: a lower bound on |T|
  Eigen::VectorXd witness;
  std::string method;        // "l1-columns", "linf-rows", "power-iteration" or "multistart"
  Provenance provenance;
};

enum class NormMethod {
  kAuto,   // closed forms on flat l_1, l_inf and Euclidean spaces, search elsewhere
  kSearch  // always run the multistart ascent
};

// |T| = sup |T x| over the unit sphere.
NormEstimate operator_norm(const Operator& op, const SearchBudget& budget = {},
                           NormMethod method = NormMethod::kAuto,
                           const std::vector<Eigen::VectorXd>& warm_starts = {});

// L on X_m zero-padded to the coordinates of `target` (a deeper level of the
// same tower).
Operator embed(const Operator& op, const TowerSpec& target);

// L o Q_{m,j} as an operator on X_{m+j}; `ambient` must extend op.spec() at
// level m.
Operator compose_with_projection(const Operator& op, const TowerSpec& ambient, int m, int j);

// L o Q_m on the full ambient space.
Operator compose_with_ambient_projection(const Operator& op, const TowerSpec& ambient, int m);

// Seeded standard normal entries. With `normalize`, rescaled by the
// estimated norm so that |T| = 1 up to the estimate's tolerance.
Operator random_operator(const TowerSpec& spec, std::uint64_t seed, bool normalize = false,
                         const SearchBudget& budget = {});

// True when the tower norm is the Euclidean norm on all coordinates.
bool is_euclidean(const TowerSpec& spec);

}  // namespace numindex

#endif  // NUMINDEX_OPERATORS_HPP
