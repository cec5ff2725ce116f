#ifndef NUMINDEX_DUALITY_HPP
#define NUMINDEX_DUALITY_HPP

#include "numindex/tower.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace numindex {

namespace detail {

template <typename Scalar>
Scalar sign(Scalar value) {
  return value > Scalar(0) ? Scalar(1) : (value < Scalar(0) ? Scalar(-1) : Scalar(0));
}

// Gradient of the l_r norm of a block with norm `block_norm` > 0.
template <typename Derived, typename Out>
void block_gradient(const Eigen::MatrixBase<Derived>& block, typename Derived::Scalar block_norm,
                    double r, typename Derived::Scalar weight, Eigen::MatrixBase<Out>& out) {
  using Scalar = typename Derived::Scalar;
  for (Index i = 0; i < block.size(); ++i) {
    const Scalar value = block.coeff(i);
    if (block.size() == 1) {
      out.coeffRef(i) = weight * sign(value);
    } else {
      out.coeffRef(i) = weight * pow_abs(Scalar(value / block_norm), r - 1.0) * sign(value);
    }
  }
}

}  // namespace detail

// The unique f in the dual unit sphere with f(x) = |x|, i.e. the gradient of
// the norm at x. Level by level this is the l_p-sum formula
//
//   f = (|x_i|^{p-1} x_i^*)_i / (sum |x_i|^p)^{(p-1)/p}
//
// with x_i^* the norming functional of the summand.
//
// Throws DomainError for x = 0 or a non-smooth space (use norming_sup there).
template <typename Derived>
Vector<typename Derived::Scalar> norming_functional(const TowerSpec& spec,
                                                    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  detail::check_size(spec, x.size());
  if (!spec.is_smooth()) {
    throw DomainError("norming functional is set-valued on " + spec.describe() +
                      "; use norming_sup");
  }
  Vector<Scalar> f(x.size());
  if (spec.is_flat() || spec.dim() == 1) {
    const Scalar total = tower_norm(spec, x);
    if (!(total > Scalar(0))) throw DomainError("the zero vector has no norming functional");
    if (spec.dim() == 1) {
      f[0] = detail::sign(Scalar(x.coeff(0)));
      return f;
    }
    const double p = spec.flat_exponent();
    for (Index i = 0; i < x.size(); ++i) {
      f[i] = detail::pow_abs(Scalar(x.coeff(i) / total), p - 1.0) * detail::sign(Scalar(x.coeff(i)));
    }
    return f;
  }

  const Vector<Scalar> norms = level_norms(spec, x);
  const int depth = spec.depth();
  if (!(norms[depth - 1] > Scalar(0))) throw DomainError("the zero vector has no norming functional");
  // weight[n - 1] = d|x| / d|P_n x|.
  Vector<Scalar> weight(depth);
  weight[depth - 1] = 1;
  for (int n = depth - 1; n >= 1; --n) {
    const double p = spec.combining_exponent(n);
    weight[n - 1] = norms[n] > Scalar(0)
                        ? weight[n] * detail::pow_abs(Scalar(norms[n - 1] / norms[n]), p - 1.0)
                        : Scalar(0);
  }
  for (int n = 1; n <= depth; ++n) {
    const auto block = x.segment(spec.leaf_offset(n), spec.leaf_dim(n));
    auto out = f.segment(spec.leaf_offset(n), spec.leaf_dim(n));
    const Scalar leaf = detail::block_norm(block, spec.leaf_exponent(n));
    if (leaf == Scalar(0)) {
      out.setZero();
      continue;
    }
    Scalar w = weight[n - 1];
    if (n >= 2) {
      w *= detail::pow_abs(Scalar(leaf / norms[n - 1]), spec.combining_exponent(n - 1) - 1.0);
    }
    detail::block_gradient(block, leaf, spec.leaf_exponent(n), w, out);
  }
  return f;
}

// sup { f(v) : f in N(x / |x|) }, the inner supremum of the numerical range.
// Smooth spaces use the norming functional; flat l_1 and l_inf use the
// closed forms of their faces. Throws DomainError for x = 0.
template <typename DerivedX, typename DerivedV>
typename DerivedX::Scalar norming_sup(const TowerSpec& spec, const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedV>& v) {
  using Scalar = typename DerivedX::Scalar;
  using std::abs;
  detail::check_size(spec, x.size());
  detail::check_size(spec, v.size());
  if (spec.is_smooth()) return norming_functional(spec, x).dot(v.template cast<Scalar>());
  const Scalar scale = x.cwiseAbs().maxCoeff();
  if (!(scale > Scalar(0))) throw DomainError("norming set of the zero vector is undefined");
  if (spec.flat_exponent() == 1.0) {
    Scalar sup = 0;
    for (Index i = 0; i < x.size(); ++i) {
      const Scalar xi = x.coeff(i);
      sup += xi != Scalar(0) ? detail::sign(xi) * Scalar(v.coeff(i)) : Scalar(abs(v.coeff(i)));
    }
    return sup;
  }
  Scalar sup = -std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < x.size(); ++i) {
    if (abs(x.coeff(i)) == scale) sup = std::max(sup, Scalar(detail::sign(Scalar(x.coeff(i))) * v.coeff(i)));
  }
  return sup;
}

// Norm of f as a functional: the tower norm with conjugate exponents.
template <typename Derived>
typename Derived::Scalar dual_norm(const TowerSpec& spec, const Eigen::MatrixBase<Derived>& f) {
  return tower_norm(spec.dual(), f);
}

// f restricted to X_m, expressed on the coordinates of X_m.
template <typename Derived>
Vector<typename Derived::Scalar> restrict_to_level(const TowerSpec& spec,
                                                   const Eigen::MatrixBase<Derived>& f, int m) {
  detail::check_size(spec, f.size());
  spec.check_level(m);
  return f.head(spec.level_dim(m));
}

template <typename Scalar>
struct BConstant {
  Scalar value;
  int level;
  Vector<Scalar> base;
};

// b_m(x) > 0 with b_m(x) * (f_x restricted to X_m) the norming functional of
// P_m x. For an l_p-sum this is |x|^{p-1} / |P_m x|^{p-1}; through a tower the
// per-level ratios multiply. Throws DegenerateSupportError when P_m x = 0.
template <typename Derived>
BConstant<typename Derived::Scalar> b_constant(const TowerSpec& spec,
                                               const Eigen::MatrixBase<Derived>& x, int m) {
  using Scalar = typename Derived::Scalar;
  detail::check_size(spec, x.size());
  spec.check_level(m);
  if (!spec.is_smooth()) throw DomainError("b_m(x) requires a smooth space");
  const Vector<Scalar> norms = level_norms(spec, x);
  if (!(norms[m - 1] > Scalar(0))) {
    throw DegenerateSupportError("P_" + std::to_string(m) + " x = 0: b_m(x) is undefined");
  }
  Scalar value = 1;
  if (spec.is_flat()) {
    value = detail::pow_abs(Scalar(norms[spec.depth() - 1] / norms[m - 1]), spec.flat_exponent() - 1.0);
  } else {
    for (int k = m; k < spec.depth(); ++k) {
      value *= detail::pow_abs(Scalar(norms[k] / norms[k - 1]), spec.combining_exponent(k) - 1.0);
    }
  }
  return {value, m, Vector<Scalar>(x)};
}

// The duality set N(x) at a unit base point.
class NormingSet {
 public:
  enum class Kind {
    kSmooth,   // a single functional
    kL1Face,   // f_i = sgn(x_i) on the support, f_i free in [-1, 1] elsewhere
    kLinfHull  // convex hull of sgn(x_i) e_i over the coordinates with |x_i| = |x|
  };

  static NormingSet of(const TowerSpec& spec, const Eigen::VectorXd& x);

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& base() const { return base_; }
  // Smooth only.
  const Eigen::VectorXd& functional() const { return functional_; }
  // kL1Face: signs with 0 marking free coordinates. kLinfHull: signs with 0
  // marking coordinates outside the hull.
  const Eigen::VectorXd& pattern() const { return pattern_; }

  double sup(const Eigen::VectorXd& v) const;
  bool contains(const Eigen::VectorXd& f, double tol) const;
  // Extreme points of the set (a single point in the smooth case).
  std::vector<Eigen::VectorXd> extreme_points() const;

 private:
  Kind kind_ = Kind::kSmooth;
  Eigen::VectorXd base_;
  Eigen::VectorXd functional_;
  Eigen::VectorXd pattern_;
};

// Norm and duality routines used by certify_cc; `exact` is the library's own.
struct DualityModel {
  std::function<double(const TowerSpec&, const Eigen::VectorXd&)> norm;
  std::function<Eigen::VectorXd(const TowerSpec&, const Eigen::VectorXd&)> norming;
  std::function<double(const TowerSpec&, const Eigen::VectorXd&)> dual_norm;
  std::function<double(const TowerSpec&, const Eigen::VectorXd&, int)> b_constant;

  static DualityModel exact();
};

struct CCReport {
  int samples = 0;
  long checked = 0;
  long skipped = 0;  // (x, m) pairs with P_m x = 0
  double max_violation = 0.0;
  double max_lcc_violation = 0.0;
  double min_b = 0.0;
  double tol = 0.0;
  bool passed = true;
};

// Checks, for sampled unit x and every level m with P_m x != 0, that
// b_m(x) * f_x restricted to X_m pairs with P_m x to |P_m x|, has dual norm 1,
// matches the norming functional of P_m x coordinatewise, and that
// b_m(x) >= 1. The local variant samples x in X_{m+1} and checks the one-step
// restriction to X_m. Violations are reported, never thrown.
CCReport certify_cc(const TowerSpec& spec, int samples, double tol, std::uint64_t seed,
                    const DualityModel& model = DualityModel::exact());

}  // namespace numindex

#endif  // NUMINDEX_DUALITY_HPP
