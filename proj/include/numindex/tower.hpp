#ifndef NUMINDEX_TOWER_HPP
#define NUMINDEX_TOWER_HPP

#include "numindex/errors.hpp"
#include "numindex/tower_spec.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

namespace numindex {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

// Sums run in long double when the working scalar is narrower.
template <typename Scalar>
using Accumulator =
    std::conditional_t<std::is_floating_point_v<Scalar> && (sizeof(Scalar) < sizeof(long double)),
                       long double, Scalar>;

template <typename Scalar>
Scalar pow_abs(Scalar value, double p) {
  using std::abs;
  using std::pow;
  return pow(abs(value), static_cast<Scalar>(p));
}

// (a^p + b^p)^{1/p} for a, b >= 0, p in [1, inf].
template <typename Scalar>
Scalar combine2(Scalar a, Scalar b, double p) {
  using std::pow;
  if (std::isinf(p)) return std::max(a, b);
  if (p == 1.0) return a + b;
  const Scalar scale = std::max(a, b);
  if (scale == Scalar(0)) return Scalar(0);
  using Acc = Accumulator<Scalar>;
  const Acc sum = Acc(pow_abs(Scalar(a / scale), p)) + Acc(pow_abs(Scalar(b / scale), p));
  return scale * pow(static_cast<Scalar>(sum), Scalar(1) / Scalar(p));
}

// l_r norm of a contiguous coordinate block.
template <typename Derived>
typename Derived::Scalar block_norm(const Eigen::MatrixBase<Derived>& block, double r) {
  using Scalar = typename Derived::Scalar;
  using Acc = Accumulator<Scalar>;
  using std::pow;
  const Index n = block.size();
  if (n == 1) {
    using std::abs;
    return abs(block.coeff(0));
  }
  const Scalar scale = block.cwiseAbs().maxCoeff();
  if (std::isinf(r) || scale == Scalar(0)) return scale;
  Acc sum = 0;
  if (r == 1.0) {
    for (Index i = 0; i < n; ++i) sum += Acc(std::abs(block.coeff(i)));
    return static_cast<Scalar>(sum);
  }
  for (Index i = 0; i < n; ++i) sum += Acc(pow_abs(Scalar(block.coeff(i) / scale), r));
  return scale * pow(static_cast<Scalar>(sum), Scalar(1) / Scalar(r));
}

inline void check_size(const TowerSpec& spec, Index size) {
  if (size != spec.dim()) {
    throw StructuralError("coordinate length " + std::to_string(size) +
                          " does not match space dimension " + std::to_string(spec.dim()));
  }
}

}  // namespace detail

// Norms |P_m x| of every level m = 1..depth (entry m - 1). The last entry is
// the norm of x.
template <typename Derived>
Vector<typename Derived::Scalar> level_norms(const TowerSpec& spec,
                                             const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Acc = detail::Accumulator<Scalar>;
  using std::abs;
  using std::pow;
  detail::check_size(spec, x.size());
  const int depth = spec.depth();
  Vector<Scalar> norms(depth);
  if (spec.is_flat()) {
    const double p = spec.flat_exponent();
    if (std::isinf(p)) {
      Scalar running = 0;
      for (int m = 0; m < depth; ++m) norms[m] = running = std::max(running, Scalar(abs(x.coeff(m))));
      return norms;
    }
    const Scalar scale = x.cwiseAbs().maxCoeff();
    Acc sum = 0;
    for (int m = 0; m < depth; ++m) {
      if (p == 1.0) {
        sum += Acc(abs(x.coeff(m)));
        norms[m] = static_cast<Scalar>(sum);
      } else if (scale == Scalar(0)) {
        norms[m] = 0;
      } else {
        sum += Acc(detail::pow_abs(Scalar(x.coeff(m) / scale), p));
        norms[m] = scale * pow(static_cast<Scalar>(sum), Scalar(1) / Scalar(p));
      }
    }
    return norms;
  }
  norms[0] = detail::block_norm(x.segment(0, spec.leaf_dim(1)), spec.leaf_exponent(1));
  for (int n = 2; n <= depth; ++n) {
    const Scalar leaf =
        detail::block_norm(x.segment(spec.leaf_offset(n), spec.leaf_dim(n)), spec.leaf_exponent(n));
    norms[n - 1] = detail::combine2(norms[n - 2], leaf, spec.combining_exponent(n - 1));
  }
  return norms;
}

// Recursive tower norm of x.
template <typename Derived>
typename Derived::Scalar tower_norm(const TowerSpec& spec, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Acc = detail::Accumulator<Scalar>;
  using std::pow;
  detail::check_size(spec, x.size());
  if (spec.is_flat()) {
    const double p = spec.flat_exponent();
    const Scalar scale = x.cwiseAbs().maxCoeff();
    if (std::isinf(p) || scale == Scalar(0)) return scale;
    Acc sum = 0;
    if (p == 1.0) {
      for (Index i = 0; i < x.size(); ++i) sum += Acc(std::abs(x.coeff(i)));
      return static_cast<Scalar>(sum);
    }
    for (Index i = 0; i < x.size(); ++i) sum += Acc(detail::pow_abs(Scalar(x.coeff(i) / scale), p));
    return scale * pow(static_cast<Scalar>(sum), Scalar(1) / Scalar(p));
  }
  return level_norms(spec, x)[spec.depth() - 1];
}

// x / |x|; throws DomainError for x = 0.
template <typename Derived>
Vector<typename Derived::Scalar> normalized(const TowerSpec& spec, const Eigen::MatrixBase<Derived>& x) {
  const auto n = tower_norm(spec, x);
  if (!(n > 0)) throw DomainError("cannot normalize the zero vector");
  return x / n;
}

// Zero every leaf block with index > m.
template <typename Derived>
Vector<typename Derived::Scalar> project(const TowerSpec& spec, const Eigen::MatrixBase<Derived>& x,
                                         int m) {
  detail::check_size(spec, x.size());
  spec.check_level(m);
  Vector<typename Derived::Scalar> out = x;
  const Index keep = spec.level_dim(m);
  out.tail(out.size() - keep).setZero();
  return out;
}

// Coordinates paired with their space. Immutable; operations return fresh values.
class TowerVector {
 public:
  TowerVector(TowerSpec spec, Eigen::VectorXd coords) : spec_(std::move(spec)), coords_(std::move(coords)) {
    detail::check_size(spec_, coords_.size());
  }

  const TowerSpec& spec() const { return spec_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  Index size() const { return coords_.size(); }
  double operator[](Index i) const { return coords_[i]; }

 private:
  TowerSpec spec_;
  Eigen::VectorXd coords_;
};

double norm(const TowerVector& x);
TowerVector project(const TowerVector& x, int m);

// Unit vector (|x| = 1) with seeded Gaussian direction.
TowerVector random_sphere_point(const TowerSpec& spec, std::uint64_t seed);
Eigen::VectorXd random_sphere_coords(const TowerSpec& spec, std::uint64_t seed);

// Norm-one projections of the tower.
//
//   kStep:    P_m        X_{m+1} -> X_m
//   kChain:   Q_{m,j} = P_m o P_{m+1} o ... o P_{m+j-1}   X_{m+j} -> X_m
//   kAmbient: Q_m        X -> X_m
//
// Each is realized on the coordinates of its domain, whose image X_m sits in
// the leading level_dim(m) coordinates.
class Projection {
 public:
  enum class Kind { kStep, kChain, kAmbient };

  static Projection step(const TowerSpec& spec, int m);
  static Projection chain(const TowerSpec& spec, int m, int j);
  static Projection ambient(const TowerSpec& spec, int m);

  Kind kind() const { return kind_; }
  int level() const { return level_; }
  int steps() const { return steps_; }
  // Spec of the domain (X_{m+1}, X_{m+j} or X).
  const TowerSpec& domain() const { return domain_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  TowerVector apply(const TowerVector& x) const;

 private:
  Projection(Kind kind, int level, int steps, TowerSpec domain, Eigen::MatrixXd matrix)
      : kind_(kind), level_(level), steps_(steps), domain_(std::move(domain)), matrix_(std::move(matrix)) {}

  Kind kind_;
  int level_;
  int steps_;
  TowerSpec domain_;
  Eigen::MatrixXd matrix_;
};

// Q_{m,j}, built by multiplying the one-step projections.
Projection compose_projections(const TowerSpec& spec, int m, int j);

}  // namespace numindex

#endif  // NUMINDEX_TOWER_HPP
