#include "numindex/duality.hpp"

#include "numindex/random.hpp"

#include <algorithm>
#include <cmath>

namespace numindex {

NormingSet NormingSet::of(const TowerSpec& spec, const Eigen::VectorXd& x) {
  NormingSet set;
  set.base_ = normalized(spec, x);
  if (spec.is_smooth()) {
    set.kind_ = Kind::kSmooth;
    set.functional_ = norming_functional(spec, set.base_);
    return set;
  }
  set.pattern_ = Eigen::VectorXd::Zero(x.size());
  if (spec.flat_exponent() == 1.0) {
    set.kind_ = Kind::kL1Face;
    for (Index i = 0; i < x.size(); ++i) set.pattern_[i] = detail::sign(x[i]);
  } else {
    set.kind_ = Kind::kLinfHull;
    const double scale = x.cwiseAbs().maxCoeff();
    for (Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) == scale) set.pattern_[i] = detail::sign(x[i]);
    }
  }
  return set;
}

double NormingSet::sup(const Eigen::VectorXd& v) const {
  switch (kind_) {
    case Kind::kSmooth:
      return functional_.dot(v);
    case Kind::kL1Face: {
      double sup = 0.0;
      for (Index i = 0; i < v.size(); ++i) {
        sup += pattern_[i] != 0.0 ? pattern_[i] * v[i] : std::abs(v[i]);
      }
      return sup;
    }
    case Kind::kLinfHull: {
      double sup = -kInfinity;
      for (Index i = 0; i < v.size(); ++i) {
        if (pattern_[i] != 0.0) sup = std::max(sup, pattern_[i] * v[i]);
      }
      return sup;
    }
  }
  return 0.0;
}

bool NormingSet::contains(const Eigen::VectorXd& f, double tol) const {
  switch (kind_) {
    case Kind::kSmooth:
      return (f - functional_).cwiseAbs().maxCoeff() <= tol;
    case Kind::kL1Face:
      for (Index i = 0; i < f.size(); ++i) {
        if (pattern_[i] != 0.0 ? std::abs(f[i] - pattern_[i]) > tol : std::abs(f[i]) > 1.0 + tol) {
          return false;
        }
      }
      return true;
    case Kind::kLinfHull: {
      double mass = 0.0;
      for (Index i = 0; i < f.size(); ++i) {
        if (pattern_[i] == 0.0) {
          if (std::abs(f[i]) > tol) return false;
        } else {
          if (f[i] * pattern_[i] < -tol) return false;
          mass += std::abs(f[i]);
        }
      }
      return std::abs(mass - 1.0) <= tol;
    }
  }
  return false;
}

std::vector<Eigen::VectorXd> NormingSet::extreme_points() const {
  std::vector<Eigen::VectorXd> points;
  if (kind_ == Kind::kSmooth) {
    points.push_back(functional_);
    return points;
  }
  if (kind_ == Kind::kLinfHull) {
    for (Index i = 0; i < pattern_.size(); ++i) {
      if (pattern_[i] == 0.0) continue;
      Eigen::VectorXd f = Eigen::VectorXd::Zero(pattern_.size());
      f[i] = pattern_[i];
      points.push_back(std::move(f));
    }
    return points;
  }
  std::vector<Index> free;
  for (Index i = 0; i < pattern_.size(); ++i) {
    if (pattern_[i] == 0.0) free.push_back(i);
  }
  const std::size_t count = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd f = pattern_;
    for (std::size_t k = 0; k < free.size(); ++k) f[free[k]] = (mask >> k) & 1U ? 1.0 : -1.0;
    points.push_back(std::move(f));
  }
  return points;
}

DualityModel DualityModel::exact() {
  DualityModel model;
  model.norm = [](const TowerSpec& spec, const Eigen::VectorXd& x) { return tower_norm(spec, x); };
  model.norming = [](const TowerSpec& spec, const Eigen::VectorXd& x) {
    return Eigen::VectorXd(norming_functional(spec, x));
  };
  model.dual_norm = [](const TowerSpec& spec, const Eigen::VectorXd& f) { return numindex::dual_norm(spec, f); };
  model.b_constant = [](const TowerSpec& spec, const Eigen::VectorXd& x, int m) {
    return numindex::b_constant(spec, x, m).value;
  };
  return model;
}

namespace {

struct Violation {
  double value = 0.0;
  bool skipped = false;
  double b = kInfinity;
};

// Largest violation of "b * f|_{X_m} is the norming functional of P_m x" for
// a functional f on `spec` (norming for x) and the truncated space X_m.
Violation restriction_violation(const TowerSpec& spec, const Eigen::VectorXd& x, int m,
                                const DualityModel& model) {
  Violation out;
  const TowerSpec level = spec.truncated(m);
  const Eigen::VectorXd px = x.head(spec.level_dim(m));
  const double px_norm = model.norm(level, px);
  if (!(px_norm > 0.0)) {
    out.skipped = true;
    return out;
  }
  double b = 0.0;
  try {
    b = model.b_constant(spec, x, m);
  } catch (const DegenerateSupportError&) {
    out.skipped = true;
    return out;
  }
  const Eigen::VectorXd f = model.norming(spec, x);
  const Eigen::VectorXd g = b * f.head(spec.level_dim(m));
  const Eigen::VectorXd reference = model.norming(level, px);

  // Pairing is checked relative to |P_m x|; the functional itself has scale one.
  const double pairing = std::abs(g.dot(px) / px_norm - 1.0);
  const double unit = std::abs(model.dual_norm(level, g) - 1.0);
  const double coords = (g - reference).cwiseAbs().maxCoeff();
  const double x_norm = model.norm(spec, x);
  const double below_one = std::abs(x_norm - 1.0) < 1e-12 ? std::max(0.0, 1.0 - 1e-12 - b) : 0.0;
  out.value = std::max({pairing, unit, coords, below_one});
  if (!std::isfinite(out.value)) out.value = kInfinity;
  out.b = b;
  return out;
}

}  // namespace

CCReport certify_cc(const TowerSpec& spec, int samples, double tol, std::uint64_t seed,
                    const DualityModel& model) {
  if (!spec.is_smooth()) throw DomainError("certify_cc requires a smooth space");
  CCReport report;
  report.samples = std::max(samples, 0);
  report.tol = tol;
  report.min_b = kInfinity;

  for (int s = 0; s < report.samples; ++s) {
    // Include the coordinate axis e_1 as the first sample.
    Eigen::VectorXd x;
    if (s == 0) {
      x = Eigen::VectorXd::Zero(spec.dim());
      x[0] = 1.0;
    } else {
      x = random_sphere_coords(spec, derive_seed(seed, static_cast<std::uint64_t>(s)));
    }
    for (int m = 1; m <= spec.depth(); ++m) {
      const Violation v = restriction_violation(spec, x, m, model);
      if (v.skipped) {
        ++report.skipped;
        continue;
      }
      ++report.checked;
      report.max_violation = std::max(report.max_violation, v.value);
      report.min_b = std::min(report.min_b, v.b);
    }
    // Local form: x in X_{m+1}, restricted one step down.
    for (int m = 1; m < spec.depth(); ++m) {
      const TowerSpec upper = spec.truncated(m + 1);
      const Eigen::VectorXd y =
          random_sphere_coords(upper, derive_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(s * 64 + m)));
      const Violation v = restriction_violation(upper, y, m, model);
      if (v.skipped) {
        ++report.skipped;
        continue;
      }
      ++report.checked;
      report.max_lcc_violation = std::max(report.max_lcc_violation, v.value);
      report.min_b = std::min(report.min_b, v.b);
    }
  }
  if (report.checked == 0) report.min_b = 1.0;
  report.passed = report.max_violation < tol && report.max_lcc_violation < tol;
  return report;
}

}  // namespace numindex
