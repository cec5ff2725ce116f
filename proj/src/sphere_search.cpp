#include "numindex/sphere_search.hpp"

#include "numindex/parallel.hpp"
#include "numindex/random.hpp"
#include "numindex/tower.hpp"

#include <algorithm>
#include <cmath>

namespace numindex {

namespace {

constexpr double kGradientStep = 1e-6;
constexpr double kMinCompassStep = 1e-9;

struct LocalResult {
  double value = -kInfinity;
  Eigen::VectorXd point;
  long iterations = 0;
};

class LocalSearch {
 public:
  LocalSearch(const TowerSpec& spec, const SphereObjective& objective, const SearchBudget& budget)
      : spec_(spec), objective_(objective), budget_(budget),
        linf_(spec.is_flat() && std::isinf(spec.flat_exponent())) {}

  LocalResult run(const Eigen::VectorXd& start) {
    LocalResult result;
    result.point = normalized(spec_, start);
    result.value = evaluate(result.point);
    if (spec_.is_smooth()) ascend(result);
    polish(result);
    return result;
  }

 private:
  double evaluate(const Eigen::VectorXd& y) const {
    const double v = objective_.value(y);
    return std::isnan(v) ? -kInfinity : v;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& y) const {
    if (objective_.gradient) return objective_.gradient(y);
    Eigen::VectorXd g(y.size());
    Eigen::VectorXd probe = y;
    for (Index i = 0; i < y.size(); ++i) {
      probe[i] = y[i] + kGradientStep;
      const double up = evaluate(probe);
      probe[i] = y[i] - kGradientStep;
      const double down = evaluate(probe);
      probe[i] = y[i];
      g[i] = (up - down) / (2.0 * kGradientStep);
    }
    return g;
  }

  // Quasi-Newton ascent (BFGS on the unnormalized coordinates). The objective
  // is scale invariant, so the point is only renormalized when it drifts.
  void ascend(LocalResult& state) const {
    const Index n = state.point.size();
    Eigen::VectorXd x = state.point;
    double value = state.value;
    Eigen::VectorXd g = gradient(x);
    if (!g.allFinite()) return;
    Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(n, n);
    bool fresh = true;
    int stalled = 0;
    while (state.iterations < budget_.max_iterations) {
      ++state.iterations;
      const double g_norm = g.norm();
      if (!(g_norm > 1e-13)) break;
      if (fresh) inverse_hessian = Eigen::MatrixXd::Identity(n, n) * (0.1 / g_norm);
      Eigen::VectorXd direction = inverse_hessian * g;
      double slope = g.dot(direction);
      if (!(slope > 0.0)) {
        inverse_hessian = Eigen::MatrixXd::Identity(n, n) * (0.1 / g_norm);
        direction = inverse_hessian * g;
        slope = g.dot(direction);
      }
      double alpha = 1.0;
      Eigen::VectorXd next;
      double next_value = -kInfinity;
      bool accepted = false;
      while (alpha > 1e-12) {
        next = x + alpha * direction;
        next_value = evaluate(next);
        if (next_value >= value + 1e-4 * alpha * slope && next_value > value) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        if (fresh) break;
        fresh = true;  // retry once along the gradient
        continue;
      }
      const Eigen::VectorXd next_g = gradient(next);
      if (!next_g.allFinite()) break;
      const Eigen::VectorXd step = next - x;
      // Secant pair for the minimization of -objective.
      const Eigen::VectorXd change = g - next_g;
      const double curvature = change.dot(step);
      if (curvature > 1e-16 * step.norm() * change.norm()) {
        const double rho = 1.0 / curvature;
        const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * step * change.transpose();
        inverse_hessian = left * inverse_hessian * left.transpose() + rho * step * step.transpose();
        fresh = false;
      }
      const double gain = next_value - value;
      x = next;
      value = next_value;
      g = next_g;
      stalled = gain < 1e-3 * budget_.tol * std::max(1.0, std::abs(value)) ? stalled + 1 : 0;
      if (stalled >= 2) break;
      const double scale = tower_norm(spec_, x);
      if (scale < 0.5 || scale > 2.0) {
        x /= scale;
        g = gradient(x);
        fresh = true;
      }
    }
    const Eigen::VectorXd unit = normalized(spec_, x);
    const double unit_value = evaluate(unit);
    if (unit_value >= state.value) {
      state.point = unit;
      state.value = unit_value;
    }
  }

  bool try_move(LocalResult& state, const Eigen::VectorXd& trial, bool accept_ties) const {
    const double trial_norm = tower_norm(spec_, trial);
    if (!(trial_norm > 0.0)) return false;
    const Eigen::VectorXd candidate = trial / trial_norm;
    const double value = evaluate(candidate);
    // Gains below a few ulps are rounding noise and would never terminate.
    const double noise = 1e-14 * std::max(1.0, std::abs(state.value));
    if (value > state.value + noise || (accept_ties && value >= state.value)) {
      state.point = candidate;
      state.value = value;
      return true;
    }
    return false;
  }

  // Compass search; also tries zeroing coordinates and, on l_inf, lifting a
  // coordinate to the current maximum magnitude, which reaches the faces
  // where the norming set is larger.
  void polish(LocalResult& state) const {
    double step = spec_.is_smooth() ? 1e-4 : 0.25;
    while (step >= kMinCompassStep && state.iterations < budget_.max_iterations) {
      ++state.iterations;
      bool improved = false;
      const double sweep_start = state.value;
      for (Index i = 0; i < state.point.size(); ++i) {
        Eigen::VectorXd trial = state.point;
        if (state.point[i] != 0.0) {
          trial[i] = 0.0;
          if (try_move(state, trial, true)) {
            improved = true;
            continue;
          }
        }
        if (linf_) {
          const double top = state.point.cwiseAbs().maxCoeff();
          if (std::abs(state.point[i]) != top) {
            bool snapped = false;
            for (double sign : {1.0, -1.0}) {
              trial = state.point;
              trial[i] = sign * top;
              if (try_move(state, trial, false)) {
                snapped = true;
                break;
              }
            }
            if (snapped) {
              improved = true;
              continue;
            }
          }
        }
        for (double direction : {1.0, -1.0}) {
          trial = state.point;
          trial[i] += direction * step;
          if (try_move(state, trial, false)) {
            improved = true;
            break;
          }
        }
      }
      // Sweeps that only creep forward count as converged at this step size.
      const double sweep_gain = state.value - sweep_start;
      if (!improved || sweep_gain < 1e-3 * budget_.tol * std::max(1.0, std::abs(state.value))) {
        step *= 0.5;
      } else {
        step = std::min(2.0 * step, 0.25);
      }
    }
  }

  const TowerSpec& spec_;
  const SphereObjective& objective_;
  const SearchBudget& budget_;
  bool linf_;
};

std::vector<Eigen::VectorXd> structured_starts(const TowerSpec& spec) {
  std::vector<Eigen::VectorXd> starts;
  const Index n = spec.dim();
  for (Index i = 0; i < n; ++i) starts.push_back(Eigen::VectorXd::Unit(n, i));
  if (spec.is_flat() && std::isinf(spec.flat_exponent()) && n >= 2 && n <= 9) {
    // Sign vectors up to a global sign.
    const std::size_t count = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < count; ++mask) {
      Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
      for (Index i = 1; i < n; ++i) {
        if ((mask >> (i - 1)) & 1U) v[i] = -1.0;
      }
      starts.push_back(std::move(v));
    }
  }
  return starts;
}

}  // namespace

SearchResult maximize_on_sphere(const TowerSpec& spec, const SphereObjective& objective,
                                const SearchBudget& budget,
                                const std::vector<Eigen::VectorXd>& warm_starts) {
  std::vector<Eigen::VectorXd> starts;
  for (const auto& w : warm_starts) {
    if (w.size() == spec.dim() && w.allFinite() && w.cwiseAbs().maxCoeff() > 0.0) starts.push_back(w);
  }
  for (auto& s : structured_starts(spec)) starts.push_back(std::move(s));
  for (int r = 0; r < std::max(budget.restarts, 0); ++r) {
    starts.push_back(random_sphere_coords(spec, derive_seed(budget.seed, static_cast<std::uint64_t>(r))));
  }

  std::vector<LocalResult> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t k) {
    LocalSearch search(spec, objective, budget);
    results[k] = search.run(starts[k]);
  });

  SearchResult out;
  out.provenance.seed = budget.seed;
  out.provenance.restarts = static_cast<int>(starts.size());
  out.provenance.tol = budget.tol;
  out.value = -kInfinity;
  for (std::size_t k = 0; k < results.size(); ++k) {
    out.provenance.iterations += results[k].iterations;
    if (results[k].value > out.value) {
      out.value = results[k].value;
      out.witness = results[k].point;
      out.best_start = static_cast<int>(k);
    }
  }
  if (out.witness.size() == 0 && !starts.empty()) {
    out.witness = normalized(spec, starts.front());
    out.best_start = 0;
  }
  return out;
}

}  // namespace numindex
