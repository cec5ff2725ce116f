#include "numindex/index_estimator.hpp"

#include "numindex/duality.hpp"
#include "numindex/errors.hpp"
#include "numindex/parallel.hpp"
#include "numindex/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace numindex {

namespace {

// Gains below this are rounding noise in the ratio.
constexpr double kAcceptGain = 1e-14;
constexpr int kLineSearchDoublings = 8;
constexpr int kBundleSize = 6;

struct Evaluation {
  double ratio = std::numeric_limits<double>::infinity();
  double radius = 0.0;
  double norm = 0.0;
  Eigen::VectorXd radius_witness;  // x of the maximizing state (ambient coordinates for n1)
  Eigen::VectorXd norm_witness;
  Eigen::MatrixXd gradient;        // d ratio / d entries; empty when undefined
};

// Either nu(T)/|T| on `space`, or n1(L)/|L| for L on level m of `ambient`.
class RatioProblem {
 public:
  explicit RatioProblem(TowerSpec space) : space_(std::move(space)) {}
  RatioProblem(const TowerSpec& ambient, int m) : space_(ambient.truncated(m)), ambient_(ambient) {}

  const TowerSpec& space() const { return space_; }

  Evaluation evaluate(const Eigen::MatrixXd& t, const Evaluation* warm, int restarts, int iterations,
                      double tol, std::uint64_t seed) const {
    Evaluation e;
    const Operator op(space_, t);
    const SearchBudget inner{restarts, iterations, tol, seed};
    std::vector<Eigen::VectorXd> radius_warm;
    if (warm && warm->radius_witness.size()) radius_warm.push_back(warm->radius_witness);

    const RadiusEstimate radius =
        ambient_ ? n1_of_operator(op, *ambient_, inner, radius_warm) : numerical_radius(op, inner, radius_warm);
    e.radius = radius.value;
    e.radius_witness = radius.witness.x;

    // The state's own vector bounds the norm from below by the radius, so
    // the ratio cannot exceed 1 through an underestimated norm.
    Eigen::VectorXd x = radius.witness.x;
    Eigen::VectorXd f = radius.witness.functional;
    if (ambient_) {
      const Index cut = ambient_->level_dim(radius.projection_level);
      x.tail(x.size() - cut).setZero();
      f.tail(f.size() - cut).setZero();
      x = x.head(space_.dim()).eval();
      f = f.head(space_.dim()).eval();
    }
    std::vector<Eigen::VectorXd> norm_warm;
    if (warm && warm->norm_witness.size()) norm_warm.push_back(warm->norm_witness);
    if (x.norm() > 0.0) norm_warm.push_back(x);
    const NormEstimate norm = operator_norm(op, inner, NormMethod::kAuto, norm_warm);
    e.norm = norm.value;
    e.norm_witness = norm.witness;
    if (!(e.norm > 0.0) || !std::isfinite(e.norm)) return e;
    e.ratio = e.radius / e.norm;

    // Subgradient of the ratio from the two witnesses.
    const Eigen::VectorXd tw = t * norm.witness;
    if (tw.norm() == 0.0 || x.size() != space_.dim()) return e;
    const Eigen::VectorXd phi = space_.is_smooth() ? Eigen::VectorXd(norming_functional(space_, tw))
                                                   : NormingSet::of(space_, tw).extreme_points().front();
    const double w_norm = tower_norm(space_, norm.witness);
    const double sign = radius.witness.pairing < 0.0 ? -1.0 : 1.0;
    const Eigen::MatrixXd d_radius = sign * f * x.transpose();
    const Eigen::MatrixXd d_norm = phi * norm.witness.transpose() / w_norm;
    e.gradient = (d_radius * e.norm - e.radius * d_norm) / (e.norm * e.norm);
    return e;
  }

 private:
  TowerSpec space_;
  std::optional<TowerSpec> ambient_;
};

struct Descent {
  Eigen::MatrixXd t;
  Evaluation final;
};

// Rescales t (and the cached evaluation) to norm estimate 1. The ratio is
// unchanged; the gradient scales inversely.
// Least-norm point of the convex hull of `points` (Frank-Wolfe with exact
// line search; the bundles are tiny).
Eigen::MatrixXd least_norm_element(const std::vector<Eigen::MatrixXd>& points) {
  Eigen::MatrixXd z = points.front();
  for (int it = 0; it < 200; ++it) {
    std::size_t best = 0;
    double low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double v = points[i].cwiseProduct(z).sum();
      if (v < low) low = v, best = i;
    }
    const Eigen::MatrixXd d = points[best] - z;
    const double dd = d.squaredNorm();
    const double gap = -d.cwiseProduct(z).sum();
    if (!(dd > 0.0) || gap <= 1e-15 * z.squaredNorm()) break;
    z += std::min(1.0, gap / dd) * d;
  }
  return z;
}

void renormalize(Eigen::MatrixXd& t, Evaluation& e) {
  if (!(e.norm > 0.0)) return;
  const double s = e.norm;
  t /= s;
  e.radius /= s;
  e.norm = 1.0;
  if (e.gradient.size()) e.gradient *= s;
}

Descent descend(const RatioProblem& problem, Eigen::MatrixXd t, const IndexBudget& budget,
                std::uint64_t inner_seed) {
  auto eval = [&](const Eigen::MatrixXd& m, const Evaluation* warm) {
    return problem.evaluate(m, warm, budget.inner_restarts, budget.inner_iterations, budget.tol, inner_seed);
  };
  Evaluation cur = eval(t, nullptr);
  renormalize(t, cur);
  auto better = [&](const Evaluation& e) { return e.ratio < cur.ratio - kAcceptGain; };

  double step = budget.initial_step;
  // The ratio is nonnegative, so below tol there is nothing left to find.
  for (int sweep = 0; sweep < budget.max_sweeps && step >= budget.final_step && cur.ratio > budget.tol; ++sweep) {
    bool improved = false;
    // Subgradient line search: step, 2 step, 4 step ... while it keeps paying.
    // A failed first trial means a kink between maximizing states; its
    // gradient joins a bundle and the search retries along the least-norm
    // element of the bundle's hull.
    if (cur.gradient.size() && cur.gradient.norm() > 0.0) {
      std::vector<Eigen::MatrixXd> bundle{cur.gradient};
      Eigen::MatrixXd direction = cur.gradient;
      for (int attempt = 0; attempt < kBundleSize && !improved; ++attempt) {
        double s = step;
        for (int k = 0; k < kLineSearchDoublings; ++k) {
          const Eigen::MatrixXd trial = t - (s * t.norm() / direction.norm()) * direction;
          Evaluation e = eval(trial, &cur);
          if (!better(e)) {
            if (k == 0 && e.gradient.size()) bundle.push_back(std::move(e.gradient));
            break;
          }
          t = trial;
          cur = std::move(e);
          improved = true;
          step = std::min(s, budget.initial_step);
          s *= 2.0;
        }
        if (improved) break;
        direction = least_norm_element(bundle);
        if (!(direction.norm() > 1e-12 * cur.gradient.norm())) break;
      }
    }
    if (!improved) {
      const Eigen::MatrixXd base = t;
      for (Index j = 0; j < t.cols(); ++j) {
        for (Index i = 0; i < t.rows(); ++i) {
          for (double sign : {1.0, -1.0}) {
            Eigen::MatrixXd trial = t;
            trial(i, j) += sign * step;
            Evaluation e = eval(trial, &cur);
            if (better(e)) {
              t = std::move(trial);
              cur = std::move(e);
              improved = true;
              break;
            }
          }
        }
      }
      // Pattern move: keep going along the sweep's net displacement.
      if (improved) {
        Eigen::MatrixXd delta = t - base;
        for (int k = 0; k < kLineSearchDoublings; ++k) {
          const Eigen::MatrixXd trial = t + delta;
          Evaluation e = eval(trial, &cur);
          if (!better(e)) break;
          t = trial;
          cur = std::move(e);
          delta *= 2.0;
        }
      }
    }
    renormalize(t, cur);
    if (!improved) step *= 0.5;
  }

  Evaluation final = problem.evaluate(t, &cur, budget.inner_restarts * budget.final_factor,
                                      budget.inner_iterations, budget.tol, derive_seed(inner_seed, 1));
  renormalize(t, final);
  return {std::move(t), std::move(final)};
}

void check_budget(const IndexBudget& b) {
  if (b.restarts < 1 || b.inner_restarts < 0 || b.inner_iterations < 1 || b.final_factor < 1 ||
      !(b.initial_step > 0.0) || !(b.final_step > 0.0) || b.max_sweeps < 0 || !(b.tol > 0.0)) {
    throw SpecError("invalid index budget");
  }
}

IndexEstimate run(const RatioProblem& problem, const IndexBudget& budget, std::uint64_t seed,
                  const std::optional<Operator>& warm) {
  check_budget(budget);
  const TowerSpec& spec = problem.space();
  IndexEstimate out;
  out.budget = budget;
  out.seed = seed;

  // Scalars: nu(t) = |t| = |t| on every dimension-1 space.
  if (spec.dim() == 1) {
    out.value = 1.0;
    out.witness = Operator::identity(spec);
    out.witness_radius = 1.0;
    out.trace.assign(budget.restarts, 1.0);
    return out;
  }
  if (warm && !(warm->spec() == spec)) {
    throw StructuralError("warm operator lives on " + warm->spec().describe() + ", expected " + spec.describe());
  }

  std::vector<Descent> results(budget.restarts);
  parallel_for(results.size(), [&](std::size_t k) {
    const std::uint64_t stream = derive_seed(seed, k);
    Eigen::MatrixXd t0 = (k == 0 && warm) ? warm->matrix() : random_operator(spec, stream).matrix();
    results[k] = descend(problem, std::move(t0), budget, derive_seed(stream, 1));
  });

  out.trace.reserve(results.size());
  double mean = 0.0;
  for (const Descent& d : results) {
    out.trace.push_back(d.final.ratio);
    mean += d.final.ratio;
  }
  mean /= static_cast<double>(results.size());
  double var = 0.0;
  for (double v : out.trace) var += (v - mean) * (v - mean);
  out.restart_variance = var / static_cast<double>(results.size());
  out.noisy = out.restart_variance > kNoisyVariance;

  const auto best = std::min_element(out.trace.begin(), out.trace.end());
  out.best_restart = static_cast<int>(best - out.trace.begin());
  const Descent& winner = results[out.best_restart];
  out.value = winner.final.ratio;
  out.witness = Operator(spec, winner.t);
  out.witness_radius = winner.final.radius;
  return out;
}

}  // namespace

IndexEstimate estimate_index(const TowerSpec& spec, const IndexBudget& budget, std::uint64_t seed,
                             const std::optional<Operator>& warm) {
  return run(RatioProblem(spec), budget, seed, warm);
}

IndexEstimate estimate_n1_index(const TowerSpec& ambient, int m, const IndexBudget& budget, std::uint64_t seed,
                                const std::optional<Operator>& warm) {
  ambient.check_level(m);
  if (m < 1) throw LevelError("n1 index needs m >= 1");
  return run(RatioProblem(ambient, m), budget, seed, warm);
}

LimitScan limit_scan(const TowerSpec& tower, int m_min, int m_max, const IndexBudget& budget,
                     std::uint64_t seed) {
  if (m_min < 1 || m_min > m_max || m_max > tower.depth()) {
    throw LevelError("scan range " + std::to_string(m_min) + ".." + std::to_string(m_max) +
                     " outside levels 1.." + std::to_string(tower.depth()));
  }
  LimitScan scan;
  std::optional<Operator> warm_n, warm_n1;
  for (int m = m_min; m <= m_max; ++m) {
    const TowerSpec level = tower.truncated(m);
    ScanRow row;
    row.m = m;
    row.n = estimate_index(level, budget, derive_seed(seed, 2 * m), warm_n);
    row.n1 = estimate_n1_index(tower, m, budget, derive_seed(seed, 2 * m + 1), warm_n1);
    if (m < m_max) {
      const TowerSpec next = tower.truncated(m + 1);
      warm_n = embed(row.n.witness, next);
      warm_n1 = embed(row.n1.witness, next);
    }
    scan.rows.push_back(std::move(row));
  }

  const double deepest = scan.rows.back().n.value;
  for (std::size_t k = 0; k < scan.rows.size(); ++k) {
    ScanRow& row = scan.rows[k];
    row.floor_ok = row.n.value >= deepest - kScanTolerance;
    if (k >= 2) {
      const double d_prev = scan.rows[k - 1].n.value - scan.rows[k - 2].n.value;
      const double d = row.n.value - scan.rows[k - 1].n.value;
      row.envelope_ok = std::abs(d) <= std::abs(d_prev) + kScanTolerance;
    }
    scan.floor_ok = scan.floor_ok && row.floor_ok;
    scan.envelope_ok = scan.envelope_ok && row.envelope_ok;
  }
  return scan;
}

std::string row_flag(const ScanRow& row) {
  std::string flag;
  auto add = [&](const char* name) { flag += flag.empty() ? name : std::string(",") + name; };
  if (!row.floor_ok) add("below-floor");
  if (!row.envelope_ok) add("envelope");
  if (row.n.noisy || row.n1.noisy) add("noisy");
  return flag.empty() ? "pass" : flag;
}

}  // namespace numindex
