#include "numindex/numerical_range.hpp"

#include "numindex/duality.hpp"
#include "numindex/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace numindex {

namespace {

// max(sup_{N(y)} f(Ty), sup_{N(y)} f(-Ty)), scale invariant in y.
double radius_objective(const TowerSpec& spec, const Eigen::MatrixXd& t, const Eigen::VectorXd& y) {
  const Eigen::VectorXd ty = t * y;
  const double y_norm = tower_norm(spec, y);
  if (spec.is_smooth()) return std::abs(norming_functional(spec, y).dot(ty)) / y_norm;
  const Eigen::VectorXd minus = -ty;
  return std::max(norming_sup(spec, y, ty), norming_sup(spec, y, minus)) / y_norm;
}

StatePair realize_state(const TowerSpec& spec, const Eigen::MatrixXd& t, const Eigen::VectorXd& x) {
  StatePair state;
  state.x = x;
  const Eigen::VectorXd tx = t * x;
  const NormingSet set = NormingSet::of(spec, x);
  std::vector<Eigen::VectorXd> candidates;
  if (set.kind() == NormingSet::Kind::kL1Face) {
    // The maximizers of +-f(Tx) over the face fill free coordinates with +-sgn(Tx).
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd f = set.pattern();
      for (Index i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) f[i] = sign * (tx[i] < 0.0 ? -1.0 : 1.0);
      }
      candidates.push_back(std::move(f));
    }
  } else {
    candidates = set.extreme_points();
  }
  double best = -1.0;
  for (const auto& f : candidates) {
    const double pairing = f.dot(tx);
    if (std::abs(pairing) > best) {
      best = std::abs(pairing);
      state.functional = f;
      state.pairing = pairing;
    }
  }
  return state;
}

void require_level(const Operator& op, const TowerSpec& ambient) {
  const int m = op.spec().depth();
  if (m > ambient.depth() || !(ambient.truncated(m) == op.spec())) {
    throw StructuralError("operator space " + op.spec().describe() + " is not a level of " +
                          ambient.describe());
  }
}

}  // namespace

RadiusEstimate numerical_radius(const Operator& op, const SearchBudget& budget,
                                const std::vector<Eigen::VectorXd>& warm_starts, RadiusMethod method) {
  const TowerSpec& spec = op.spec();
  const Eigen::MatrixXd& t = op.matrix();
  if (method == RadiusMethod::kAuto && is_euclidean(spec)) {
    const Eigen::MatrixXd sym = 0.5 * (t + t.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    Index k = 0;
    eig.eigenvalues().cwiseAbs().maxCoeff(&k);
    RadiusEstimate out;
    out.witness.x = eig.eigenvectors().col(k);
    out.witness.functional = out.witness.x;
    out.witness.pairing = out.witness.x.dot(t * out.witness.x);
    out.value = std::abs(out.witness.pairing);
    out.provenance = Provenance{budget.seed, 0, 0, budget.tol};
    out.method = "symmetric-eigen";
    return out;
  }
  SphereObjective objective;
  objective.value = [&](const Eigen::VectorXd& y) { return radius_objective(spec, t, y); };
  const SearchResult found = maximize_on_sphere(spec, objective, budget, warm_starts);

  RadiusEstimate out;
  out.witness = realize_state(spec, t, found.witness);
  out.value = std::abs(out.witness.pairing);
  out.provenance = found.provenance;
  out.method = "multistart";
  return out;
}

std::vector<double> sample_numerical_range(const Operator& op, int samples, std::uint64_t seed) {
  const TowerSpec& spec = op.spec();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_sphere_coords(spec, derive_seed(seed, static_cast<std::uint64_t>(s)));
    const Eigen::VectorXd tx = op.matrix() * x;
    const NormingSet set = NormingSet::of(spec, x);
    Eigen::VectorXd f;
    if (set.kind() == NormingSet::Kind::kSmooth) {
      f = set.functional();
    } else {
      // Random convex combination of the extreme points.
      Engine engine = make_engine(seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      const auto points = set.extreme_points();
      Eigen::VectorXd weights(static_cast<Index>(points.size()));
      for (Index k = 0; k < weights.size(); ++k) weights[k] = -std::log(1.0 - uniform(engine));
      weights /= weights.sum();
      f = Eigen::VectorXd::Zero(x.size());
      for (std::size_t k = 0; k < points.size(); ++k) f += weights[static_cast<Index>(k)] * points[k];
    }
    values.push_back(f.dot(tx));
  }
  return values;
}

Operator compressed_operator(const Operator& op, const TowerSpec& ambient, int j) {
  require_level(op, ambient);
  if (j < 1 || j > op.spec().depth()) {
    throw LevelError("compression level " + std::to_string(j) + " outside [1, m]");
  }
  const Eigen::MatrixXd p = Projection::ambient(ambient, j).matrix();
  return Operator(ambient, p * embed(op, ambient).matrix() * p);
}

RadiusEstimate n1_of_operator(const Operator& op, const TowerSpec& ambient, const SearchBudget& budget,
                              const std::vector<Eigen::VectorXd>& warm_starts) {
  require_level(op, ambient);
  const int m = op.spec().depth();
  std::vector<RadiusEstimate> per_level(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) {
    SearchBudget level_budget = budget;
    level_budget.seed = derive_seed(budget.seed, static_cast<std::uint64_t>(j));
    per_level[static_cast<std::size_t>(j - 1)] =
        numerical_radius(compressed_operator(op, ambient, j), level_budget, warm_starts);
  }
  double top = 0.0;
  for (const auto& r : per_level) top = std::max(top, r.value);
  RadiusEstimate out;
  for (int j = 1; j <= m; ++j) {
    const auto& r = per_level[static_cast<std::size_t>(j - 1)];
    if (r.value >= top - budget.tol) {
      out = r;
      out.projection_level = j;
      break;
    }
  }
  out.value = top;
  out.provenance.seed = budget.seed;
  out.provenance.restarts = 0;
  out.provenance.iterations = 0;
  for (const auto& r : per_level) {
    out.provenance.restarts += r.provenance.restarts;
    out.provenance.iterations += r.provenance.iterations;
  }
  return out;
}

std::vector<RadiusEstimate> w_sequence(const Operator& op, const TowerSpec& ambient, int j_max,
                                       const SearchBudget& budget) {
  require_level(op, ambient);
  const int m = op.spec().depth();
  if (j_max < 0 || m + j_max > ambient.depth()) {
    throw LevelError("w-sequence needs m + j_max <= ambient depth (" + std::to_string(m) + " + " +
                     std::to_string(j_max) + " > " + std::to_string(ambient.depth()) + ")");
  }
  std::vector<RadiusEstimate> terms;
  for (int j = 0; j <= j_max; ++j) {
    SearchBudget term_budget = budget;
    term_budget.seed = derive_seed(budget.seed, static_cast<std::uint64_t>(j));
    terms.push_back(numerical_radius(compose_with_projection(op, ambient, m, j), term_budget));
  }
  return terms;
}

RadiusEstimate w_infinity(const Operator& op, const TowerSpec& ambient, const SearchBudget& budget) {
  require_level(op, ambient);
  SearchBudget tail_budget = budget;
  tail_budget.seed = derive_seed(budget.seed, 0x1f);
  return numerical_radius(compose_with_ambient_projection(op, ambient, op.spec().depth()), tail_budget);
}

}  // namespace numindex
