#include "numindex/operators.hpp"

#include "numindex/duality.hpp"
#include "numindex/random.hpp"

#include <cmath>

namespace numindex {

Operator::Operator(TowerSpec spec, Eigen::MatrixXd matrix) : spec_(std::move(spec)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != spec_.dim() || matrix_.cols() != spec_.dim()) {
    throw StructuralError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) + " but the space has dimension " +
                          std::to_string(spec_.dim()));
  }
  if (!matrix_.allFinite()) throw SpecError("operator entries must be finite");
}

Operator Operator::identity(const TowerSpec& spec) {
  return Operator(spec, Eigen::MatrixXd::Identity(spec.dim(), spec.dim()));
}

Operator Operator::zero(const TowerSpec& spec) {
  return Operator(spec, Eigen::MatrixXd::Zero(spec.dim(), spec.dim()));
}

Operator operator+(const Operator& a, const Operator& b) {
  if (!(a.spec() == b.spec())) throw StructuralError("operators act on different spaces");
  return Operator(a.spec(), a.matrix() + b.matrix());
}

Eigen::VectorXd apply(const Operator& op, const Eigen::VectorXd& x) {
  detail::check_size(op.spec(), x.size());
  return op.matrix() * x;
}

TowerVector apply(const Operator& op, const TowerVector& x) {
  if (!(x.spec() == op.spec())) throw StructuralError("vector and operator live on different spaces");
  return TowerVector(op.spec(), op.matrix() * x.coords());
}

bool is_euclidean(const TowerSpec& spec) {
  if (spec.is_flat()) return spec.flat_exponent() == 2.0 || spec.dim() == 1;
  for (double p : spec.exponents()) {
    if (p != 2.0) return false;
  }
  for (int n = 1; n <= spec.depth(); ++n) {
    if (spec.leaf_dim(n) > 1 && spec.leaf_exponent(n) != 2.0) return false;
  }
  return true;
}

namespace {

NormEstimate l1_columns(const Operator& op) {
  const Eigen::MatrixXd& t = op.matrix();
  Index best = 0;
  const Eigen::VectorXd sums = t.cwiseAbs().colwise().sum().transpose();
  sums.maxCoeff(&best);
  NormEstimate out;
  out.witness = Eigen::VectorXd::Unit(t.cols(), best);
  out.value = tower_norm(op.spec(), Eigen::VectorXd(t * out.witness));
  out.method = "l1-columns";
  return out;
}

NormEstimate linf_rows(const Operator& op) {
  const Eigen::MatrixXd& t = op.matrix();
  Index best = 0;
  const Eigen::VectorXd sums = t.cwiseAbs().rowwise().sum();
  sums.maxCoeff(&best);
  NormEstimate out;
  out.witness = Eigen::VectorXd(t.cols());
  for (Index j = 0; j < t.cols(); ++j) out.witness[j] = t(best, j) < 0.0 ? -1.0 : 1.0;
  out.value = tower_norm(op.spec(), Eigen::VectorXd(t * out.witness));
  out.method = "linf-rows";
  return out;
}

constexpr double kPowerTolerance = 1e-10;

// Largest singular value by power iteration on T^T T, stopped once the
// relative change falls under kPowerTolerance.
NormEstimate power_iteration(const Operator& op, const SearchBudget& budget,
                             const std::vector<Eigen::VectorXd>& warm_starts) {
  const Eigen::MatrixXd& t = op.matrix();
  const Index n = t.cols();
  Eigen::VectorXd v;
  if (!warm_starts.empty() && warm_starts.front().size() == n && warm_starts.front().norm() > 0.0) {
    v = warm_starts.front();
  } else {
    Engine engine = make_engine(budget.seed, 0xb0);
    std::normal_distribution<double> normal;
    v.resize(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(engine);
  }
  v.normalize();
  // Blend in a fixed generic direction so a warm start orthogonal to the top
  // singular vector still converges.
  Eigen::VectorXd generic = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0);
  v = (v + 1e-3 * generic.normalized()).normalized();

  NormEstimate out;
  out.method = "power-iteration";
  double sigma = (t * v).norm();
  long iterations = 0;
  const long limit = std::max<long>(budget.max_iterations, 1) * 20;
  while (iterations < limit) {
    ++iterations;
    Eigen::VectorXd next = t.transpose() * (t * v);
    const double length = next.norm();
    if (!(length > 0.0)) break;
    next /= length;
    const double next_sigma = (t * next).norm();
    const bool settled = std::abs(next_sigma - sigma) <= kPowerTolerance * std::max(next_sigma, 1e-300);
    if (next_sigma >= sigma) {
      v = next;
      sigma = next_sigma;
    }
    if (settled) break;
  }
  out.witness = v;
  out.value = (t * v).norm();
  out.provenance.iterations = iterations;
  out.provenance.restarts = 1;
  return out;
}

NormEstimate search_norm(const Operator& op, const SearchBudget& budget,
                         const std::vector<Eigen::VectorXd>& warm_starts) {
  const TowerSpec& spec = op.spec();
  const Eigen::MatrixXd& t = op.matrix();
  SphereObjective objective;
  objective.value = [&](const Eigen::VectorXd& y) {
    return tower_norm(spec, Eigen::VectorXd(t * y)) / tower_norm(spec, y);
  };
  if (spec.is_smooth()) {
    objective.gradient = [&](const Eigen::VectorXd& y) {
      const Eigen::VectorXd ty = t * y;
      const double y_norm = tower_norm(spec, y);
      const double ty_norm = tower_norm(spec, ty);
      if (!(ty_norm > 0.0)) return Eigen::VectorXd(Eigen::VectorXd::Zero(y.size()));
      const Eigen::VectorXd g = t.transpose() * norming_functional(spec, ty) -
                                (ty_norm / y_norm) * norming_functional(spec, y);
      return Eigen::VectorXd(g / y_norm);
    };
  }
  const SearchResult found = maximize_on_sphere(spec, objective, budget, warm_starts);
  NormEstimate out;
  out.witness = found.witness;
  out.value = tower_norm(spec, Eigen::VectorXd(t * found.witness)) / tower_norm(spec, found.witness);
  out.method = "multistart";
  out.provenance = found.provenance;
  return out;
}

}  // namespace

NormEstimate operator_norm(const Operator& op, const SearchBudget& budget, NormMethod method,
                           const std::vector<Eigen::VectorXd>& warm_starts) {
  const TowerSpec& spec = op.spec();
  NormEstimate out;
  if (method == NormMethod::kAuto && spec.is_flat() && spec.flat_exponent() == 1.0) {
    out = l1_columns(op);
  } else if (method == NormMethod::kAuto && spec.is_flat() && std::isinf(spec.flat_exponent())) {
    out = linf_rows(op);
  } else if (method == NormMethod::kAuto && is_euclidean(spec)) {
    out = power_iteration(op, budget, warm_starts);
  } else {
    return search_norm(op, budget, warm_starts);
  }
  out.provenance.seed = budget.seed;
  out.provenance.tol = budget.tol;
  if (out.provenance.restarts == 0) out.provenance.restarts = 1;
  return out;
}

Operator embed(const Operator& op, const TowerSpec& target) {
  const int depth = op.spec().depth();
  if (depth > target.depth() || !(target.truncated(depth) == op.spec())) {
    throw StructuralError("operator space " + op.spec().describe() + " is not a level of " +
                          target.describe());
  }
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(target.dim(), target.dim());
  matrix.topLeftCorner(op.dim(), op.dim()) = op.matrix();
  return Operator(target, std::move(matrix));
}

Operator compose_with_projection(const Operator& op, const TowerSpec& ambient, int m, int j) {
  ambient.check_level(m);
  if (!(ambient.truncated(m) == op.spec())) {
    throw StructuralError("operator does not live on level " + std::to_string(m) + " of " +
                          ambient.describe());
  }
  if (j < 0) throw LevelError("projection step count must be nonnegative");
  if (j == 0) return op;
  const Projection q = compose_projections(ambient, m, j);
  const Operator lifted = embed(op, q.domain());
  return Operator(q.domain(), lifted.matrix() * q.matrix());
}

Operator compose_with_ambient_projection(const Operator& op, const TowerSpec& ambient, int m) {
  ambient.check_level(m);
  if (!(ambient.truncated(m) == op.spec())) {
    throw StructuralError("operator does not live on level " + std::to_string(m) + " of " +
                          ambient.describe());
  }
  const Projection q = Projection::ambient(ambient, m);
  return Operator(ambient, embed(op, ambient).matrix() * q.matrix());
}

Operator random_operator(const TowerSpec& spec, std::uint64_t seed, bool normalize,
                         const SearchBudget& budget) {
  Engine engine = make_engine(seed, 0x0e);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd matrix(spec.dim(), spec.dim());
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) matrix(i, j) = normal(engine);
  }
  Operator op(spec, std::move(matrix));
  if (!normalize) return op;
  const double scale = operator_norm(op, budget).value;
  return scale > 0.0 ? op.scaled(1.0 / scale) : op;
}

}  // namespace numindex
