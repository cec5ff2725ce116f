#include "numindex/tower.hpp"

#include "numindex/random.hpp"

namespace numindex {

double norm(const TowerVector& x) { return tower_norm(x.spec(), x.coords()); }

TowerVector project(const TowerVector& x, int m) {
  return TowerVector(x.spec(), project(x.spec(), x.coords(), m));
}

Eigen::VectorXd random_sphere_coords(const TowerSpec& spec, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(spec.dim());
  do {
    for (Index i = 0; i < x.size(); ++i) x[i] = normal(engine);
  } while (x.cwiseAbs().maxCoeff() == 0.0);
  return normalized(spec, x);
}

TowerVector random_sphere_point(const TowerSpec& spec, std::uint64_t seed) {
  return TowerVector(spec, random_sphere_coords(spec, seed));
}

namespace {

// P_m : X_{m+1} -> X_m on the coordinates of X_{m+1}.
Eigen::MatrixXd step_matrix(const TowerSpec& spec, int m) {
  const Index n = spec.level_dim(m + 1);
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(n, n);
  matrix.topLeftCorner(spec.level_dim(m), spec.level_dim(m)).setIdentity();
  return matrix;
}

}  // namespace

Projection Projection::step(const TowerSpec& spec, int m) {
  if (m < 1 || m + 1 > spec.depth()) {
    throw LevelError("P_" + std::to_string(m) + " needs 1 <= m < depth");
  }
  return Projection(Kind::kStep, m, 1, spec.truncated(m + 1), step_matrix(spec, m));
}

Projection Projection::chain(const TowerSpec& spec, int m, int j) {
  if (m < 1 || j < 1 || m + j > spec.depth()) {
    throw LevelError("Q_{" + std::to_string(m) + "," + std::to_string(j) +
                     "} needs m >= 1, j >= 1 and m + j <= depth");
  }
  // Q_{m,j} = P_m o P_{m+1} o ... o P_{m+j-1}, each factor zero-padded to the
  // coordinates of X_{m+j} and applied right to left.
  const Index n = spec.level_dim(m + j);
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
  for (int k = m + j - 1; k >= m; --k) {
    Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(n, n);
    const Index size = spec.level_dim(k + 1);
    lifted.topLeftCorner(size, size) = step_matrix(spec, k);
    product = lifted * product;
  }
  return Projection(Kind::kChain, m, j, spec.truncated(m + j), std::move(product));
}

Projection Projection::ambient(const TowerSpec& spec, int m) {
  spec.check_level(m);
  const Index n = spec.dim();
  Eigen::MatrixXd matrix = Eigen::MatrixXd::Zero(n, n);
  matrix.topLeftCorner(spec.level_dim(m), spec.level_dim(m)).setIdentity();
  return Projection(Kind::kAmbient, m, spec.depth() - m, spec, std::move(matrix));
}

Eigen::VectorXd Projection::apply(const Eigen::VectorXd& x) const {
  detail::check_size(domain_, x.size());
  return matrix_ * x;
}

TowerVector Projection::apply(const TowerVector& x) const {
  if (!(x.spec() == domain_)) throw StructuralError("projection applied outside its domain");
  return TowerVector(domain_, apply(x.coords()));
}

Projection compose_projections(const TowerSpec& spec, int m, int j) {
  return Projection::chain(spec, m, j);
}

}  // namespace numindex
