#include "numindex/errors.hpp"
#include "numindex/tower.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace numindex;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(TowerSpec, ShapeAndLevels) {
  const TowerSpec s = TowerSpec::tower({2, 2, 1}, {2.0, 2.5});
  EXPECT_EQ(s.depth(), 3);
  EXPECT_EQ(s.dim(), 5);
  EXPECT_EQ(s.level_dim(0), 0);
  EXPECT_EQ(s.level_dim(2), 4);
  EXPECT_EQ(s.leaf_offset(3), 4);
  EXPECT_DOUBLE_EQ(s.combining_exponent(2), 2.5);
  EXPECT_TRUE(s.is_smooth());
  EXPECT_EQ(s.truncated(2).dim(), 4);
  EXPECT_EQ(s.truncated(3), s);

  const TowerSpec f = TowerSpec::flat(4, 1.0);
  EXPECT_EQ(f.depth(), 4);
  EXPECT_FALSE(f.is_smooth());
  EXPECT_TRUE(TowerSpec::flat(1, 1.0).is_smooth());
  EXPECT_DOUBLE_EQ(f.dual().flat_exponent(), kInfinity);
}

TEST(TowerSpec, RejectsInvalidShapes) {
  EXPECT_THROW(TowerSpec::flat(0, 2.0), SpecError);
  EXPECT_THROW(TowerSpec::flat(3, 0.5), SpecError);
  EXPECT_THROW(TowerSpec::tower({}, {}), SpecError);
  EXPECT_THROW(TowerSpec::tower({2, 1}, {}), SpecError);
  EXPECT_THROW(TowerSpec::tower({2, 0}, {2.0}), SpecError);
  // interior p = 1 or p = inf is set-valued duality: flat only
  EXPECT_THROW(TowerSpec::tower({1, 1}, {1.0}), SpecError);
  EXPECT_THROW(TowerSpec::tower({1, 1}, {kInfinity}), SpecError);
  EXPECT_THROW(TowerSpec::tower({3}, {}), SpecError);
  EXPECT_THROW(TowerSpec::flat(3, 2.0).level_dim(4), LevelError);
}

TEST(TowerNorm, Examples) {
  EXPECT_DOUBLE_EQ(tower_norm(TowerSpec::flat(2, 2.0), vec({3, 4})), 5.0);
  const TowerSpec s = TowerSpec::tower({1, 1, 1}, {2.0, 3.0});
  EXPECT_NEAR(tower_norm(s, vec({1, 1, 1})), std::cbrt(std::pow(std::sqrt(2.0), 3) + 1.0), 1e-15);
  EXPECT_DOUBLE_EQ(tower_norm(TowerSpec::flat(3, kInfinity), vec({1, -7, 2})), 7.0);
  EXPECT_DOUBLE_EQ(tower_norm(TowerSpec::flat(3, 1.0), vec({1, -7, 2})), 10.0);
  EXPECT_THROW(tower_norm(s, vec({1, 1})), StructuralError);
}

TEST(TowerNorm, UniformTowerEqualsFlatLp) {
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    const TowerSpec tower = TowerSpec::tower({1, 1, 1, 1, 1, 1}, {p, p, p, p, p});
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Eigen::VectorXd x = oracle::gaussian_vector(6, seed);
      const double expect = static_cast<double>(oracle::lp_norm(x, p));
      EXPECT_NEAR(tower_norm(tower, x), expect, 1e-12 * expect);
      EXPECT_NEAR(tower_norm(TowerSpec::flat(6, p), x), expect, 1e-12 * expect);
    }
  }
}

TEST(TowerNorm, MatchesRecursiveDefinition) {
  const std::vector<int> leaves{2, 3, 1};
  const std::vector<double> exps{2.5, 1.5}, leaf{3.0, 2.0, 4.0};
  const TowerSpec s = TowerSpec::tower({2, 3, 1}, exps, leaf);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::VectorXd x = oracle::gaussian_vector(6, seed);
    const double expect = static_cast<double>(oracle::tower_norm(leaves, exps, leaf, x));
    EXPECT_NEAR(tower_norm(s, x), expect, 1e-13 * expect);
  }
}

TEST(TowerNorm, AbsoluteMonotone) {
  const TowerSpec s = TowerSpec::tower({2, 2, 1}, {2.0, 2.5});
  std::mt19937_64 engine(3);
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::VectorXd y = oracle::gaussian_vector(5, seed);
    Eigen::VectorXd x = y;
    for (Index i = 0; i < 5; ++i) x[i] *= (shrink(engine) < 0.5 ? -1.0 : 1.0) * shrink(engine);
    EXPECT_LE(tower_norm(s, x), tower_norm(s, y) * (1 + 1e-15));
  }
}

TEST(TowerNorm, ZeroOnlyAtZero) {
  const TowerSpec s = TowerSpec::tower({2, 1}, {3.0});
  EXPECT_EQ(tower_norm(s, Eigen::VectorXd::Zero(3)), 0.0);
  EXPECT_GT(tower_norm(s, vec({0, 0, 1e-300})), 0.0);
  EXPECT_THROW(normalized(s, Eigen::VectorXd::Zero(3)), DomainError);
}

TEST(Project, ZeroesLaterBlocks) {
  const TowerSpec s = TowerSpec::flat(3, 2.0);
  EXPECT_EQ(project(s, vec({1, 2, 3}), 2), vec({1, 2, 0}));
  const TowerSpec t = TowerSpec::tower({2, 1}, {2.0});
  EXPECT_EQ(project(t, vec({1, 2, 3}), 1), vec({1, 2, 0}));
  EXPECT_THROW(project(s, vec({1, 2, 3}), 0), LevelError);
  EXPECT_THROW(project(s, vec({1, 2, 3}), 4), LevelError);
}

TEST(Project, NestingIsExact) {
  const TowerSpec s = TowerSpec::tower({1, 2, 2, 1}, {2.0, 3.0, 1.5});
  Eigen::VectorXd x(6);
  x << 3, -1, 4, 1, -5, 9;  // integers: equality must be exact
  for (int j = 1; j <= 4; ++j)
    for (int m = 1; m <= j; ++m) EXPECT_EQ(project(s, project(s, x, j), m), project(s, x, m));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::VectorXd y = oracle::gaussian_vector(6, seed);
    for (int j = 1; j <= 4; ++j)
      for (int m = 1; m <= j; ++m) EXPECT_EQ(project(s, project(s, y, j), m), project(s, y, m));
  }
}

TEST(Project, IsNormOne) {
  const TowerSpec s = TowerSpec::flat(5, 1.5);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Eigen::VectorXd x = oracle::gaussian_vector(5, seed);
    for (int m = 1; m <= 5; ++m) EXPECT_LE(tower_norm(s, project(s, x, m)), tower_norm(s, x));
  }
  const Eigen::VectorXd inside = vec({0.3, -2, 0, 0, 0});
  EXPECT_EQ(tower_norm(s, project(s, inside, 2)), tower_norm(s, inside));
}

TEST(Projection, StepChainAmbient) {
  const TowerSpec s = TowerSpec::flat(3, 2.0);
  EXPECT_EQ(Projection::chain(s, 1, 2).apply(vec({5, 6, 7})), vec({5, 0, 0}));
  EXPECT_EQ(Projection::step(s, 2).apply(vec({5, 6, 7})), vec({5, 6, 0}));
  EXPECT_EQ(Projection::ambient(s, 2).apply(vec({5, 6, 7})), vec({5, 6, 0}));
  EXPECT_THROW(Projection::chain(s, 2, 2), LevelError);
  EXPECT_THROW(Projection::step(s, 3), LevelError);
}

TEST(Projection, ChainStabilizesToAmbient) {
  const TowerSpec s = TowerSpec::tower({1, 2, 1, 2}, {2.0, 3.0, 1.5});
  for (int m = 1; m < 4; ++m) {
    const Eigen::MatrixXd chain = compose_projections(s, m, 4 - m).matrix();
    EXPECT_EQ(chain, Projection::ambient(s, m).matrix()) << "m=" << m;
  }
  // x in X_k: Q_{m,j} x stops changing once m + j - 1 >= k
  Eigen::VectorXd x(6);
  x << 1, 2, 3, 0, 0, 0;  // in X_2
  const Eigen::VectorXd ref = compose_projections(s, 1, 1).apply(x.head(3));
  for (int j = 2; j <= 3; ++j) {
    const Eigen::VectorXd y = compose_projections(s, 1, j).apply(x.head(s.level_dim(1 + j)));
    EXPECT_EQ(y.head(3), ref);
    EXPECT_TRUE(y.tail(y.size() - 3).isZero(0.0));
  }
}

TEST(Projection, ChainMatchesProductOfSteps) {
  const TowerSpec s = TowerSpec::flat(4, 3.0);
  Eigen::VectorXd x(4);
  x << 4, -3, 2, 1;
  const Eigen::VectorXd step_by_step = Projection::step(s, 1).apply(
      Eigen::VectorXd(Projection::step(s, 2).apply(Eigen::VectorXd(Projection::step(s, 3).apply(x)).head(3))).head(2));
  EXPECT_EQ(compose_projections(s, 1, 3).apply(x).head(2), step_by_step);
}

TEST(RandomSphere, UnitAndDeterministic) {
  const TowerSpec s = TowerSpec::tower({2, 2, 1}, {2.0, 2.5});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TowerVector x = random_sphere_point(s, seed);
    EXPECT_NEAR(norm(x), 1.0, 1e-12);
    EXPECT_EQ(x.coords(), random_sphere_point(s, seed).coords());
  }
  EXPECT_NE(random_sphere_coords(s, 1), random_sphere_coords(s, 2));
}

TEST(RandomSphere, CoversAllOrthants) {
  const TowerSpec s = TowerSpec::flat(3, 1.0);
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Eigen::VectorXd x = random_sphere_coords(s, seed);
    seen.insert((x[0] > 0) | (x[1] > 0) << 1 | (x[2] > 0) << 2);
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(TowerVector, RejectsWrongLength) {
  EXPECT_THROW(TowerVector(TowerSpec::flat(3, 2.0), vec({1, 2})), StructuralError);
  const TowerVector x(TowerSpec::flat(3, 2.0), vec({1, 2, 2}));
  EXPECT_DOUBLE_EQ(norm(x), 3.0);
  EXPECT_EQ(project(x, 1).coords(), vec({1, 0, 0}));
}
