#include "numindex/errors.hpp"
#include "numindex/operators.hpp"

#include "oracles.hpp"

#include <Eigen/SVD>
#include <gtest/gtest.h>

using namespace numindex;

namespace {

Eigen::MatrixXd mat(int n, std::initializer_list<double> rowwise) {
  Eigen::MatrixXd m(n, n);
  auto it = rowwise.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = *it++;
  return m;
}

const SearchBudget kBudget{64, 5000, 1e-8, 1};

}  // namespace

TEST(Operator, ValidatesShape) {
  const TowerSpec s = TowerSpec::flat(2, 2.0);
  EXPECT_THROW(Operator(s, Eigen::MatrixXd::Zero(3, 3)), StructuralError);
  EXPECT_THROW(Operator(s, Eigen::MatrixXd::Zero(2, 3)), StructuralError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(Operator(s, bad), SpecError);
  EXPECT_THROW(Operator::identity(s) + Operator::identity(TowerSpec::flat(2, 3.0)), StructuralError);
}

TEST(Operator, Apply) {
  const TowerSpec s = TowerSpec::flat(3, 1.5);
  const TowerVector x(s, oracle::gaussian_vector(3, 4));
  EXPECT_EQ(apply(Operator::identity(s), x).coords(), x.coords());
  EXPECT_TRUE(apply(Operator::zero(s), x).coords().isZero(0.0));
  const Operator perm(s, mat(3, {0, 1, 0, 0, 0, 1, 1, 0, 0}));
  EXPECT_NEAR(norm(apply(perm, x)), norm(x), 1e-15);
  EXPECT_THROW(apply(perm, TowerVector(TowerSpec::flat(3, 2.0), x.coords())), StructuralError);
}

TEST(OperatorNorm, Examples) {
  EXPECT_DOUBLE_EQ(operator_norm(Operator(TowerSpec::flat(2, 1.0), mat(2, {0, 0, 1, 0}))).value, 1.0);
  EXPECT_NEAR(operator_norm(Operator(TowerSpec::flat(2, 2.0), mat(2, {0, 1, 0, 0}))).value, 1.0, 1e-10);
  for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    const Operator d(TowerSpec::flat(2, p), mat(2, {2, 0, 0, 1}));
    EXPECT_NEAR(operator_norm(d, kBudget).value, 2.0, 1e-9) << p;
  }
}

TEST(OperatorNorm, IdentityIsExactlyOne) {
  for (const TowerSpec& s : {TowerSpec::flat(3, 1.0), TowerSpec::flat(3, 1.5), TowerSpec::flat(4, 2.0),
                             TowerSpec::flat(3, kInfinity), TowerSpec::tower({2, 2, 1}, {2.0, 2.5})}) {
    EXPECT_EQ(operator_norm(Operator::identity(s), kBudget).value, 1.0) << s.describe();
  }
}

TEST(OperatorNorm, EuclideanMatchesSvd) {
  for (int n : {2, 4, 8}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Eigen::MatrixXd t = oracle::gaussian_matrix(n, seed);
      const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(t).singularValues()[0];
      EXPECT_NEAR(operator_norm(Operator(TowerSpec::flat(n, 2.0), t), kBudget).value, sigma, 1e-9 * sigma);
    }
  }
}

TEST(OperatorNorm, ClosedFormsMatchSearch) {
  for (double p : {1.0, 2.0, kInfinity}) {
    for (int n : {2, 3, 5, 8}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Operator t(TowerSpec::flat(n, p), oracle::gaussian_matrix(n, 100 + seed));
        const NormEstimate closed = operator_norm(t, kBudget);
        const NormEstimate searched = operator_norm(t, kBudget, NormMethod::kSearch);
        EXPECT_NEAR(closed.value, searched.value, 1e-6) << "p=" << p << " n=" << n;
        EXPECT_EQ(searched.method, "multistart");
      }
    }
  }
}

TEST(OperatorNorm, ClosedFormFormulas) {
  const Eigen::MatrixXd t = mat(3, {1, -2, 0, 3, 0.5, -1, 0, 4, 2});
  // column sums 4, 6.5, 3; row sums 3, 4.5, 6
  EXPECT_DOUBLE_EQ(operator_norm(Operator(TowerSpec::flat(3, 1.0), t)).value, 6.5);
  EXPECT_DOUBLE_EQ(operator_norm(Operator(TowerSpec::flat(3, kInfinity), t)).value, 6.0);
}

TEST(OperatorNorm, WitnessRealizesValue) {
  for (const TowerSpec& s : {TowerSpec::flat(3, 1.5), TowerSpec::flat(3, kInfinity), TowerSpec::flat(3, 1.0),
                             TowerSpec::tower({2, 1, 1}, {3.0, 1.5})}) {
    const Operator t(s, oracle::gaussian_matrix(static_cast<int>(s.dim()), 7));
    const NormEstimate e = operator_norm(t, kBudget);
    EXPECT_NEAR(tower_norm(s, Eigen::VectorXd(t.matrix() * e.witness)) / tower_norm(s, e.witness), e.value,
                1e-12 * e.value);
  }
}

TEST(OperatorNorm, SeededDeterminism) {
  const Operator t(TowerSpec::tower({2, 2}, {2.5}), oracle::gaussian_matrix(4, 2));
  const NormEstimate a = operator_norm(t, kBudget), b = operator_norm(t, kBudget);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.witness, b.witness);
  EXPECT_EQ(a.provenance.iterations, b.provenance.iterations);
}

TEST(Compose, EmbedAndProject) {
  const TowerSpec ambient = TowerSpec::flat(4, 2.0);
  const Operator l(ambient.truncated(2), mat(2, {1, 2, 3, 4}));
  const Eigen::MatrixXd lifted = embed(l, ambient).matrix();
  EXPECT_EQ(lifted.topLeftCorner(2, 2), l.matrix());
  EXPECT_TRUE(lifted.rightCols(2).isZero(0.0));
  EXPECT_TRUE(lifted.bottomRows(2).isZero(0.0));

  EXPECT_EQ(compose_with_projection(l, ambient, 2, 0).matrix(), l.matrix());
  const Operator lq = compose_with_projection(l, ambient, 2, 2);
  EXPECT_EQ(lq.dim(), 4);
  EXPECT_EQ(lq.matrix(), lifted);
  EXPECT_EQ(compose_with_ambient_projection(l, ambient, 2).matrix(), lifted);
  EXPECT_THROW(compose_with_projection(l, ambient, 3, 1), StructuralError);
  EXPECT_THROW(compose_with_projection(l, TowerSpec::flat(4, 3.0), 2, 1), StructuralError);
}

TEST(Compose, ProjectionDoesNotIncreaseNorm) {
  const TowerSpec ambient = TowerSpec::tower({1, 2, 1, 1}, {2.0, 3.0, 1.5});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Operator l = random_operator(ambient.truncated(2), seed);
    const double base = operator_norm(l, kBudget).value;
    for (int j = 1; j <= 2; ++j) {
      EXPECT_LE(operator_norm(compose_with_projection(l, ambient, 2, j), kBudget).value, base + 2e-8);
    }
  }
}

TEST(RandomOperator, SeededAndNormalized) {
  const TowerSpec s = TowerSpec::flat(3, 1.5);
  EXPECT_EQ(random_operator(s, 5).matrix(), random_operator(s, 5).matrix());
  EXPECT_NE(random_operator(s, 5).matrix(), random_operator(s, 6).matrix());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Operator t = random_operator(s, seed, true, kBudget);
    const double n = operator_norm(t, kBudget).value;
    EXPECT_GE(n, 1.0 - 1e-6);
    EXPECT_LE(n, 1.0 + 1e-6);
  }
  double mean = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) mean += random_operator(s, seed).matrix().mean();
  EXPECT_NEAR(mean / 1000.0, 0.0, 0.05);  // sd of the mean is 1/sqrt(9000)
}
