#include "numindex/verify.hpp"

#include "numindex/numerical_range.hpp"
#include "numindex/operators.hpp"
#include "numindex/random.hpp"
#include "numindex/tower.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace numindex {

namespace {

constexpr double kExact = 0.0;
constexpr double kCCTolerance = 1e-9;
constexpr double kIdentityTolerance = 1e-9;
constexpr double kNormingTolerance = 1e-10;

TowerSpec corrupted(const TowerSpec& spec) {
  if (spec.is_flat()) return TowerSpec::flat(spec.dim(), 1.25 * spec.flat_exponent());
  std::vector<double> exps = spec.exponents();
  std::vector<double> leaf = spec.leaf_exponents();
  for (double& p : exps) p *= 1.25;
  for (double& r : leaf) r *= 1.25;
  return TowerSpec::tower(spec.leaf_dims(), exps, leaf);
}

Eigen::VectorXd gaussian(Index n, std::uint64_t seed) {
  Engine engine = make_engine(seed, 0);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(engine);
  return v;
}

// Level used by the operator properties: 2 when the tower allows it.
int operator_level(const TowerSpec& spec) { return std::min(2, spec.depth()); }

class Suite {
 public:
  explicit Suite(const VerifyConfig& config) : config_(config) {}

  // `body(sample_seed)` returns the violation of one sample.
  void run(const std::string& name, double tol, const std::function<double(std::uint64_t)>& body) {
    PropertyResult r = start(name, tol);
    for (int s = 0; s < config_.samples; ++s) {
      const double v = body(derive_seed(r.seed, static_cast<std::uint64_t>(s)));
      r.max_violation = std::max(r.max_violation, std::isfinite(v) ? v : kInfinity);
    }
    finish(r);
  }

  void skip(const std::string& name, const std::string& why) {
    PropertyResult r = start(name, 0.0);
    r.skipped = true;
    r.samples = 0;
    r.note = why;
    finish(r);
  }

  void record(PropertyResult r) { finish(std::move(r)); }
  PropertyResult start(const std::string& name, double tol) {
    PropertyResult r;
    r.name = name;
    r.tol = tol;
    r.samples = config_.samples;
    r.seed = derive_seed(config_.seed, index_++);
    clock_ = std::chrono::steady_clock::now();
    return r;
  }

  VerifyReport report() { return std::move(report_); }

 private:
  void finish(PropertyResult r) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    if (!r.skipped) r.passed = r.max_violation <= r.tol;
    if (r.samples == 0 && !r.skipped) r.note = "0 samples: vacuous pass";
    report_.properties.push_back(std::move(r));
  }

  const VerifyConfig& config_;
  VerifyReport report_;
  std::uint64_t index_ = 0;
  std::chrono::steady_clock::time_point clock_;
};

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& r) { return r.passed; });
}

DualityModel corrupted_norm_model() {
  DualityModel model = DualityModel::exact();
  model.norm = [](const TowerSpec& spec, const Eigen::VectorXd& x) { return tower_norm(corrupted(spec), x); };
  return model;
}

VerifyReport run_verify(const VerifyConfig& config) {
  const TowerSpec& spec = config.space;
  const int depth = spec.depth();
  const Index n = spec.dim();
  Suite suite(config);
  auto search = [&](std::uint64_t seed) {
    SearchBudget b = config.search;
    b.seed = seed;
    return b;
  };

  suite.run("projection-nesting", kExact, [&](std::uint64_t seed) {
    const Eigen::VectorXd x = gaussian(n, seed);
    double worst = 0.0;
    for (int j = 1; j <= depth; ++j) {
      for (int m = 1; m <= j; ++m) {
        worst = std::max(worst, (project(spec, project(spec, x, j), m) - project(spec, x, m)).cwiseAbs().maxCoeff());
      }
    }
    return worst;
  });

  suite.run("projection-contraction", kExact, [&](std::uint64_t seed) {
    const Eigen::VectorXd x = gaussian(n, seed);
    const double full = tower_norm(spec, x);
    double worst = 0.0;
    for (int m = 1; m <= depth; ++m) worst = std::max(worst, tower_norm(spec, project(spec, x, m)) - full);
    return std::max(worst, 0.0);
  });

  suite.run("chain-stabilization", kExact, [&](std::uint64_t) {
    double worst = 0.0;
    for (int m = 1; m < depth; ++m) {
      const Eigen::MatrixXd chain = compose_projections(spec, m, depth - m).matrix();
      worst = std::max(worst, (chain - Projection::ambient(spec, m).matrix()).cwiseAbs().maxCoeff());
    }
    return worst;
  });

  suite.run("norming-functional", kNormingTolerance, [&](std::uint64_t seed) {
    const Eigen::VectorXd x = random_sphere_coords(spec, seed);
    std::vector<Eigen::VectorXd> functionals;
    if (spec.is_smooth()) {
      functionals.push_back(norming_functional(spec, x));
    } else {
      functionals = NormingSet::of(spec, x).extreme_points();
    }
    double worst = 0.0;
    for (const auto& f : functionals) {
      worst = std::max({worst, std::abs(f.dot(x) - 1.0), std::abs(dual_norm(spec, f) - 1.0)});
    }
    return worst;
  });

  bool cc_certified = false;
  if (spec.is_smooth() && depth >= 2) {
    PropertyResult r = suite.start("characterization-condition", kCCTolerance);
    const CCReport cc = certify_cc(spec, config.samples, kCCTolerance, r.seed,
                                   config.inject_fault ? corrupted_norm_model() : DualityModel::exact());
    r.max_violation = std::max(cc.max_violation, cc.max_lcc_violation);
    if (!std::isfinite(r.max_violation)) r.max_violation = kInfinity;
    if (config.inject_fault) r.note = "corrupted norm injected";
    cc_certified = cc.passed && config.samples > 0 && !config.inject_fault;
    suite.record(std::move(r));
  } else {
    suite.skip("characterization-condition", depth < 2 ? "single level" : "certified on smooth spaces only");
  }

  suite.run("radius-identity", kIdentityTolerance, [&](std::uint64_t seed) {
    return std::abs(numerical_radius(Operator::identity(spec), search(seed)).value - 1.0);
  });

  suite.run("radius-below-norm", 2.0 * config.search.tol, [&](std::uint64_t seed) {
    const Operator t = random_operator(spec, seed);
    const double nu = numerical_radius(t, search(derive_seed(seed, 1))).value;
    const double norm = operator_norm(t, search(derive_seed(seed, 2))).value;
    return std::max(nu - norm, 0.0);
  });

  const int m = operator_level(spec);
  const TowerSpec level = spec.truncated(m);
  if (cc_certified) {
    suite.run("n1-equals-radius", config.tol, [&](std::uint64_t seed) {
      const Operator l = random_operator(level, seed, true, search(seed));
      const double nu = numerical_radius(l, search(derive_seed(seed, 1))).value;
      return std::abs(n1_of_operator(l, spec, search(derive_seed(seed, 2))).value - nu);
    });
  } else {
    suite.skip("n1-equals-radius", "needs a certified characterization condition");
  }

  suite.run("n1-level-invariance", 2.0 * config.tol, [&](std::uint64_t seed) {
    const Operator l = random_operator(level, seed, true, search(seed));
    const Operator lifted = compose_with_ambient_projection(l, spec, m);
    const double a = n1_of_operator(l, spec, search(derive_seed(seed, 1))).value;
    const double b = n1_of_operator(lifted, spec, search(derive_seed(seed, 2))).value;
    return std::abs(a - b);
  });

  if (depth > m) {
    const int j_max = depth - m;
    suite.run("w-sequence", 2.0 * config.tol, [&](std::uint64_t seed) {
      const Operator l = random_operator(level, seed, true, search(seed));
      const auto w = w_sequence(l, spec, j_max, search(derive_seed(seed, 1)));
      const double tail = w_infinity(l, spec, search(derive_seed(seed, 2))).value;
      double worst = std::abs(tail - w.back().value);
      double low = w.front().value, high = w.front().value;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) worst = std::max(worst, w[k - 1].value - w[k].value);  // nondecreasing
        worst = std::max(worst, w[k].value - tail);                       // dominated by the tail
        low = std::min(low, w[k].value);
        high = std::max(high, w[k].value);
      }
      if (cc_certified) worst = std::max(worst, high - low);  // constant under LCC
      return worst;
    });
  } else {
    suite.skip("w-sequence", "needs depth > m");
  }

  return suite.report();
}

}  // namespace numindex
