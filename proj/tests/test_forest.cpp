#include <doctest.h>

#include <random>

#include "mvstack/forest.hpp"
#include "test_support.hpp"

using namespace mvstack;
using testsup::random_matrix;
using testsup::random_vector;

namespace {

// y = 1 iff the first feature is positive; the rest is noise.
Dataset planted_signal(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix x = random_matrix(n, p, rng);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = x(i, 0) > 0.0 ? 1.0 : 0.0;
  return Dataset{std::move(x), std::move(y), Family::binomial};
}

}  // namespace

TEST_CASE("constant outcome gives constant predictions and zero importance") {
  std::mt19937_64 rng(1);
  Dataset data{random_matrix(30, 4, rng), Vector::Constant(30, 2.5), Family::gaussian};
  ForestSpec spec;
  spec.n_trees = 25;
  spec.seed = 9;
  const ForestFit fit = forest_fit(data, spec);
  const Vector pred = forest_predict(fit, data.x);
  for (Eigen::Index i = 0; i < pred.size(); ++i) CHECK(pred[i] == 2.5);
  CHECK(fit.importance.isZero(0.0));
}

TEST_CASE("planted signal feature dominates the impurity importance") {
  const Dataset data = planted_signal(200, 5, 33);
  ForestSpec spec;
  spec.n_trees = 100;
  spec.seed = 4;
  const ForestFit fit = forest_fit(data, spec);
  CHECK(fit.importance.minCoeff() >= 0.0);
  Eigen::Index argmax;
  fit.importance.maxCoeff(&argmax);
  CHECK(argmax == 0);
  for (Eigen::Index j = 1; j < 5; ++j) CHECK(fit.importance[0] > fit.importance[j]);
}

TEST_CASE("min_node = n grows a single-leaf tree predicting the mean") {
  std::mt19937_64 rng(3);
  const Eigen::Index n = 25;
  Dataset data{random_matrix(n, 3, rng), random_vector(n, rng), Family::gaussian};
  ForestSpec spec;
  spec.n_trees = 1;
  spec.min_node = static_cast<int>(n);
  spec.seed = 5;
  const ForestFit fit = forest_fit(data, spec);
  REQUIRE(fit.trees.size() == 1);
  CHECK(fit.trees[0].nodes.size() == 1);
  // the single leaf holds the bootstrap-sample mean
  const double leaf = fit.trees[0].nodes[0].value;
  const Vector pred = forest_predict(fit, Matrix::Random(4, 3));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(pred[i] == leaf);
}

TEST_CASE("classification predictions stay within the leaf-value range") {
  const Dataset data = planted_signal(120, 4, 17);
  ForestSpec spec;
  spec.n_trees = 60;
  spec.seed = 21;
  const ForestFit fit = forest_fit(data, spec);
  std::mt19937_64 rng(90);
  const Vector pred = forest_predict(fit, random_matrix(50, 4, rng));
  CHECK(pred.minCoeff() >= 0.0);
  CHECK(pred.maxCoeff() <= 1.0);
}

TEST_CASE("all-ones training outcome predicts one everywhere") {
  std::mt19937_64 rng(7);
  Matrix x = random_matrix(40, 3, rng);
  Dataset data{x, Vector::Ones(40), Family::gaussian};
  ForestSpec spec;
  spec.n_trees = 10;
  spec.seed = 2;
  const ForestFit fit = forest_fit(data, spec);
  const Vector pred = forest_predict(fit, x);
  for (Eigen::Index i = 0; i < pred.size(); ++i) CHECK(pred[i] == 1.0);
}

TEST_CASE("identical seeds grow bit-identical forests, parallel or not") {
  const Dataset data = planted_signal(80, 6, 55);
  ForestSpec spec;
  spec.n_trees = 40;
  spec.seed = 1234;
  const ForestFit a = forest_fit(data, spec, /*parallel=*/false);
  const ForestFit b = forest_fit(data, spec, /*parallel=*/true);
  REQUIRE(a.trees.size() == b.trees.size());
  for (std::size_t t = 0; t < a.trees.size(); ++t) {
    REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
    for (std::size_t k = 0; k < a.trees[t].nodes.size(); ++k) {
      CHECK(a.trees[t].nodes[k].feature == b.trees[t].nodes[k].feature);
      CHECK(a.trees[t].nodes[k].threshold == b.trees[t].nodes[k].threshold);
      CHECK(a.trees[t].nodes[k].value == b.trees[t].nodes[k].value);
    }
  }
  CHECK((a.importance - b.importance).isZero(0.0));
}

TEST_CASE("noise features lose to the planted signal across seeds") {
  int signal_wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = planted_signal(200, 5, 1000 + seed);
    ForestSpec spec;
    spec.n_trees = 50;
    spec.seed = seed;
    const ForestFit fit = forest_fit(data, spec);
    Eigen::Index argmax;
    fit.importance.maxCoeff(&argmax);
    if (argmax == 0) ++signal_wins;
  }
  CHECK(signal_wins >= 18);
}

TEST_CASE("forest rejects degenerate input") {
  std::mt19937_64 rng(13);
  const Matrix x = random_matrix(20, 3, rng);
  CHECK_THROWS_AS(forest_fit(Dataset{x, Vector::Zero(20), Family::binomial}, ForestSpec{}),
                  DegenerateError);

  Vector y = Vector::Zero(20);
  y[3] = 1.0;
  ForestSpec bad;
  bad.mtry = 9;
  CHECK_THROWS_AS(forest_fit(Dataset{x, y, Family::binomial}, bad), ConfigError);

  ForestSpec spec;
  spec.n_trees = 5;
  const ForestFit fit = forest_fit(Dataset{x, y, Family::binomial}, spec);
  CHECK_THROWS_AS(forest_predict(fit, Matrix::Random(4, 7)), ShapeError);
}

TEST_CASE("out-of-bag predictions are populated and bounded") {
  const Dataset data = planted_signal(100, 4, 77);
  ForestSpec spec;
  spec.n_trees = 100;
  spec.seed = 31;
  const ForestFit fit = forest_fit(data, spec);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    REQUIRE(!is_missing(fit.oob_predictions[i]));  // 100 trees: every row sits out somewhere
    CHECK(fit.oob_predictions[i] >= 0.0);
    CHECK(fit.oob_predictions[i] <= 1.0);
  }
}
