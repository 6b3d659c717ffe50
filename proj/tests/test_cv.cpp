#include <doctest.h>

#include <random>
#include <set>

#include "mvstack/cv.hpp"
#include "test_support.hpp"

using namespace mvstack;
using testsup::random_matrix;
using testsup::random_vector;

TEST_CASE("plain folds have balanced sizes") {
  const Vector y = Vector::Zero(10);
  const FoldAssignment folds = make_folds(y, 5, Family::gaussian, 1);
  for (int f = 0; f < 5; ++f) CHECK(folds.members(f).size() == 2);

  const FoldAssignment loo = make_folds(y, 10, Family::gaussian, 1);
  for (int f = 0; f < 10; ++f) CHECK(loo.members(f).size() == 1);

  const FoldAssignment uneven = make_folds(Vector::Zero(11), 3, Family::gaussian, 2);
  std::vector<std::size_t> sizes;
  for (int f = 0; f < 3; ++f) sizes.push_back(uneven.members(f).size());
  CHECK(*std::max_element(sizes.begin(), sizes.end()) -
            *std::min_element(sizes.begin(), sizes.end()) <=
        1);
}

TEST_CASE("binomial folds stratify exactly when classes allow") {
  Vector y(10);
  y << 1, 1, 1, 1, 1, 1, 0, 0, 0, 0;  // six ones, four zeros
  const FoldAssignment folds = make_folds(y, 2, Family::binomial, 3);
  CHECK(folds.stratified);
  for (int f = 0; f < 2; ++f) {
    int ones = 0, zeros = 0;
    for (int i : folds.members(f)) (y[i] == 1.0 ? ones : zeros)++;
    CHECK(ones == 3);
    CHECK(zeros == 2);
  }
}

TEST_CASE("stratification degrades with a warning when a class is tiny") {
  Vector y = Vector::Zero(12);
  y[0] = 1.0;
  y[5] = 1.0;
  const FoldAssignment folds = make_folds(y, 4, Family::binomial, 7);
  CHECK(!folds.stratified);
  REQUIRE(folds.warnings.size() == 1);
}

TEST_CASE("fold construction is deterministic and validates k") {
  std::mt19937_64 rng(5);
  const Vector y = random_vector(20, rng);
  const FoldAssignment a = make_folds(y, 4, Family::gaussian, 99);
  const FoldAssignment b = make_folds(y, 4, Family::gaussian, 99);
  CHECK(a.fold_of == b.fold_of);
  const FoldAssignment c = make_folds(y, 4, Family::gaussian, 100);
  CHECK(a.fold_of != c.fold_of);

  CHECK_THROWS_AS(make_folds(y, 21, Family::gaussian, 1), ConfigError);
  CHECK_THROWS_AS(make_folds(y, 1, Family::gaussian, 1), ConfigError);
}

namespace {

LearnerConfig null_glm_config() {
  // a single huge lambda shrinks every coefficient away: intercept-only fits
  LearnerConfig config;
  config.glm.family = Family::gaussian;
  config.glm.alpha = 1.0;
  config.glm.lambda.explicit_path = {1e9};
  config.k_lambda = 2;
  return config;
}

}  // namespace

TEST_CASE("intercept-only learner reproduces training-fold means") {
  std::mt19937_64 rng(11);
  const Eigen::Index n = 30;
  Dataset data{random_matrix(n, 3, rng), random_vector(n, rng), Family::gaussian};
  const FoldAssignment folds = make_folds(data.y, 5, Family::gaussian, 42);
  const Vector z = oos_predictions(data, {0, 1, 2}, null_glm_config(), folds, 17);

  for (int f = 0; f < folds.k; ++f) {
    const auto train = folds.complement(f);
    double mean = 0.0;
    for (int i : train) mean += data.y[i];
    mean /= static_cast<double>(train.size());
    for (int i : folds.members(f)) CHECK(z[i] == doctest::Approx(mean).epsilon(1e-6));
  }
}

TEST_CASE("leave-one-out null model predicts the complement mean") {
  std::mt19937_64 rng(13);
  const Eigen::Index n = 12;
  Matrix x = Matrix::Ones(n, 1) + 0.0 * random_matrix(n, 1, rng);
  x(0, 0) = 1.0 + 1e-9;  // keep one column non-constant
  Dataset data{x, random_vector(n, rng), Family::gaussian};
  const FoldAssignment folds = make_folds(data.y, static_cast<int>(n), Family::gaussian, 4);
  const Vector z = oos_predictions(data, {0}, null_glm_config(), folds, 23);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = (data.y.sum() - data.y[i]) / static_cast<double>(n - 1);
    CHECK(z[i] == doctest::Approx(mean).epsilon(1e-6));
  }
}

TEST_CASE("binomial out-of-sample predictions are probabilities") {
  std::mt19937_64 rng(17);
  const Eigen::Index n = 60;
  Matrix x = random_matrix(n, 4, rng);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = x(i, 0) + 0.3 * random_vector(1, rng)[0] > 0;
  Dataset data{x, y, Family::binomial};

  LearnerConfig config;
  config.glm.alpha = 0.0;
  config.k_lambda = 4;
  const FoldAssignment folds = make_folds(y, 5, Family::binomial, 6);
  const Vector z = oos_predictions(data, {0, 1, 2, 3}, config, folds, 31);
  for (Eigen::Index i = 0; i < n; ++i) {
    CHECK(z[i] > 0.0);
    CHECK(z[i] < 1.0);
  }
}

TEST_CASE("held-out outcomes never leak into their own predictions") {
  std::mt19937_64 rng(19);
  const Eigen::Index n = 50;
  Matrix x = random_matrix(n, 3, rng);
  Vector y = x.col(0) + random_vector(n, rng, 0.5);
  const FoldAssignment folds = make_folds(y, 5, Family::gaussian, 77);

  LearnerConfig config;
  config.glm.alpha = 0.5;
  config.k_lambda = 4;
  const Dataset data{x, y, Family::gaussian};
  const Vector z = oos_predictions(data, {0, 1, 2}, config, folds, 13);

  // scramble the outcomes of fold 2 before training; its predictions stand
  Vector y_mangled = y;
  for (int i : folds.members(2)) y_mangled[i] = 1000.0 + i;
  const Dataset mangled{x, y_mangled, Family::gaussian};
  const Vector z_mangled = oos_predictions(mangled, {0, 1, 2}, config, folds, 13);
  for (int i : folds.members(2)) CHECK(z[i] == z_mangled[i]);
}

TEST_CASE("identical seeds reproduce identical prediction vectors") {
  std::mt19937_64 rng(23);
  const Eigen::Index n = 40;
  Dataset data{random_matrix(n, 3, rng), random_vector(n, rng), Family::gaussian};
  const FoldAssignment folds = make_folds(data.y, 4, Family::gaussian, 55);
  LearnerConfig config;
  config.glm.alpha = 1.0;
  config.k_lambda = 3;
  const Vector a = oos_predictions(data, {0, 1}, config, folds, 5);
  const Vector b = oos_predictions(data, {0, 1}, config, folds, 5);
  CHECK((a - b).isZero(0.0));
}

TEST_CASE("learner errors are annotated with the fold") {
  // a fold whose training complement is single-class trips the inner
  // stratification check; the fold index is attached to the message
  Vector y = Vector::Zero(12);
  y[0] = 1.0;
  std::mt19937_64 rng(29);
  Dataset data{random_matrix(12, 2, rng), y, Family::binomial};
  const FoldAssignment folds = make_folds(y, 3, Family::binomial, 2);
  LearnerConfig config;
  config.glm.alpha = 0.0;
  config.k_lambda = 2;
  try {
    oos_predictions(data, {0, 1}, config, folds, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("fold") != std::string::npos);
  }
}
