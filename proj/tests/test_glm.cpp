#include <doctest.h>

#include <random>

#include "mvstack/glm.hpp"
#include "test_support.hpp"

using namespace mvstack;
using testsup::grid_minimize;
using testsup::orthonormal_design;
using testsup::penalized_objective;
using testsup::random_matrix;
using testsup::random_vector;

TEST_CASE("soft thresholds") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(soft_threshold(0.0, 0.0) == 0.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);

  CHECK(nonneg_soft_threshold(3.0, 1.0) == 2.0);
  CHECK(nonneg_soft_threshold(-2.0, 0.0) == 0.0);
  CHECK(nonneg_soft_threshold(0.5, 1.0) == 0.0);
}

TEST_CASE("lasso on an orthonormal design matches the soft-threshold closed form") {
  std::mt19937_64 rng(11);
  const Eigen::Index n = 50, p = 8;
  Matrix x = orthonormal_design(n, p, rng);
  Vector y = random_vector(n, rng, 2.0);
  y.array() -= y.mean();

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 1.0;
  spec.standardize = false;
  spec.lambda.n_lambda = 30;
  const GlmPath path = fit_path(Dataset{x, y, Family::gaussian}, spec);

  for (const PathPoint& pt : path.points) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double oracle = soft_threshold(x.col(j).dot(y) / static_cast<double>(n), pt.lambda);
      CHECK(std::abs(pt.beta[j] - oracle) < 1e-6);
    }
    CHECK(std::abs(pt.intercept) < 1e-6);
  }
}

TEST_CASE("full-shrinkage limit: huge lambda gives the null model") {
  std::mt19937_64 rng(21);
  const Eigen::Index n = 40, p = 5;
  const Matrix x = random_matrix(n, p, rng);

  for (Family family : {Family::gaussian, Family::binomial, Family::poisson}) {
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (family == Family::binomial) {
        y[i] = i % 3 == 0 ? 1.0 : 0.0;
      } else if (family == Family::poisson) {
        y[i] = static_cast<double>(i % 4);
      } else {
        y[i] = random_vector(1, rng)[0];
      }
    }
    GlmSpec spec;
    spec.family = family;
    spec.alpha = 1.0;
    spec.lambda.explicit_path = {1e9};
    const GlmPath path = fit_path(Dataset{x, y, family}, spec);
    CHECK(path.points[0].beta.isZero(0.0));
    CHECK(path.points[0].intercept == doctest::Approx(link(family, y.mean())).epsilon(1e-6));
  }
}

namespace {

void check_against_grid(Family family, double alpha, bool nonneg, double lambda,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::Index n = 8;
  const Eigen::Index p = alpha == 0.0 ? 1 : 2;
  const Matrix x = random_matrix(n, p, rng);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = (i + static_cast<Eigen::Index>(seed)) % 2;

  GlmSpec spec;
  spec.family = family;
  spec.alpha = alpha;
  spec.nonneg = nonneg;
  spec.standardize = false;
  spec.lambda.explicit_path = {lambda};
  const GlmPath path = fit_path(Dataset{x, y, family}, spec);

  const Vector weights = Vector::Ones(p);
  auto objective = [&](const Vector& params) {
    return penalized_objective(family, x, y, params[0], params.tail(p), lambda, alpha, weights);
  };
  std::vector<bool> nonneg_dims(static_cast<std::size_t>(p) + 1, false);
  if (nonneg)
    for (std::size_t d = 1; d < nonneg_dims.size(); ++d) nonneg_dims[d] = true;
  const Vector best =
      grid_minimize(objective, Vector::Zero(p + 1), 6.0, 41, 6, nonneg_dims);

  CHECK(std::abs(path.points[0].intercept - best[0]) < 1e-4);
  for (Eigen::Index j = 0; j < p; ++j)
    CHECK(std::abs(path.points[0].beta[j] - best[j + 1]) < 1e-4);
}

}  // namespace

TEST_CASE("tiny binomial fits match a zoomed grid-search oracle") {
  check_against_grid(Family::binomial, 0.0, false, 0.05, 1);
  check_against_grid(Family::binomial, 0.0, false, 0.2, 2);
  check_against_grid(Family::binomial, 1.0, false, 0.05, 3);
  check_against_grid(Family::binomial, 0.5, false, 0.1, 4);
  check_against_grid(Family::binomial, 1.0, true, 0.05, 5);
}

TEST_CASE("KKT conditions hold at returned solutions") {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int rep = 0; rep < 12; ++rep) {
    const Family family =
        rep % 3 == 0 ? Family::gaussian : (rep % 3 == 1 ? Family::binomial : Family::poisson);
    const double alpha = std::vector<double>{0.0, 0.25, 0.5, 1.0}[static_cast<std::size_t>(rep) % 4];
    const bool nonneg = rep % 2 == 1;
    const Eigen::Index n = 40, p = 6;
    Matrix x = random_matrix(n, p, rng);
    // pre-standardized columns so the KKT algebra lives on the data scale
    x.rowwise() -= x.colwise().mean();
    for (Eigen::Index j = 0; j < p; ++j)
      x.col(j) /= std::sqrt(x.col(j).squaredNorm() / static_cast<double>(n));
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double signal = x(i, 0) - x(i, 1);
      if (family == Family::binomial) {
        y[i] = signal + 0.5 * random_vector(1, rng)[0] > 0 ? 1.0 : 0.0;
      } else if (family == Family::poisson) {
        y[i] = std::floor(std::abs(signal) + 1.0);
      } else {
        y[i] = signal + 0.2 * random_vector(1, rng)[0];
      }
    }
    GlmSpec spec;
    spec.family = family;
    spec.alpha = alpha;
    spec.nonneg = nonneg;
    spec.standardize = false;
    spec.lambda.n_lambda = 12;
    const GlmPath path = fit_path(Dataset{x, y, family}, spec);

    for (std::size_t l : {std::size_t{3}, std::size_t{7}, std::size_t{11}}) {
      const PathPoint& pt = path.points[l];
      const Vector eta = Vector::Constant(n, pt.intercept) + x * pt.beta;
      const Vector mu = link_inverse(family, eta);
      const Vector grad = x.transpose() * (mu - y) / static_cast<double>(n);
      CHECK(std::abs((mu - y).sum() / static_cast<double>(n)) < 1e-6);  // intercept condition
      for (Eigen::Index j = 0; j < p; ++j) {
        const double l1 = pt.lambda * alpha;
        const double l2 = pt.lambda * (1.0 - alpha);
        if (pt.beta[j] != 0.0) {
          const double sign = pt.beta[j] > 0 ? 1.0 : -1.0;
          CHECK(std::abs(grad[j] + l1 * sign + l2 * pt.beta[j]) < 1e-6);
        } else if (nonneg) {
          CHECK(grad[j] + l1 > -1e-6);
        } else {
          CHECK(std::abs(grad[j]) < l1 + 1e-6);
        }
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("warm-started path equals cold per-lambda fits") {
  std::mt19937_64 rng(41);
  const Eigen::Index n = 60, p = 8;
  const Matrix x = random_matrix(n, p, rng);
  Vector y = x.col(0) - 2.0 * x.col(3) + random_vector(n, rng, 0.5);

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 0.8;
  spec.lambda.n_lambda = 20;
  const GlmPath warm = fit_path(Dataset{x, y, Family::gaussian}, spec);

  for (std::size_t l : {std::size_t{0}, std::size_t{6}, std::size_t{13}, std::size_t{19}}) {
    GlmSpec cold_spec = spec;
    cold_spec.lambda.explicit_path = {warm.points[l].lambda};
    const GlmPath cold = fit_path(Dataset{x, y, Family::gaussian}, cold_spec);
    CHECK(testsup::max_abs_diff(cold.points[0].beta, warm.points[l].beta) < 1e-6);
    CHECK(std::abs(cold.points[0].intercept - warm.points[l].intercept) < 1e-6);
  }
}

TEST_CASE("objective is non-increasing across coordinate-descent sweeps") {
  std::mt19937_64 rng(51);
  const Eigen::Index n = 50, p = 10;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = x.col(1) + random_vector(n, rng, 0.3);
  Vector v = random_vector(n, rng).cwiseAbs();
  v.array() += 0.5;  // strictly positive observation weights
  const Vector w = Vector::Ones(p);

  std::vector<double> objectives;
  detail::SweepObserver observer = [&](const detail::CdState& state) {
    objectives.push_back(detail::weighted_cd_objective(x, v, y, 0.1, 0.7, w, state));
  };
  detail::CdState warm;
  warm.beta = Vector::Zero(p);
  GlmControl control;
  detail::weighted_cd_solve(x, v, y, 0.1, 0.7, w, false,
                            std::vector<bool>(static_cast<std::size_t>(p), true), control,
                            std::move(warm), &observer);
  REQUIRE(objectives.size() > 1);
  for (std::size_t i = 1; i < objectives.size(); ++i)
    CHECK(objectives[i] <= objectives[i - 1] + 1e-10);
}

TEST_CASE("nonnegativity is exact along the whole path") {
  std::mt19937_64 rng(61);
  const Eigen::Index n = 50, p = 8;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = x.col(0) - 3.0 * x.col(2) + random_vector(n, rng, 0.5);

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 0.5;
  spec.nonneg = true;
  const GlmPath path = fit_path(Dataset{x, y, Family::gaussian}, spec);
  for (const PathPoint& pt : path.points) CHECK(pt.beta.minCoeff() >= 0.0);
}

TEST_CASE("scale equivariance under standardization") {
  std::mt19937_64 rng(71);
  const Eigen::Index n = 60, p = 5;
  Matrix x = random_matrix(n, p, rng);
  const Vector y = 2.0 * x.col(0) - x.col(4) + random_vector(n, rng, 0.4);

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 0.6;
  spec.lambda.n_lambda = 10;
  const GlmPath base = fit_path(Dataset{x, y, Family::gaussian}, spec);

  const double c = 37.5;
  Matrix x_scaled = x;
  x_scaled.col(2) *= c;
  const GlmPath scaled = fit_path(Dataset{x_scaled, y, Family::gaussian}, spec);

  for (std::size_t l = 0; l < base.points.size(); ++l) {
    for (Eigen::Index j = 0; j < p; ++j) {
      const double expected = j == 2 ? base.points[l].beta[j] / c : base.points[l].beta[j];
      CHECK(std::abs(scaled.points[l].beta[j] - expected) < 1e-8);
    }
    const Vector fit_base = Vector::Constant(n, base.points[l].intercept) + x * base.points[l].beta;
    const Vector fit_scaled =
        Vector::Constant(n, scaled.points[l].intercept) + x_scaled * scaled.points[l].beta;
    CHECK(testsup::max_abs_diff(fit_base, fit_scaled) < 1e-8);
  }
}

TEST_CASE("cv min rule selects the smallest lambda when deviance keeps falling") {
  std::mt19937_64 rng(81);
  const Eigen::Index n = 80, p = 4;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = 4.0 * x.col(0) + 3.0 * x.col(1);  // noiseless: more fit is always better

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 1.0;
  spec.lambda.n_lambda = 25;
  CvConfig cv;
  cv.k_lambda = 5;
  cv.seed = 7;
  const GlmFit fit = cv_select_lambda(Dataset{x, y, Family::gaussian}, spec, cv);
  for (std::size_t l = 1; l < fit.cv.mean_deviance.size(); ++l)
    REQUIRE(fit.cv.mean_deviance[l] < fit.cv.mean_deviance[l - 1]);
  CHECK(fit.cv.chosen == static_cast<int>(fit.cv.lambdas.size()) - 1);
  CHECK(fit.lambda_selected == fit.cv.lambdas.back());
}

TEST_CASE("relaxation with an empty support returns the intercept-only model") {
  std::mt19937_64 rng(91);
  const Eigen::Index n = 40, p = 3;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = random_vector(n, rng);

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 1.0;
  spec.relax = true;
  spec.lambda.explicit_path = {1e8, 1e7};  // everything shrunk to zero
  CvConfig cv;
  cv.k_lambda = 4;
  cv.seed = 3;
  const GlmFit fit = cv_select_lambda(Dataset{x, y, Family::gaussian}, spec, cv);
  CHECK(fit.relaxed);
  CHECK(fit.beta.isZero(0.0));
  CHECK(fit.intercept == doctest::Approx(y.mean()));
}

TEST_CASE("relaxation refits the selected support without penalty") {
  std::mt19937_64 rng(95);
  const Eigen::Index n = 60, p = 4;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = 3.0 * x.col(1) + random_vector(n, rng, 0.3);

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 1.0;
  spec.relax = true;
  CvConfig cv;
  cv.k_lambda = 5;
  cv.seed = 11;
  const GlmFit fit = cv_select_lambda(Dataset{x, y, Family::gaussian}, spec, cv);
  REQUIRE(fit.relaxed);
  const auto support = fit.support();
  REQUIRE(!support.empty());

  // the relaxed coefficients solve unpenalized least squares on the support
  Matrix design(n, static_cast<Eigen::Index>(support.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t s = 0; s < support.size(); ++s)
    design.col(static_cast<Eigen::Index>(s) + 1) = x.col(support[s]);
  const Vector ols = design.colPivHouseholderQr().solve(y);
  CHECK(std::abs(fit.intercept - ols[0]) < 1e-5);
  for (std::size_t s = 0; s < support.size(); ++s)
    CHECK(std::abs(fit.beta[support[s]] - ols[static_cast<Eigen::Index>(s) + 1]) < 1e-5);
}

TEST_CASE("cv selection recovers the oracle support on a tiny problem") {
  std::mt19937_64 rng(101);
  const Eigen::Index n = 60, p = 2;
  const Matrix x = random_matrix(n, p, rng);
  const Vector y = 3.0 * x.col(0) + random_vector(n, rng, 0.2);
  const Dataset data{x, y, Family::gaussian};

  // oracle: exhaustively score all four supports by 5-fold least squares
  const std::vector<std::vector<int>> supports = {{}, {0}, {1}, {0, 1}};
  std::vector<double> scores;
  for (const auto& support : supports) {
    double sse = 0.0;
    for (int f = 0; f < 5; ++f) {
      std::vector<int> train, test;
      for (int i = 0; i < n; ++i) (i % 5 == f ? test : train).push_back(i);
      Matrix design(static_cast<Eigen::Index>(train.size()),
                    static_cast<Eigen::Index>(support.size()) + 1);
      design.col(0).setOnes();
      for (std::size_t s = 0; s < support.size(); ++s)
        design.col(static_cast<Eigen::Index>(s) + 1) = select(x.col(support[s]).eval(), train);
      const Vector coef = design.colPivHouseholderQr().solve(select(y, train));
      for (int i : test) {
        double pred = coef[0];
        for (std::size_t s = 0; s < support.size(); ++s)
          pred += coef[static_cast<Eigen::Index>(s) + 1] * x(i, support[s]);
        sse += (y[i] - pred) * (y[i] - pred);
      }
    }
    scores.push_back(sse);
  }
  const std::size_t oracle =
      static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
  REQUIRE(supports[oracle] == std::vector<int>{0});

  GlmSpec spec;
  spec.family = Family::gaussian;
  spec.alpha = 1.0;
  CvConfig cv;
  cv.k_lambda = 5;
  cv.seed = 13;
  const GlmFit fit = cv_select_lambda(data, spec, cv);
  CHECK(fit.support() == supports[oracle]);
}

TEST_CASE("adaptive weights are reciprocals of the ridge fit on the working scale") {
  std::mt19937_64 rng(111);
  const Eigen::Index n = 50, p = 4;
  Matrix x = random_matrix(n, p, rng);
  x.col(3).setConstant(2.0);  // constant column: ridge coefficient 0, capped weight
  const Vector y = 2.0 * x.col(0) + random_vector(n, rng, 0.5);
  const Dataset data{x, y, Family::gaussian};

  CvConfig cv;
  cv.k_lambda = 5;
  cv.seed = 17;
  const Vector weights = adaptive_weights(data, Family::gaussian, cv, true);

  GlmSpec ridge;
  ridge.family = Family::gaussian;
  ridge.alpha = 0.0;
  const GlmFit rfit = cv_select_lambda(data, ridge, cv);
  const auto std_in = detail::standardize_columns(x, true);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double magnitude = std::abs(rfit.beta[j]) * std_in.scale[j];
    if (magnitude == 0.0) {
      CHECK(weights[j] == kAdaptiveWeightCap);
    } else {
      CHECK(weights[j] == doctest::Approx(1.0 / magnitude).epsilon(1e-12));
    }
  }
  CHECK(weights[3] == kAdaptiveWeightCap);
}

TEST_CASE("duplicated columns receive equal adaptive weights") {
  std::mt19937_64 rng(121);
  const Eigen::Index n = 50;
  Matrix x(n, 4);
  x.col(0) = random_vector(n, rng);
  x.col(1) = x.col(0);  // exact duplicate
  x.col(2) = random_vector(n, rng);
  x.col(3) = x.col(2);
  const Vector y = x.col(0) + 0.5 * x.col(2) + random_vector(n, rng, 0.3);

  CvConfig cv;
  cv.k_lambda = 5;
  cv.seed = 19;
  const Vector weights = adaptive_weights(Dataset{x, y, Family::gaussian}, Family::gaussian, cv, true);
  CHECK(std::abs(weights[0] - weights[1]) < 1e-8 * weights[0]);
  CHECK(std::abs(weights[2] - weights[3]) < 1e-8 * weights[2]);
}

TEST_CASE("glm_predict covers all scales") {
  GlmFit fit;
  fit.spec.family = Family::binomial;
  fit.intercept = 0.0;
  fit.beta = Vector::Zero(3);
  const Matrix x = Matrix::Random(5, 3);
  const Vector response = glm_predict(fit, x, PredictScale::response);
  for (Eigen::Index i = 0; i < response.size(); ++i) CHECK(response[i] == 0.5);

  fit.spec.family = Family::gaussian;
  fit.beta << 1.0, -1.0, 0.5;
  CHECK(glm_predict(fit, x, PredictScale::link) == glm_predict(fit, x, PredictScale::response));

  fit.spec.family = Family::poisson;
  fit.beta.setZero();
  CHECK(glm_predict(fit, x, PredictScale::response)[0] == doctest::Approx(1.0));
  fit.intercept = 1.0;
  CHECK(glm_predict(fit, x, PredictScale::response)[0] == doctest::Approx(std::exp(1.0)));

  CHECK_THROWS_AS(glm_predict(fit, Matrix::Random(2, 5)), ShapeError);
}

TEST_CASE("fit_path rejects degenerate input") {
  Matrix x = Matrix::Ones(10, 2);
  Vector y = Vector::LinSpaced(10, 0.0, 1.0);
  GlmSpec spec;
  CHECK_THROWS_AS(fit_path(Dataset{x, y, Family::gaussian}, spec), DegenerateError);

  x(3, 0) = missing_value();
  CHECK_THROWS_AS(fit_path(Dataset{x, y, Family::gaussian}, spec), NumericError);

  std::mt19937_64 rng(131);
  CHECK_THROWS_AS(fit_path(Dataset{random_matrix(1, 2, rng), Vector::Zero(1), Family::gaussian}, spec),
                  DataError);
}

TEST_CASE("single-class folds raise a stratification error") {
  std::mt19937_64 rng(141);
  const Eigen::Index n = 20;
  const Matrix x = random_matrix(n, 3, rng);
  Vector y = Vector::Zero(n);
  y[4] = 1.0;  // one positive: the fold holding it trains on a single class

  GlmSpec spec;
  spec.family = Family::binomial;
  CvConfig cv;
  cv.k_lambda = 10;
  cv.seed = 23;
  CHECK_THROWS_AS(cv_select_lambda(Dataset{x, y, Family::binomial}, spec, cv),
                  StratificationError);
}
