#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mvstack/types.hpp"

namespace mvstack {

// Elastic-net penalized GLM solved by cyclic coordinate descent, with
// optional nonnegativity constraints on the penalized coefficients and IRLS
// for the binomial and poisson families. Minimizes
//
//   (1/n) * sum_i nll(y_i, b0 + x_i . b)
//     + lambda * sum_j w_j * (alpha * |b_j| + (1 - alpha)/2 * b_j^2)
//
// where nll is half the squared error (gaussian) or the negative
// log-likelihood (binomial, poisson). The intercept is always fitted and is
// never penalized or sign-constrained.

struct LambdaPathConfig {
  std::vector<double> explicit_path;  // non-empty: use as-is (must be positive, strictly decreasing)
  int n_lambda = 100;
  double min_ratio = 1e-2;
};

struct GlmControl {
  double cd_tol = 1e-7;       // max coordinate change per sweep, working scale
  int max_sweeps = 100000;
  double irls_tol = 1e-8;     // total-deviance change between reweights
  int max_irls = 25;
  double weight_floor = 1e-5; // IRLS weight floor (binomial)
};

struct GlmSpec {
  Family family = Family::gaussian;
  double alpha = 1.0;
  bool nonneg = false;
  Vector penalty_weights;     // size 0 = all ones; >= 0, multiply per-feature penalties
  bool standardize = true;
  bool relax = false;         // unpenalized refit on the selected support (cv path only)
  LambdaPathConfig lambda;
  GlmControl control;
};

double soft_threshold(double z, double gamma);
double nonneg_soft_threshold(double z, double gamma);

struct PathPoint {
  double lambda = 0.0;
  double intercept = 0.0;
  Vector beta;  // original (unstandardized) scale
  int nonzero = 0;
};

struct GlmPath {
  std::vector<PathPoint> points;  // descending lambda
  std::vector<double> lambdas() const;
};

struct CvCurve {
  std::vector<double> lambdas;
  std::vector<double> mean_deviance;   // per-observation deviance, averaged over folds
  std::vector<double> se_deviance;     // standard error of the fold means
  int chosen = -1;
  LambdaRule rule = LambdaRule::min;
};

struct GlmFit {
  GlmSpec spec;
  double intercept = 0.0;
  Vector beta;                 // original scale
  double lambda_selected = 0.0;
  GlmPath path;
  CvCurve cv;
  bool relaxed = false;

  std::vector<int> support() const;  // indices with beta != 0
};

// Coefficient path over a descending lambda sequence, warm-started.
GlmPath fit_path(const Dataset& data, const GlmSpec& spec);

// Per-fold path fits scored by held-out deviance; selects lambda by the
// configured rule, refits on the full data, and applies the relaxation refit
// when requested.
GlmFit cv_select_lambda(const Dataset& data, const GlmSpec& spec, const CvConfig& cv);

// Ridge-initialized penalty weights 1/|b_ridge| (working scale), capped.
inline constexpr double kAdaptiveWeightCap = 1e12;
Vector adaptive_weights(const Dataset& data, Family family, const CvConfig& cv,
                        bool standardize = true);

enum class PredictScale { link, response };

Vector glm_predict(const GlmFit& fit, const Matrix& x_new,
                   PredictScale scale = PredictScale::response);

namespace detail {

// One weighted elastic-net solve at fixed lambda (the IRLS inner problem;
// with unit weights this is the gaussian problem itself). Exposed for
// property tests; `on_sweep` observes the state after every full or
// active-set sweep.
struct CdState {
  double intercept = 0.0;
  Vector beta;
  int sweeps = 0;
};

using SweepObserver = std::function<void(const CdState&)>;

// obs_weights: per-observation weights v_i (mean roughly one).
// penalty_weights: per-feature w_j. `enabled[j]`=false pins beta_j at zero.
CdState weighted_cd_solve(const Matrix& x, const Vector& obs_weights, const Vector& response,
                          double lambda, double alpha, const Vector& penalty_weights,
                          bool nonneg, const std::vector<bool>& enabled,
                          const GlmControl& control, CdState warm,
                          const SweepObserver* on_sweep = nullptr);

// Penalized weighted least-squares objective that weighted_cd_solve minimizes.
double weighted_cd_objective(const Matrix& x, const Vector& obs_weights, const Vector& response,
                             double lambda, double alpha, const Vector& penalty_weights,
                             const CdState& state);

// Standardization recipe shared by the solver and the adaptive-weight code:
// column means and 1/n standard deviations; constant columns get scale 1 and
// are excluded from coordinate updates.
struct Standardization {
  Vector mean;
  Vector scale;
  std::vector<bool> enabled;
};
Standardization standardize_columns(const Matrix& x, bool standardize);

}  // namespace detail

}  // namespace mvstack
