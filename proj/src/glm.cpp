#include "mvstack/glm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvstack/cv.hpp"
#include "mvstack/rng.hpp"

namespace mvstack {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double nonneg_soft_threshold(double z, double gamma) {
  return z > gamma ? z - gamma : 0.0;
}

std::vector<double> GlmPath::lambdas() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& pt : points) out.push_back(pt.lambda);
  return out;
}

std::vector<int> GlmFit::support() const {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta[j] != 0.0) out.push_back(static_cast<int>(j));
  return out;
}

namespace detail {

Standardization standardize_columns(const Matrix& x, bool standardize) {
  const auto n = static_cast<double>(x.rows());
  Standardization std_out;
  std_out.mean = Vector::Zero(x.cols());
  std_out.scale = Vector::Ones(x.cols());
  std_out.enabled.assign(static_cast<std::size_t>(x.cols()), true);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double m = x.col(j).mean();
    const double var = (x.col(j).array() - m).square().sum() / n;
    if (var <= 0.0) {
      std_out.enabled[static_cast<std::size_t>(j)] = false;  // constant column, pinned at zero
      continue;
    }
    if (standardize) {
      std_out.mean[j] = m;
      std_out.scale[j] = std::sqrt(var);
    }
  }
  return std_out;
}

double weighted_cd_objective(const Matrix& x, const Vector& obs_weights, const Vector& response,
                             double lambda, double alpha, const Vector& penalty_weights,
                             const CdState& state) {
  const auto n = static_cast<double>(x.rows());
  const Vector r = response - Vector::Constant(x.rows(), state.intercept) - x * state.beta;
  double obj = 0.5 / n * (obs_weights.array() * r.array().square()).sum();
  for (Eigen::Index j = 0; j < state.beta.size(); ++j) {
    const double b = state.beta[j];
    obj += lambda * penalty_weights[j] * (alpha * std::abs(b) + 0.5 * (1.0 - alpha) * b * b);
  }
  return obj;
}

CdState weighted_cd_solve(const Matrix& x, const Vector& obs_weights, const Vector& response,
                          double lambda, double alpha, const Vector& penalty_weights,
                          bool nonneg, const std::vector<bool>& enabled,
                          const GlmControl& control, CdState warm,
                          const SweepObserver* on_sweep) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double n_d = static_cast<double>(n);

  CdState state = std::move(warm);
  if (state.beta.size() != p) state.beta = Vector::Zero(p);

  // Rows of x pre-scaled by the observation weights; num_j = xv_j . r / n.
  Matrix xv = x.array().colwise() * obs_weights.array();
  Vector vx2(p);
  for (Eigen::Index j = 0; j < p; ++j) vx2[j] = xv.col(j).dot(x.col(j)) / n_d;
  const double vsum = obs_weights.sum();

  Vector residual = response - Vector::Constant(n, state.intercept) - x * state.beta;

  const double gamma_base = lambda * alpha;
  const double ridge_base = lambda * (1.0 - alpha);

  // One coordinate pass over `coords`; returns the largest raw and
  // curvature-scaled coordinate changes.
  auto sweep = [&](const std::vector<int>& coords, double& max_change, double& max_scaled) {
    max_change = 0.0;
    max_scaled = 0.0;
    // intercept first; its curvature is mean(v)
    {
      const double shift = residual.dot(obs_weights) / vsum;
      if (shift != 0.0) {
        state.intercept += shift;
        residual.array() -= shift;
      }
      const double a = std::abs(shift);
      max_change = std::max(max_change, a);
      max_scaled = std::max(max_scaled, a * (vsum / n_d));
    }
    for (int j : coords) {
      const double old = state.beta[j];
      const double num = xv.col(j).dot(residual) / n_d + vx2[j] * old;
      const double denom = vx2[j] + ridge_base * penalty_weights[j];
      const double gamma = gamma_base * penalty_weights[j];
      double next = nonneg ? nonneg_soft_threshold(num, gamma) / denom
                           : soft_threshold(num, gamma) / denom;
      if (next != old) {
        residual -= x.col(j) * (next - old);
        state.beta[j] = next;
        const double a = std::abs(next - old);
        max_change = std::max(max_change, a);
        max_scaled = std::max(max_scaled, a * denom);
      }
    }
    ++state.sweeps;
    if (on_sweep) (*on_sweep)(state);
  };

  std::vector<int> all_coords;
  all_coords.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j)
    if (enabled[static_cast<std::size_t>(j)]) all_coords.push_back(static_cast<int>(j));

  // pinned coordinates carrying a nonzero warm start are reset
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!enabled[static_cast<std::size_t>(j)] && state.beta[j] != 0.0) {
      residual += x.col(j) * state.beta[j];
      state.beta[j] = 0.0;
    }
  }

  const double tol = control.cd_tol;
  int sweeps_left = control.max_sweeps;
  while (sweeps_left > 0) {
    double change = 0.0, scaled = 0.0;
    sweep(all_coords, change, scaled);
    --sweeps_left;
    if (change < tol && scaled < tol) break;

    // iterate on the active set until stable, then re-check everything
    std::vector<int> active;
    for (int j : all_coords)
      if (state.beta[j] != 0.0) active.push_back(j);
    while (sweeps_left > 0) {
      double a_change = 0.0, a_scaled = 0.0;
      sweep(active, a_change, a_scaled);
      --sweeps_left;
      if (a_change < tol && a_scaled < tol) break;
    }
  }
  return state;
}

namespace {

struct IrlsStep {
  Vector weights;
  Vector working;
};

IrlsStep irls_quantities(Family family, const Vector& y, const Vector& eta,
                         const GlmControl& control) {
  const Eigen::Index n = y.size();
  IrlsStep step;
  step.weights.resize(n);
  step.working.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mu, v;
    switch (family) {
      case Family::binomial:
        mu = 1.0 / (1.0 + std::exp(-eta[i]));
        v = std::max(mu * (1.0 - mu), control.weight_floor);
        break;
      case Family::poisson:
        mu = std::exp(std::min(eta[i], 30.0));
        v = std::max(mu, 1e-10);
        break;
      default:
        mu = eta[i];
        v = 1.0;
        break;
    }
    step.weights[i] = v;
    step.working[i] = eta[i] + (y[i] - mu) / v;
  }
  return step;
}

}  // namespace

// Solves one penalized GLM at fixed lambda on the working-scale design.
CdState glm_solve_single(const Matrix& xw, const Vector& y, Family family, double lambda,
                         double alpha, const Vector& penalty_weights, bool nonneg,
                         const std::vector<bool>& enabled, const GlmControl& control,
                         CdState warm, int lambda_index) {
  if (family == Family::gaussian) {
    const Vector ones = Vector::Ones(y.size());
    return weighted_cd_solve(xw, ones, y, lambda, alpha, penalty_weights, nonneg, enabled,
                             control, std::move(warm));
  }

  CdState state = std::move(warm);
  if (state.beta.size() != xw.cols()) state.beta = Vector::Zero(xw.cols());
  Vector eta = Vector::Constant(xw.rows(), state.intercept) + xw * state.beta;
  double dev_prev = deviance(family, y, link_inverse(family, eta));

  for (int it = 0; it < control.max_irls; ++it) {
    const IrlsStep step = irls_quantities(family, y, eta, control);
    const CdState before = state;
    state = weighted_cd_solve(xw, step.weights, step.working, lambda, alpha, penalty_weights,
                              nonneg, enabled, control, std::move(state));
    eta = Vector::Constant(xw.rows(), state.intercept) + xw * state.beta;
    if (!eta.allFinite() || !state.beta.allFinite() || !std::isfinite(state.intercept)) {
      std::ostringstream msg;
      msg << "IRLS diverged (" << family_name(family) << ", lambda index " << lambda_index << ")";
      throw ConvergenceError(msg.str());
    }
    const double dev = deviance(family, y, link_inverse(family, eta));
    if (!std::isfinite(dev)) {
      std::ostringstream msg;
      msg << "IRLS deviance non-finite (lambda index " << lambda_index << ")";
      throw ConvergenceError(msg.str());
    }
    double param_change = std::abs(state.intercept - before.intercept);
    param_change = std::max(param_change, (state.beta - before.beta).cwiseAbs().maxCoeff());
    if (std::abs(dev - dev_prev) < control.irls_tol && param_change < 10.0 * control.cd_tol) {
      dev_prev = dev;
      break;
    }
    dev_prev = dev;
  }
  return state;
}

}  // namespace detail

namespace {

Vector resolve_penalty_weights(const GlmSpec& spec, Eigen::Index p) {
  if (spec.penalty_weights.size() == 0) return Vector::Ones(p);
  if (spec.penalty_weights.size() != p)
    throw ShapeError("penalty_weights length does not match the feature count");
  if ((spec.penalty_weights.array() < 0.0).any())
    throw ConfigError("penalty_weights must be nonnegative");
  return spec.penalty_weights;
}

double null_intercept(Family family, const Vector& y) {
  double mu = y.mean();
  if (family == Family::binomial) mu = std::min(std::max(mu, 1e-12), 1.0 - 1e-12);
  if (family == Family::poisson) mu = std::max(mu, 1e-12);
  return link(family, mu);
}

std::vector<double> lambda_sequence(const Matrix& xw, const Vector& y, Family family,
                                    const GlmSpec& spec, const Vector& weights,
                                    const std::vector<bool>& enabled) {
  if (!spec.lambda.explicit_path.empty()) {
    const auto& path = spec.lambda.explicit_path;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (path[i] <= 0.0) throw ConfigError("explicit lambda path must be positive");
      if (i > 0 && path[i] >= path[i - 1])
        throw ConfigError("explicit lambda path must be strictly decreasing");
    }
    return path;
  }
  if (spec.lambda.n_lambda < 1) throw ConfigError("n_lambda must be at least 1");
  if (!(spec.lambda.min_ratio > 0.0 && spec.lambda.min_ratio < 1.0))
    throw ConfigError("lambda path ratio must lie in (0,1)");

  // Smallest lambda shrinking every penalized coefficient to zero; the alpha
  // floor keeps ridge paths finite.
  const double n_d = static_cast<double>(xw.rows());
  const double mu0 = link_inverse(family, null_intercept(family, y));
  const Vector r0 = y - Vector::Constant(y.size(), mu0);
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < xw.cols(); ++j) {
    if (!enabled[static_cast<std::size_t>(j)] || weights[j] <= 0.0) continue;
    const double score = std::abs(xw.col(j).dot(r0)) / n_d;
    lmax = std::max(lmax, score / weights[j]);
  }
  lmax /= std::max(spec.alpha, 1e-3);
  if (lmax <= 0.0) lmax = 1.0;

  const int count = spec.lambda.n_lambda;
  std::vector<double> path(static_cast<std::size_t>(count));
  if (count == 1) {
    path[0] = lmax;
    return path;
  }
  const double log_max = std::log(lmax);
  const double log_min = std::log(lmax * spec.lambda.min_ratio);
  for (int i = 0; i < count; ++i)
    path[static_cast<std::size_t>(i)] =
        std::exp(log_max + (log_min - log_max) * static_cast<double>(i) / (count - 1));
  return path;
}

PathPoint to_original_scale(const detail::CdState& state, const detail::Standardization& std_in,
                            double lambda) {
  PathPoint pt;
  pt.lambda = lambda;
  pt.beta = Vector::Zero(state.beta.size());
  double shift = 0.0;
  for (Eigen::Index j = 0; j < state.beta.size(); ++j) {
    if (state.beta[j] == 0.0) continue;
    pt.beta[j] = state.beta[j] / std_in.scale[j];
    shift += state.beta[j] * std_in.mean[j] / std_in.scale[j];
    ++pt.nonzero;
  }
  pt.intercept = state.intercept - shift;
  return pt;
}

struct GlmWorkspace {
  Matrix xw;
  detail::Standardization std_in;
  Vector weights;
  std::vector<double> lambdas;
};

GlmWorkspace prepare_workspace(const Dataset& data, const GlmSpec& spec) {
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
  if (data.n() < 2) throw DataError("need at least 2 observations");
  if (!data.x.allFinite()) throw NumericError("design matrix contains non-finite values");
  if (!data.y.allFinite()) throw NumericError("outcome contains non-finite values");

  GlmWorkspace ws;
  ws.std_in = detail::standardize_columns(data.x, spec.standardize);
  if (std::none_of(ws.std_in.enabled.begin(), ws.std_in.enabled.end(), [](bool b) { return b; }))
    throw DegenerateError("all feature columns are constant");

  if (spec.standardize) {
    ws.xw = (data.x.rowwise() - ws.std_in.mean.transpose()).array().rowwise() /
            ws.std_in.scale.transpose().array();
  } else {
    ws.xw = data.x;
  }
  ws.weights = resolve_penalty_weights(spec, data.p());
  ws.lambdas = lambda_sequence(ws.xw, data.y, data.family, spec, ws.weights, ws.std_in.enabled);
  return ws;
}

}  // namespace

GlmPath fit_path(const Dataset& data, const GlmSpec& spec) {
  GlmWorkspace ws = prepare_workspace(data, spec);

  GlmPath path;
  path.points.reserve(ws.lambdas.size());
  detail::CdState state;
  state.intercept = null_intercept(data.family, data.y);
  state.beta = Vector::Zero(data.p());
  for (std::size_t l = 0; l < ws.lambdas.size(); ++l) {
    state = detail::glm_solve_single(ws.xw, data.y, data.family, ws.lambdas[l], spec.alpha,
                                     ws.weights, spec.nonneg, ws.std_in.enabled, spec.control,
                                     std::move(state), static_cast<int>(l));
    path.points.push_back(to_original_scale(state, ws.std_in, ws.lambdas[l]));
  }
  return path;
}

GlmFit cv_select_lambda(const Dataset& data, const GlmSpec& spec, const CvConfig& cv) {
  GlmFit fit;
  fit.spec = spec;
  fit.path = fit_path(data, spec);
  const std::vector<double> lambdas = fit.path.lambdas();
  const auto n_lambda = lambdas.size();

  FoldAssignment folds = make_folds(data.y, cv.k_lambda, data.family, cv.seed);

  std::vector<std::vector<double>> fold_means(static_cast<std::size_t>(folds.k),
                                              std::vector<double>(n_lambda, 0.0));
  for (int f = 0; f < folds.k; ++f) {
    const std::vector<int> train = folds.complement(f);
    const std::vector<int> test = folds.members(f);
    if (data.family == Family::binomial) {
      const Vector ytr = select(data.y, train);
      if ((ytr.array() == ytr[0]).all()) {
        std::ostringstream msg;
        msg << "training data for lambda-selection fold " << (f + 1)
            << " holds a single outcome class";
        throw StratificationError(msg.str());
      }
    }
    Dataset sub{select_rows(data.x, train), select(data.y, train), data.family};
    GlmSpec fold_spec = spec;
    fold_spec.lambda.explicit_path = lambdas;
    fold_spec.relax = false;
    const GlmPath fold_path = fit_path(sub, fold_spec);

    const Matrix x_test = select_rows(data.x, test);
    const Vector y_test = select(data.y, test);
    for (std::size_t l = 0; l < n_lambda; ++l) {
      const PathPoint& pt = fold_path.points[l];
      const Vector mu = link_inverse(
          data.family, Vector::Constant(x_test.rows(), pt.intercept) + x_test * pt.beta);
      fold_means[static_cast<std::size_t>(f)][l] =
          deviance(data.family, y_test, mu) / static_cast<double>(y_test.size());
    }
  }

  fit.cv.lambdas = lambdas;
  fit.cv.rule = cv.lambda_rule;
  fit.cv.mean_deviance.resize(n_lambda);
  fit.cv.se_deviance.resize(n_lambda);
  const double k_d = static_cast<double>(folds.k);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    double mean = 0.0;
    for (int f = 0; f < folds.k; ++f) mean += fold_means[static_cast<std::size_t>(f)][l];
    mean /= k_d;
    double var = 0.0;
    for (int f = 0; f < folds.k; ++f) {
      const double d = fold_means[static_cast<std::size_t>(f)][l] - mean;
      var += d * d;
    }
    var /= (k_d - 1.0);
    fit.cv.mean_deviance[l] = mean;
    fit.cv.se_deviance[l] = std::sqrt(var / k_d);
  }

  std::size_t best = 0;
  for (std::size_t l = 1; l < n_lambda; ++l)
    if (fit.cv.mean_deviance[l] < fit.cv.mean_deviance[best]) best = l;
  std::size_t chosen = best;
  if (cv.lambda_rule == LambdaRule::one_se) {
    const double bar = fit.cv.mean_deviance[best] + fit.cv.se_deviance[best];
    for (std::size_t l = 0; l <= best; ++l) {
      if (fit.cv.mean_deviance[l] <= bar) {
        chosen = l;
        break;
      }
    }
  }
  fit.cv.chosen = static_cast<int>(chosen);
  fit.lambda_selected = lambdas[chosen];
  fit.intercept = fit.path.points[chosen].intercept;
  fit.beta = fit.path.points[chosen].beta;

  if (spec.relax) {
    const std::vector<int> support = fit.support();
    if (support.empty()) {
      fit.intercept = null_intercept(data.family, data.y);
      fit.beta.setZero();
    } else {
      GlmWorkspace ws = prepare_workspace(data, spec);
      std::vector<bool> enabled(static_cast<std::size_t>(data.p()), false);
      for (int j : support)
        enabled[static_cast<std::size_t>(j)] = ws.std_in.enabled[static_cast<std::size_t>(j)];
      detail::CdState warm;
      warm.intercept = fit.intercept;
      warm.beta = Vector::Zero(data.p());
      for (int j : support) {
        warm.beta[j] = fit.beta[j] * ws.std_in.scale[j];
        warm.intercept += fit.beta[j] * ws.std_in.mean[j];
      }
      const detail::CdState relaxed = detail::glm_solve_single(
          ws.xw, data.y, data.family, 0.0, spec.alpha, ws.weights, spec.nonneg, enabled,
          spec.control, std::move(warm), fit.cv.chosen);
      const PathPoint pt = to_original_scale(relaxed, ws.std_in, fit.lambda_selected);
      fit.intercept = pt.intercept;
      fit.beta = pt.beta;
    }
    fit.relaxed = true;
  }
  return fit;
}

Vector adaptive_weights(const Dataset& data, Family family, const CvConfig& cv,
                        bool standardize) {
  GlmSpec ridge;
  ridge.family = family;
  ridge.alpha = 0.0;
  ridge.standardize = standardize;
  Dataset working{data.x, data.y, family};
  const GlmFit fit = cv_select_lambda(working, ridge, cv);

  const detail::Standardization std_in = detail::standardize_columns(data.x, standardize);
  Vector weights(data.p());
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    const double magnitude = std::abs(fit.beta[j]) * std_in.scale[j];
    weights[j] = magnitude == 0.0 ? kAdaptiveWeightCap
                                  : std::min(1.0 / magnitude, kAdaptiveWeightCap);
  }
  return weights;
}

Vector glm_predict(const GlmFit& fit, const Matrix& x_new, PredictScale scale) {
  if (x_new.cols() != fit.beta.size()) {
    std::ostringstream msg;
    msg << "prediction data has " << x_new.cols() << " columns; model expects "
        << fit.beta.size();
    throw ShapeError(msg.str());
  }
  Vector eta = Vector::Constant(x_new.rows(), fit.intercept) + x_new * fit.beta;
  if (scale == PredictScale::link) return eta;
  return link_inverse(fit.spec.family, eta);
}

}  // namespace mvstack
