#include "mvstack/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace mvstack {

double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "binomial") return Family::binomial;
  if (name == "poisson") return Family::poisson;
  throw ConfigError("unknown family '" + name + "' (supported: gaussian, binomial, poisson)");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::binomial: return "binomial";
    case Family::poisson: return "poisson";
  }
  return "?";
}

namespace {
// Keeps binomial responses strictly inside (0,1) and poisson means positive.
constexpr double kProbEps = 1e-12;
constexpr double kEtaClamp = 30.0;
}  // namespace

double link(Family family, double mu) {
  switch (family) {
    case Family::gaussian: return mu;
    case Family::binomial: return std::log(mu / (1.0 - mu));
    case Family::poisson: return std::log(mu);
  }
  return mu;
}

double link_inverse(Family family, double eta) {
  switch (family) {
    case Family::gaussian:
      return eta;
    case Family::binomial: {
      const double p = 1.0 / (1.0 + std::exp(-eta));
      return std::min(std::max(p, kProbEps), 1.0 - kProbEps);
    }
    case Family::poisson:
      return std::exp(std::min(eta, kEtaClamp));
  }
  return eta;
}

Vector link_inverse(Family family, const Vector& eta) {
  Vector out(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) out[i] = link_inverse(family, eta[i]);
  return out;
}

double deviance_unit(Family family, double y, double mu) {
  switch (family) {
    case Family::gaussian:
      return (y - mu) * (y - mu);
    case Family::binomial: {
      const double p = std::min(std::max(mu, kProbEps), 1.0 - kProbEps);
      return -2.0 * (y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    case Family::poisson: {
      const double m = std::max(mu, kProbEps);
      const double ylogy = y > 0.0 ? y * std::log(y / m) : 0.0;
      return 2.0 * (ylogy - (y - m));
    }
  }
  return 0.0;
}

double deviance(Family family, const Vector& y, const Vector& mu) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) total += deviance_unit(family, y[i], mu[i]);
  return total;
}

void validate_dataset(const Dataset& data) {
  if (data.x.rows() != data.y.size()) {
    std::ostringstream msg;
    msg << "x has " << data.x.rows() << " rows but y has " << data.y.size() << " entries";
    throw ShapeError(msg.str());
  }
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    const double v = data.y[i];
    if (std::isnan(v)) throw DataError("y contains missing values");
    if (!std::isfinite(v)) throw DataError("y contains non-finite values");
    if (data.family == Family::binomial && v != 0.0 && v != 1.0)
      throw DataError("binomial outcome must be 0 or 1");
    if (data.family == Family::poisson && (v < 0.0 || std::floor(v) != v))
      throw DataError("poisson outcome must be a nonnegative integer");
  }
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
      const double v = data.x(i, j);
      if (!std::isnan(v) && !std::isfinite(v)) throw NumericError("x contains non-finite values");
    }
  }
}

std::vector<int> ViewHierarchy::features_of(int column, int label) const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < assignment.rows(); ++i) {
    if (assignment(i, column) == label) out.push_back(static_cast<int>(i));
  }
  return out;
}

ViewHierarchy validate_views(const IntMatrix& assignment, Eigen::Index p, int levels) {
  if (levels < 2) throw ConfigError("a stacked model needs at least 2 levels");
  if (assignment.rows() != p) {
    std::ostringstream msg;
    msg << "views matrix has " << assignment.rows() << " rows for " << p << " features";
    throw ShapeError(msg.str());
  }
  if (assignment.cols() != levels - 1) {
    std::ostringstream msg;
    msg << "views matrix has " << assignment.cols() << " columns; " << levels
        << " levels require " << (levels - 1);
    throw ShapeError(msg.str());
  }
  if (p == 0) throw ShapeError("empty feature set");

  ViewHierarchy hierarchy;
  hierarchy.levels = levels;
  hierarchy.assignment.resize(p, levels - 1);

  // Remap labels per column to 1..V, order-preserving by original value.
  for (int c = 0; c < levels - 1; ++c) {
    std::map<int, int> remap;
    for (Eigen::Index i = 0; i < p; ++i) {
      const int raw = assignment(i, c);
      if (raw < 1) {
        std::ostringstream msg;
        msg << "view label " << raw << " at feature " << (i + 1) << ", level column " << (c + 1)
            << " (labels must be positive integers)";
        throw LabelError(msg.str());
      }
      remap.emplace(raw, 0);
    }
    int next = 1;
    std::vector<int> originals;
    for (auto& [raw, mapped] : remap) {
      mapped = next++;
      originals.push_back(raw);
    }
    for (Eigen::Index i = 0; i < p; ++i) hierarchy.assignment(i, c) = remap[assignment(i, c)];
    hierarchy.view_counts.push_back(static_cast<int>(remap.size()));
    hierarchy.original_labels.push_back(std::move(originals));
  }

  // Nesting: features sharing a label at a lower column must share it at
  // every higher column. Checking adjacent columns covers all pairs.
  for (int c = 0; c + 1 < levels - 1; ++c) {
    std::map<int, int> parent;
    for (Eigen::Index i = 0; i < p; ++i) {
      const int child = hierarchy.assignment(i, c);
      const int up = hierarchy.assignment(i, c + 1);
      auto [it, inserted] = parent.emplace(child, up);
      if (!inserted && it->second != up) {
        std::ostringstream msg;
        msg << "view " << child << " at level column " << (c + 1)
            << " spans two parent views (" << it->second << " and " << up << ")";
        throw NestingError(msg.str());
      }
    }
  }
  return hierarchy;
}

ViewHierarchy validate_views(const std::vector<int>& assignment, Eigen::Index p) {
  IntMatrix m(static_cast<Eigen::Index>(assignment.size()), 1);
  for (std::size_t i = 0; i < assignment.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = assignment[i];
  return validate_views(m, p, 2);
}

LearnerKind learner_from_string(const std::string& name) {
  if (name == "glm" || name == "StaPLR" || name == "staplr") return LearnerKind::penalized_glm;
  if (name == "rf" || name == "RF") return LearnerKind::random_forest;
  throw ConfigError("unknown learner type '" + name + "' (supported: glm, rf)");
}

std::string learner_name(LearnerKind kind) {
  return kind == LearnerKind::penalized_glm ? "glm" : "rf";
}

LevelPlan make_level_plan(int levels, std::vector<double> alphas, std::vector<int> nnc,
                          std::vector<LearnerKind> learners, std::vector<int> relax,
                          std::vector<int> adaptive, std::vector<std::string>* warnings) {
  if (levels < 2) throw ConfigError("a stacked model needs at least 2 levels");
  const auto n = static_cast<std::size_t>(levels);

  if (alphas.empty()) {
    if (levels != 2)
      throw ConfigError("alphas must be given explicitly for models with more than 2 levels");
    alphas = {0.0, 1.0};
  }
  if (nnc.empty()) {
    if (levels != 2)
      throw ConfigError("nnc must be given explicitly for models with more than 2 levels");
    nnc = {0, 1};
  }
  if (learners.empty()) learners.assign(n, LearnerKind::penalized_glm);
  if (relax.empty()) relax.assign(n, 0);
  if (adaptive.empty()) adaptive.assign(n, 0);

  auto check_len = [&](std::size_t got, const char* what) {
    if (got != n) {
      std::ostringstream msg;
      msg << what << " has " << got << " entries for " << levels << " levels";
      throw ConfigError(msg.str());
    }
  };
  check_len(alphas.size(), "alphas");
  check_len(nnc.size(), "nnc");
  check_len(learners.size(), "type");
  check_len(relax.size(), "relax");
  check_len(adaptive.size(), "adaptive");

  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alphas must lie in [0,1]");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (nnc[i] != 0 && nnc[i] != 1) throw ConfigError("nnc entries must be 0 or 1");
    if (nnc[i] == 1 && learners[i] == LearnerKind::random_forest) {
      nnc[i] = 0;
      if (warnings) {
        std::ostringstream msg;
        msg << "nonnegativity constraint at level " << (i + 1)
            << " ignored: random forests have no coefficients to constrain";
        warnings->push_back(msg.str());
      }
    }
  }

  LevelPlan plan;
  plan.alphas = std::move(alphas);
  plan.nnc = std::move(nnc);
  plan.learners = std::move(learners);
  plan.relax = std::move(relax);
  plan.adaptive = std::move(adaptive);
  return plan;
}

LambdaRule lambda_rule_from_string(const std::string& name) {
  if (name == "min") return LambdaRule::min;
  if (name == "1se") return LambdaRule::one_se;
  throw ConfigError("unknown lambda rule '" + name + "' (supported: min, 1se)");
}

std::string lambda_rule_name(LambdaRule rule) {
  return rule == LambdaRule::min ? "min" : "1se";
}

Matrix select_rows(const Matrix& x, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Matrix select_cols(const Matrix& x, const std::vector<int>& cols) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
  return out;
}

Matrix select(const Matrix& x, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x(rows[i], cols[j]);
  return out;
}

Vector select(const Vector& v, const std::vector<int>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

}  // namespace mvstack
