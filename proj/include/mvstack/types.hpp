#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mvstack/errors.hpp"

namespace mvstack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

inline bool is_missing(double v) { return std::isnan(v); }
double missing_value();  // quiet NaN, the in-matrix missing marker

enum class Family { gaussian, binomial, poisson };

Family family_from_string(const std::string& name);
std::string family_name(Family family);

// Canonical link for each family.
double link(Family family, double mu);
double link_inverse(Family family, double eta);
Vector link_inverse(Family family, const Vector& eta);

// Per-observation deviance contribution at fitted mean mu.
double deviance_unit(Family family, double y, double mu);
double deviance(Family family, const Vector& y, const Vector& mu);

// ---------------------------------------------------------------------------
// Dataset

struct Dataset {
  Matrix x;  // n x p, may hold NaN missing markers
  Vector y;  // length n, never missing
  Family family = Family::gaussian;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

// Checks the row/outcome invariants; throws ShapeError or DataError.
void validate_dataset(const Dataset& data);

// ---------------------------------------------------------------------------
// View hierarchy

// Grouping of feature columns into views, one assignment column per grouping
// level ordered bottom-up. Labels are remapped to 1..V on ingest; the
// original labels are kept per level for reporting.
struct ViewHierarchy {
  int levels = 2;           // total level count, including the feature level
  IntMatrix assignment;     // p x (levels - 1), remapped labels 1..V
  std::vector<int> view_counts;                  // V per assignment column
  std::vector<std::vector<int>> original_labels; // per column: old label of new label v at [v-1]

  Eigen::Index p() const { return assignment.rows(); }
  int view_count(int column) const { return view_counts.at(static_cast<std::size_t>(column)); }

  // Feature columns carrying label (1-based) in assignment column `column` (0-based).
  std::vector<int> features_of(int column, int label) const;
};

ViewHierarchy validate_views(const IntMatrix& assignment, Eigen::Index p, int levels);
ViewHierarchy validate_views(const std::vector<int>& assignment, Eigen::Index p);

// ---------------------------------------------------------------------------
// Per-level learner plan

enum class LearnerKind { penalized_glm, random_forest };

LearnerKind learner_from_string(const std::string& name);
std::string learner_name(LearnerKind kind);

struct LevelPlan {
  std::vector<double> alphas;        // elastic-net mix per level
  std::vector<int> nnc;              // 1 = nonnegative coefficients at that level
  std::vector<LearnerKind> learners;
  std::vector<int> relax;            // 1 = unpenalized refit on the selected support
  std::vector<int> adaptive;         // 1 = ridge-initialized penalty weights
  double solver_tolerance = 1e-7;    // coordinate-change tolerance for GLM solves

  int levels() const { return static_cast<int>(alphas.size()); }
};

// Builds a plan with the usual defaults (two levels: ridge below a
// nonnegative lasso; GLM everywhere, no relaxation, no adaptive weights).
// Vectors left empty take defaults; nnc requested together with a random
// forest is ignored with a recorded warning.
LevelPlan make_level_plan(int levels, std::vector<double> alphas, std::vector<int> nnc,
                          std::vector<LearnerKind> learners, std::vector<int> relax,
                          std::vector<int> adaptive, std::vector<std::string>* warnings);

// ---------------------------------------------------------------------------
// Cross-validation configuration

enum class LambdaRule { min, one_se };

LambdaRule lambda_rule_from_string(const std::string& name);
std::string lambda_rule_name(LambdaRule rule);

struct CvConfig {
  int k_outer = 10;   // folds producing the out-of-sample meta features
  int k_lambda = 10;  // folds for internal lambda selection
  std::uint64_t seed = 0;
  LambdaRule lambda_rule = LambdaRule::min;
};

// ---------------------------------------------------------------------------
// Row/column gathers (kept explicit rather than through fancy indexing so the
// call sites read the same for matrices and vectors).

Matrix select_rows(const Matrix& x, const std::vector<int>& rows);
Matrix select_cols(const Matrix& x, const std::vector<int>& cols);
Matrix select(const Matrix& x, const std::vector<int>& rows, const std::vector<int>& cols);
Vector select(const Vector& v, const std::vector<int>& rows);

}  // namespace mvstack
