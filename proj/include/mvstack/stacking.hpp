#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mvstack/cv.hpp"
#include "mvstack/learner.hpp"
#include "mvstack/missing.hpp"
#include "mvstack/types.hpp"

namespace mvstack {

// Multi-view stacking across an arbitrary-depth hierarchy. Models at level 1
// are fitted per lowest-level view on the raw features; their out-of-sample
// predictions form Z_1. Models at level l > 1 are fitted per level-l view on
// the Z columns of their child views, and the single top-level model combines
// the last Z matrix into the final prediction.

struct SubModel {
  TrainedLearner model;
  std::vector<int> inputs;  // level 1: feature columns; level l>1: columns of Z_{l-1}
  int label = 0;            // view label at this level (top level: 0)
};

struct LevelRecord {
  std::vector<SubModel> models;
  Matrix z;  // n x models.size() CV predictions; empty at the top level
  ImputationReport imputation;  // level 1 only
};

struct MvsModel {
  Family family = Family::binomial;
  ViewHierarchy hierarchy;
  LevelPlan plan;
  CvConfig cv;
  NaAction na;
  Eigen::Index n_features = 0;
  double y_mean = 0.0;
  std::vector<LevelRecord> levels;  // size = plan.levels(); last holds the final model
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
};

using ProgressFn = std::function<void(const std::string&)>;

struct MvsOptions {
  bool parallel = false;
  ProgressFn progress;  // silent when empty
};

MvsModel mvs_fit(const Dataset& data, const ViewHierarchy& hierarchy, const LevelPlan& plan,
                 const CvConfig& cv, const NaAction& na, const MvsOptions& options = {});

enum class PredType { response, class_label };

// Composes sub-model predictions bottom-up on the response scale.
// class_label thresholds binomial responses at 0.5 (exactly 0.5 -> 0).
Vector mvs_predict(const MvsModel& model, const Matrix& x_new,
                   PredType predtype = PredType::response);

// Coefficient and importance views. GLM sub-models expose an intercept plus
// named coefficients; forest sub-models have no coefficients and are reported
// as not applicable (and vice versa for impurity importance).
struct CoefRecord {
  bool applicable = false;
  int label = 0;
  double intercept = 0.0;
  std::vector<std::string> names;
  Vector coefficients;
};

struct ImportanceRecord {
  bool applicable = false;
  int label = 0;
  Vector values;  // mean decrease in impurity per input
};

std::vector<std::vector<CoefRecord>> mvs_coef(const MvsModel& model);
std::vector<std::vector<ImportanceRecord>> mvs_importance(const MvsModel& model);

// Final response prediction for one row of inputs at a given model level:
// `values` holds one entry per level-`from_level` model output and is pushed
// through all higher levels. Used by prediction and by the minority report
// measure.
double compose_from_level(const MvsModel& model, int from_level, const Vector& values);

}  // namespace mvstack
