#pragma once

#include <cstdint>
#include <variant>

#include "mvstack/forest.hpp"
#include "mvstack/glm.hpp"
#include "mvstack/types.hpp"

namespace mvstack {

// A learner configuration is everything needed to train one sub-problem:
// either a penalized GLM (with its internal lambda tuning) or a random
// forest. Training is deterministic given (data, config, seed).

struct LearnerConfig {
  LearnerKind kind = LearnerKind::penalized_glm;
  GlmSpec glm;             // used when kind == penalized_glm
  ForestSpec forest;       // used when kind == random_forest
  bool adaptive = false;   // ridge-initialized penalty weights before the fit
  int k_lambda = 10;
  LambdaRule lambda_rule = LambdaRule::min;
  bool parallel_trees = false;
};

using TrainedLearner = std::variant<GlmFit, ForestFit>;

TrainedLearner train_learner(const Matrix& x, const Vector& y, Family family,
                             const LearnerConfig& config, std::uint64_t seed);

// Response-scale predictions (probabilities for binomial).
Vector learner_predict(const TrainedLearner& model, const Matrix& x_new);

}  // namespace mvstack
