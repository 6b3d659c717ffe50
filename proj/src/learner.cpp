#include "mvstack/learner.hpp"

#include "mvstack/rng.hpp"

namespace mvstack {

TrainedLearner train_learner(const Matrix& x, const Vector& y, Family family,
                             const LearnerConfig& config, std::uint64_t seed) {
  Dataset data{x, y, family};
  if (config.kind == LearnerKind::random_forest) {
    ForestSpec spec = config.forest;
    spec.seed = seed;
    return forest_fit(data, spec, config.parallel_trees);
  }

  GlmSpec spec = config.glm;
  spec.family = family;
  CvConfig cv;
  cv.k_lambda = config.k_lambda;
  cv.lambda_rule = config.lambda_rule;
  cv.seed = seed_chain(seed, {seed_tag::inner_folds});
  if (config.adaptive) {
    CvConfig ridge_cv = cv;
    ridge_cv.seed = seed_chain(seed, {seed_tag::adaptive});
    spec.penalty_weights = adaptive_weights(data, family, ridge_cv, spec.standardize);
  }
  return cv_select_lambda(data, spec, cv);
}

Vector learner_predict(const TrainedLearner& model, const Matrix& x_new) {
  if (const auto* glm = std::get_if<GlmFit>(&model)) {
    return glm_predict(*glm, x_new, PredictScale::response);
  }
  return forest_predict(std::get<ForestFit>(model), x_new);
}

}  // namespace mvstack
