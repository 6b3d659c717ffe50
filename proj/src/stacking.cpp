#include "mvstack/stacking.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mvstack/parallel.hpp"
#include "mvstack/rng.hpp"

namespace mvstack {

namespace {

LearnerConfig level_config(const LevelPlan& plan, const CvConfig& cv, int level,
                           bool parallel_trees) {
  const auto idx = static_cast<std::size_t>(level - 1);
  LearnerConfig config;
  config.kind = plan.learners[idx];
  config.k_lambda = cv.k_lambda;
  config.lambda_rule = cv.lambda_rule;
  config.adaptive = plan.adaptive[idx] != 0;
  config.parallel_trees = parallel_trees;
  config.glm.alpha = plan.alphas[idx];
  config.glm.nonneg = plan.nnc[idx] != 0;
  config.glm.relax = plan.relax[idx] != 0;
  // Meta-level inputs share a common scale already; only the feature level is
  // standardized.
  config.glm.standardize = level == 1;
  config.glm.control.cd_tol = plan.solver_tolerance;
  config.glm.control.irls_tol = plan.solver_tolerance * 10.0;
  return config;
}

// Input columns (into the previous level's Z) of every view at `column`,
// keyed by view label, in ascending label order.
std::vector<std::vector<int>> group_children(const ViewHierarchy& hierarchy, int column) {
  const int groups = hierarchy.view_count(column);
  std::vector<std::vector<int>> children(static_cast<std::size_t>(groups));
  const int prev = hierarchy.view_count(column - 1);
  for (int child = 1; child <= prev; ++child) {
    const auto feats = hierarchy.features_of(column - 1, child);
    const int parent = hierarchy.assignment(feats.front(), column);
    children[static_cast<std::size_t>(parent - 1)].push_back(child - 1);
  }
  return children;
}

void report_progress(const MvsOptions& options, const std::string& text) {
  if (options.progress) options.progress(text);
}

}  // namespace

MvsModel mvs_fit(const Dataset& data, const ViewHierarchy& hierarchy, const LevelPlan& plan,
                 const CvConfig& cv, const NaAction& na, const MvsOptions& options) {
  validate_dataset(data);
  if (hierarchy.p() != data.p()) {
    std::ostringstream msg;
    msg << "hierarchy covers " << hierarchy.p() << " features but x has " << data.p();
    throw ShapeError(msg.str());
  }
  if (plan.levels() != hierarchy.levels) {
    std::ostringstream msg;
    msg << "plan spans " << plan.levels() << " levels but the hierarchy has " << hierarchy.levels;
    throw ConfigError(msg.str());
  }

  MvsModel model;
  model.family = data.family;
  model.hierarchy = hierarchy;
  model.plan = plan;
  model.cv = cv;
  model.na = na;
  model.n_features = data.p();
  model.y_mean = data.y.mean();
  model.seed = cv.seed;
  model.levels.resize(static_cast<std::size_t>(plan.levels()));

  const MissingScreen screen = screen_missing(data, hierarchy, na);

  // ----- level 1: one sub-model per lowest-level view, out-of-sample
  // predictions assembled column-wise into Z_1
  {
    LevelRecord& record = model.levels[0];
    const int v_count = hierarchy.view_count(0);
    record.models.resize(static_cast<std::size_t>(v_count));
    record.z = Matrix::Constant(data.n(), v_count, missing_value());
    const FoldAssignment folds =
        make_folds(data.y, cv.k_outer, data.family, seed_chain(cv.seed, {seed_tag::outer_folds, 1}));
    for (const auto& w : folds.warnings) model.warnings.push_back(w);
    const LearnerConfig config = level_config(plan, cv, 1, options.parallel);

    report_progress(options, "level 1: fitting " + std::to_string(v_count) + " view models");
    parallel_for(static_cast<std::size_t>(v_count), options.parallel, [&](std::size_t vi) {
      const int label = static_cast<int>(vi) + 1;
      const std::vector<int> cols = hierarchy.features_of(0, label);
      const std::vector<int>& complete = screen.complete_rows[vi];
      if (complete.empty()) {
        throw DataError("view " + std::to_string(label) + " has no fully observed rows");
      }
      SubModel& sub = record.models[vi];
      sub.label = label;
      sub.inputs = cols;
      sub.model = train_learner(
          select(data.x, complete, cols), select(data.y, complete), data.family, config,
          seed_chain(cv.seed, {seed_tag::submodel, 1, static_cast<std::uint64_t>(vi)}));
      record.z.col(static_cast<Eigen::Index>(vi)) = oos_predictions_partial(
          data, cols, config, folds, complete,
          seed_chain(cv.seed, {seed_tag::oos, 1, static_cast<std::uint64_t>(vi)}));
    });

    record.imputation.method.assign(static_cast<std::size_t>(v_count), "");
    if (screen.any_missing) {
      auto [z_done, report] =
          impute_meta(record.z, data.y, na, seed_chain(cv.seed, {seed_tag::impute, 1}));
      record.z = std::move(z_done);
      record.imputation = std::move(report);
    }
  }

  // ----- intermediate levels: one sub-model per view over its children's Z
  // columns, with fresh folds per level for that model's own CV predictions
  for (int level = 2; level < plan.levels(); ++level) {
    const Matrix& z_prev = model.levels[static_cast<std::size_t>(level - 2)].z;
    LevelRecord& record = model.levels[static_cast<std::size_t>(level - 1)];
    const auto children = group_children(hierarchy, level - 1);
    const auto groups = children.size();
    record.models.resize(groups);
    record.z = Matrix::Constant(data.n(), static_cast<Eigen::Index>(groups), missing_value());
    const FoldAssignment folds = make_folds(
        data.y, cv.k_outer, data.family,
        seed_chain(cv.seed, {seed_tag::outer_folds, static_cast<std::uint64_t>(level)}));
    const LearnerConfig config = level_config(plan, cv, level, options.parallel);

    report_progress(options, "level " + std::to_string(level) + ": fitting " +
                                 std::to_string(groups) + " view models");
    parallel_for(groups, options.parallel, [&](std::size_t g) {
      SubModel& sub = record.models[g];
      sub.label = static_cast<int>(g) + 1;
      sub.inputs = children[g];
      const Dataset level_data{z_prev, data.y, data.family};
      const std::vector<int> complete = complete_rows_on(z_prev, sub.inputs);
      if (complete.empty())
        throw DataError("no rows fully observed on the inputs of a level-" +
                        std::to_string(level) + " model");
      sub.model = train_learner(
          select(z_prev, complete, sub.inputs), select(data.y, complete), data.family, config,
          seed_chain(cv.seed, {seed_tag::submodel, static_cast<std::uint64_t>(level),
                               static_cast<std::uint64_t>(g)}));
      record.z.col(static_cast<Eigen::Index>(g)) = oos_predictions_partial(
          level_data, sub.inputs, config, folds, complete,
          seed_chain(cv.seed, {seed_tag::oos, static_cast<std::uint64_t>(level),
                               static_cast<std::uint64_t>(g)}));
    });
  }

  // ----- top level: the final meta-learner over the last Z matrix
  {
    const int level = plan.levels();
    const Matrix& z_prev = model.levels[static_cast<std::size_t>(level - 2)].z;
    LevelRecord& record = model.levels.back();
    const LearnerConfig config = level_config(plan, cv, level, options.parallel);
    SubModel sub;
    sub.label = 0;
    sub.inputs.resize(static_cast<std::size_t>(z_prev.cols()));
    std::iota(sub.inputs.begin(), sub.inputs.end(), 0);
    const std::vector<int> complete = complete_rows_on(z_prev, sub.inputs);
    if (complete.empty()) throw DataError("no rows fully observed at the meta level");
    report_progress(options, "level " + std::to_string(level) + ": fitting the meta-learner");
    sub.model = train_learner(
        select_rows(z_prev, complete), select(data.y, complete), data.family, config,
        seed_chain(cv.seed, {seed_tag::submodel, static_cast<std::uint64_t>(level), 0}));
    record.models.push_back(std::move(sub));
    record.z.resize(data.n(), 0);
  }
  return model;
}

namespace {

Matrix predict_level(const std::vector<SubModel>& models, const Matrix& inputs) {
  Matrix out(inputs.rows(), static_cast<Eigen::Index>(models.size()));
  for (std::size_t m = 0; m < models.size(); ++m) {
    out.col(static_cast<Eigen::Index>(m)) =
        learner_predict(models[m].model, select_cols(inputs, models[m].inputs));
  }
  return out;
}

}  // namespace

Vector mvs_predict(const MvsModel& model, const Matrix& x_new, PredType predtype) {
  if (x_new.cols() != model.n_features) {
    std::ostringstream msg;
    msg << "prediction data has " << x_new.cols() << " columns; model expects "
        << model.n_features;
    throw ShapeError(msg.str());
  }
  if (!x_new.allFinite())
    throw MissingDataError("prediction data may not contain missing or non-finite values");
  if (predtype == PredType::class_label && model.family != Family::binomial)
    throw ConfigError("class predictions are only defined for the binomial family");

  Matrix current = x_new;
  for (const LevelRecord& record : model.levels) current = predict_level(record.models, current);
  Vector response = current.col(0);
  if (predtype == PredType::class_label) {
    for (Eigen::Index i = 0; i < response.size(); ++i)
      response[i] = response[i] > 0.5 ? 1.0 : 0.0;
  }
  return response;
}

double compose_from_level(const MvsModel& model, int from_level, const Vector& values) {
  Matrix current = values.transpose();
  for (std::size_t l = static_cast<std::size_t>(from_level); l < model.levels.size(); ++l) {
    current = predict_level(model.levels[l].models, current);
  }
  return current(0, 0);
}

std::vector<std::vector<CoefRecord>> mvs_coef(const MvsModel& model) {
  std::vector<std::vector<CoefRecord>> out;
  for (const LevelRecord& record : model.levels) {
    std::vector<CoefRecord> level;
    for (const SubModel& sub : record.models) {
      CoefRecord rec;
      rec.label = sub.label;
      if (const auto* glm = std::get_if<GlmFit>(&sub.model)) {
        rec.applicable = true;
        rec.intercept = glm->intercept;
        rec.coefficients = glm->beta;
        for (std::size_t i = 0; i < sub.inputs.size(); ++i)
          rec.names.push_back("V" + std::to_string(i + 1));
      }
      level.push_back(std::move(rec));
    }
    out.push_back(std::move(level));
  }
  return out;
}

std::vector<std::vector<ImportanceRecord>> mvs_importance(const MvsModel& model) {
  std::vector<std::vector<ImportanceRecord>> out;
  for (const LevelRecord& record : model.levels) {
    std::vector<ImportanceRecord> level;
    for (const SubModel& sub : record.models) {
      ImportanceRecord rec;
      rec.label = sub.label;
      if (const auto* forest = std::get_if<ForestFit>(&sub.model)) {
        rec.applicable = true;
        rec.values = forest->importance;
      }
      level.push_back(std::move(rec));
    }
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace mvstack
