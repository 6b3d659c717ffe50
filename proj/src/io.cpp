#include "mvstack/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "mvstack/rng.hpp"

namespace mvstack {

using nlohmann::json;

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_cell(const std::string& token, double& out) {
  if (token.empty() || token == "NA") {
    out = missing_value();
    return true;
  }
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(trimmed(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trimmed(current));
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    rows.push_back(split_line(line));
  }
  if (rows.empty()) throw ParseError("'" + path.string() + "' holds no data");

  CsvTable table;
  std::size_t first_data = 0;
  {
    double scratch;
    const bool numeric_first =
        std::all_of(rows[0].begin(), rows[0].end(),
                    [&](const std::string& tok) { return parse_cell(tok, scratch); });
    if (!numeric_first) {
      table.header = rows[0];
      first_data = 1;
      if (rows.size() == 1) throw ParseError("'" + path.string() + "' holds only a header row");
    }
  }

  const std::size_t cols = rows[first_data].size();
  table.values.resize(static_cast<Eigen::Index>(rows.size() - first_data),
                      static_cast<Eigen::Index>(cols));
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      std::ostringstream msg;
      msg << path.string() << ": line " << (r + 1) << " has " << rows[r].size()
          << " fields, expected " << cols;
      throw ParseError(msg.str());
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v;
      if (!parse_cell(rows[r][c], v)) {
        std::ostringstream msg;
        msg << path.string() << ": line " << (r + 1) << ", column " << (c + 1)
            << ": cannot parse '" << rows[r][c] << "' as a number";
        throw ParseError(msg.str());
      }
      table.values(static_cast<Eigen::Index>(r - first_data), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return table;
}

void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out << ',';
      out << header[c];
    }
    out << '\n';
  }
  char buffer[64];
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      const double v = values(r, c);
      if (std::isnan(v)) {
        out << "NA";
      } else {
        std::snprintf(buffer, sizeof(buffer), "%.17g", v);
        out << buffer;
      }
    }
    out << '\n';
  }
}

LoadedData load_csv(const std::filesystem::path& features_path, const std::string& outcome_spec,
                    const std::filesystem::path& views_path, Family family,
                    std::optional<int> levels) {
  CsvTable features = read_csv(features_path);

  LoadedData loaded;
  Vector y;
  Matrix x;
  if (std::filesystem::exists(outcome_spec)) {
    const CsvTable outcome = read_csv(outcome_spec);
    if (outcome.values.cols() != 1)
      throw ShapeError("outcome file '" + outcome_spec + "' must hold a single column");
    y = outcome.values.col(0);
    x = features.values;
    loaded.feature_names = features.header;
  } else {
    if (features.header.empty())
      throw ConfigError("outcome '" + outcome_spec +
                        "' is neither a file nor a named column (feature file has no header)");
    const auto it = std::find(features.header.begin(), features.header.end(), outcome_spec);
    if (it == features.header.end())
      throw ConfigError("outcome column '" + outcome_spec + "' not found in the feature file");
    const auto y_col = static_cast<Eigen::Index>(it - features.header.begin());
    y = features.values.col(y_col);
    x.resize(features.values.rows(), features.values.cols() - 1);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < features.values.cols(); ++c) {
      if (c == y_col) continue;
      x.col(k++) = features.values.col(c);
      loaded.feature_names.push_back(features.header[static_cast<std::size_t>(c)]);
    }
  }

  const CsvTable views = read_csv(views_path);
  if (views.values.rows() != x.cols()) {
    std::ostringstream msg;
    msg << "views file has " << views.values.rows() << " rows for " << x.cols() << " features";
    throw ShapeError(msg.str());
  }
  IntMatrix assignment(views.values.rows(), views.values.cols());
  for (Eigen::Index r = 0; r < views.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < views.values.cols(); ++c) {
      const double v = views.values(r, c);
      if (std::isnan(v) || std::floor(v) != v) {
        std::ostringstream msg;
        msg << views_path.string() << ": row " << (r + 1) << ", column " << (c + 1)
            << " is not an integer view label";
        throw ParseError(msg.str());
      }
      assignment(r, c) = static_cast<int>(v);
    }
  }
  const int level_count = levels.value_or(static_cast<int>(views.values.cols()) + 1);

  loaded.dataset = Dataset{std::move(x), std::move(y), family};
  validate_dataset(loaded.dataset);
  loaded.hierarchy = validate_views(assignment, loaded.dataset.p(), level_count);
  return loaded;
}

// ---------------------------------------------------------------------------
// Simulation

SimResult simulate(const SimSpec& spec) {
  if (spec.n < 1) throw ConfigError("simulation needs n >= 1");
  if (spec.view_sizes.empty()) throw ConfigError("simulation needs at least one view");
  for (int s : spec.view_sizes)
    if (s < 1) throw ConfigError("view sizes must be positive");
  const int p = std::accumulate(spec.view_sizes.begin(), spec.view_sizes.end(), 0);
  if (spec.signal_count < 0 || spec.signal_offset < 0 ||
      spec.signal_offset + spec.signal_count > p)
    throw ConfigError("signal block exceeds the feature count");

  // hierarchy: one label column for views, or two when sub-views are given
  IntMatrix assignment;
  if (spec.sub_view_sizes.empty()) {
    assignment.resize(p, 1);
    int at = 0, label = 1;
    for (int s : spec.view_sizes) {
      for (int i = 0; i < s; ++i) assignment(at++, 0) = label;
      ++label;
    }
  } else {
    for (int s : spec.sub_view_sizes)
      if (s < 1) throw ConfigError("sub-view sizes must be positive");
    if (std::accumulate(spec.sub_view_sizes.begin(), spec.sub_view_sizes.end(), 0) != p)
      throw ConfigError("sub-view sizes must add up to the feature count");
    assignment.resize(p, 2);
    int at = 0, label = 1;
    for (int s : spec.view_sizes) {
      for (int i = 0; i < s; ++i) assignment(at++, 1) = label;
      ++label;
    }
    at = 0;
    label = 1;
    int boundary = 0, view_idx = 0, consumed = 0;
    for (int s : spec.sub_view_sizes) {
      if (consumed == boundary) {
        if (view_idx < static_cast<int>(spec.view_sizes.size()))
          boundary += spec.view_sizes[static_cast<std::size_t>(view_idx++)];
      }
      consumed += s;
      if (consumed > boundary)
        throw ConfigError("sub-views must not straddle view boundaries");
      for (int i = 0; i < s; ++i) assignment(at++, 0) = label;
      ++label;
    }
  }

  SimResult result;
  result.hierarchy = validate_views(assignment, p, spec.sub_view_sizes.empty() ? 2 : 3);

  Matrix x(spec.n, p);
  {
    RngEngine rng(seed_chain(spec.seed, {seed_tag::sim_x}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index c = 0; c < p; ++c)
      for (Eigen::Index r = 0; r < spec.n; ++r) x(r, c) = normal(rng);
  }

  Vector b = Vector::Zero(p);
  for (int j = spec.signal_offset; j < spec.signal_offset + spec.signal_count; ++j)
    b[j] = spec.signal_magnitude;
  if (spec.random_sign) {
    RngEngine rng(seed_chain(spec.seed, {seed_tag::sim_sign}));
    for (Eigen::Index j = 0; j < p; ++j)
      if (draw_below(rng, 2) == 0) b[j] = -b[j];
  }

  const Vector eta = x * b;
  Vector y(spec.n);
  {
    RngEngine rng(seed_chain(spec.seed, {seed_tag::sim_y}));
    switch (spec.family) {
      case Family::binomial: {
        for (Eigen::Index i = 0; i < spec.n; ++i) {
          const double prob = 1.0 / (1.0 + std::exp(-eta[i]));
          std::bernoulli_distribution draw(prob);
          y[i] = draw(rng) ? 1.0 : 0.0;
        }
        break;
      }
      case Family::gaussian: {
        std::normal_distribution<double> noise(0.0, 1.0);
        for (Eigen::Index i = 0; i < spec.n; ++i) y[i] = eta[i] + noise(rng);
        break;
      }
      case Family::poisson: {
        for (Eigen::Index i = 0; i < spec.n; ++i) {
          const double mean = std::exp(std::min(eta[i], 20.0));
          std::poisson_distribution<long> draw(mean);
          y[i] = static_cast<double>(draw(rng));
        }
        break;
      }
    }
  }

  if (spec.missing) {
    const MissingBlock& block = *spec.missing;
    const int top_col = result.hierarchy.levels - 2;
    if (block.view < 1 || block.view > result.hierarchy.view_count(top_col))
      throw ConfigError("missing block names an unknown view");
    if (block.row_begin < 1 || block.row_end < block.row_begin || block.row_end > spec.n)
      throw ConfigError("missing block rows out of range");
    for (int f : result.hierarchy.features_of(top_col, block.view))
      for (int r = block.row_begin - 1; r < block.row_end; ++r) x(r, f) = missing_value();
  }

  result.dataset = Dataset{std::move(x), std::move(y), spec.family};
  result.coefficients = std::move(b);
  validate_dataset(result.dataset);
  return result;
}

SimSpec sim_spec_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  SimSpec spec;
  try {
    if (doc.contains("n")) spec.n = doc["n"].get<int>();
    if (doc.contains("view_sizes")) spec.view_sizes = doc["view_sizes"].get<std::vector<int>>();
    if (doc.contains("sub_view_sizes"))
      spec.sub_view_sizes = doc["sub_view_sizes"].get<std::vector<int>>();
    if (doc.contains("signal_count")) spec.signal_count = doc["signal_count"].get<int>();
    if (doc.contains("signal_offset")) spec.signal_offset = doc["signal_offset"].get<int>();
    if (doc.contains("signal_magnitude"))
      spec.signal_magnitude = doc["signal_magnitude"].get<double>();
    if (doc.contains("random_sign")) spec.random_sign = doc["random_sign"].get<bool>();
    if (doc.contains("family")) spec.family = family_from_string(doc["family"].get<std::string>());
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("missing")) {
      MissingBlock block;
      block.row_begin = doc["missing"]["row_begin"].get<int>();
      block.row_end = doc["missing"]["row_end"].get<int>();
      block.view = doc["missing"]["view"].get<int>();
      spec.missing = block;
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Model persistence

namespace {

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) {
      out.push_back(nullptr);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

Vector vector_from_json(const json& a) {
  Vector out(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (const auto& item : a) out[i++] = item.is_null() ? missing_value() : item.get<double>();
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Matrix matrix_from_json(const json& a, Eigen::Index cols_hint) {
  const auto rows = static_cast<Eigen::Index>(a.size());
  if (rows == 0) return Matrix(0, cols_hint);
  const auto cols = static_cast<Eigen::Index>(a.front().size());
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    out.row(r) = vector_from_json(a[static_cast<std::size_t>(r)]).transpose();
  return out;
}

json submodel_to_json(const SubModel& sub) {
  json out;
  out["label"] = sub.label;
  out["inputs"] = sub.inputs;
  if (const auto* glm = std::get_if<GlmFit>(&sub.model)) {
    out["kind"] = "glm";
    out["family"] = family_name(glm->spec.family);
    out["alpha"] = glm->spec.alpha;
    out["nonneg"] = glm->spec.nonneg;
    out["standardize"] = glm->spec.standardize;
    if (glm->spec.penalty_weights.size() > 0)
      out["penalty_weights"] = vector_to_json(glm->spec.penalty_weights);
    out["intercept"] = glm->intercept;
    out["beta"] = vector_to_json(glm->beta);
    out["lambda_selected"] = glm->lambda_selected;
    out["relaxed"] = glm->relaxed;
    out["cv_lambdas"] = glm->cv.lambdas;
    out["cv_mean_deviance"] = glm->cv.mean_deviance;
    out["cv_se_deviance"] = glm->cv.se_deviance;
    out["cv_chosen"] = glm->cv.chosen;
    out["cv_rule"] = lambda_rule_name(glm->cv.rule);
  } else {
    const auto& forest = std::get<ForestFit>(sub.model);
    out["kind"] = "rf";
    out["family"] = family_name(forest.family);
    out["n_trees"] = forest.spec.n_trees;
    out["mtry"] = forest.spec.mtry;
    out["min_node"] = forest.spec.min_node;
    out["seed"] = forest.spec.seed;
    out["n_features"] = forest.n_features;
    out["importance"] = vector_to_json(forest.importance);
    out["oob"] = vector_to_json(forest.oob_predictions);
    json trees = json::array();
    for (const Tree& tree : forest.trees) {
      json node_arrays;
      std::vector<int> feature, left, right;
      std::vector<double> threshold, value;
      for (const TreeNode& nd : tree.nodes) {
        feature.push_back(nd.feature);
        threshold.push_back(nd.threshold);
        left.push_back(nd.left);
        right.push_back(nd.right);
        value.push_back(nd.value);
      }
      node_arrays["f"] = feature;
      node_arrays["t"] = threshold;
      node_arrays["l"] = left;
      node_arrays["r"] = right;
      node_arrays["v"] = value;
      trees.push_back(std::move(node_arrays));
    }
    out["trees"] = std::move(trees);
  }
  return out;
}

SubModel submodel_from_json(const json& doc) {
  SubModel sub;
  sub.label = doc["label"].get<int>();
  sub.inputs = doc["inputs"].get<std::vector<int>>();
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "glm") {
    GlmFit fit;
    fit.spec.family = family_from_string(doc["family"].get<std::string>());
    fit.spec.alpha = doc["alpha"].get<double>();
    fit.spec.nonneg = doc["nonneg"].get<bool>();
    fit.spec.standardize = doc["standardize"].get<bool>();
    if (doc.contains("penalty_weights"))
      fit.spec.penalty_weights = vector_from_json(doc["penalty_weights"]);
    fit.intercept = doc["intercept"].get<double>();
    fit.beta = vector_from_json(doc["beta"]);
    fit.lambda_selected = doc["lambda_selected"].get<double>();
    fit.relaxed = doc["relaxed"].get<bool>();
    fit.cv.lambdas = doc["cv_lambdas"].get<std::vector<double>>();
    fit.cv.mean_deviance = doc["cv_mean_deviance"].get<std::vector<double>>();
    fit.cv.se_deviance = doc["cv_se_deviance"].get<std::vector<double>>();
    fit.cv.chosen = doc["cv_chosen"].get<int>();
    fit.cv.rule = lambda_rule_from_string(doc["cv_rule"].get<std::string>());
    sub.model = std::move(fit);
  } else if (kind == "rf") {
    ForestFit fit;
    fit.family = family_from_string(doc["family"].get<std::string>());
    fit.spec.n_trees = doc["n_trees"].get<int>();
    fit.spec.mtry = doc["mtry"].get<int>();
    fit.spec.min_node = doc["min_node"].get<int>();
    fit.spec.seed = doc["seed"].get<std::uint64_t>();
    fit.n_features = doc["n_features"].get<Eigen::Index>();
    fit.importance = vector_from_json(doc["importance"]);
    fit.oob_predictions = vector_from_json(doc["oob"]);
    for (const auto& tree_doc : doc["trees"]) {
      Tree tree;
      const auto feature = tree_doc["f"].get<std::vector<int>>();
      const auto threshold = tree_doc["t"].get<std::vector<double>>();
      const auto left = tree_doc["l"].get<std::vector<int>>();
      const auto right = tree_doc["r"].get<std::vector<int>>();
      const auto value = tree_doc["v"].get<std::vector<double>>();
      tree.nodes.resize(feature.size());
      for (std::size_t i = 0; i < feature.size(); ++i) {
        tree.nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
      }
      fit.trees.push_back(std::move(tree));
    }
    sub.model = std::move(fit);
  } else {
    throw ParseError("unknown sub-model kind '" + kind + "'");
  }
  return sub;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

}  // namespace

void save_model(const MvsModel& model, const std::filesystem::path& path) {
  json doc;
  doc["format"] = kModelFormat;
  doc["created_at"] = iso_timestamp();
  doc["family"] = family_name(model.family);
  doc["seed"] = model.seed;
  doc["n_features"] = model.n_features;
  doc["y_mean"] = model.y_mean;

  json hierarchy;
  hierarchy["levels"] = model.hierarchy.levels;
  json assignment = json::array();
  for (Eigen::Index r = 0; r < model.hierarchy.assignment.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < model.hierarchy.assignment.cols(); ++c)
      row.push_back(model.hierarchy.assignment(r, c));
    assignment.push_back(std::move(row));
  }
  hierarchy["assignment"] = std::move(assignment);
  hierarchy["view_counts"] = model.hierarchy.view_counts;
  hierarchy["original_labels"] = model.hierarchy.original_labels;
  doc["hierarchy"] = std::move(hierarchy);

  json plan;
  plan["alphas"] = model.plan.alphas;
  plan["nnc"] = model.plan.nnc;
  json learners = json::array();
  for (LearnerKind kind : model.plan.learners) learners.push_back(learner_name(kind));
  plan["type"] = std::move(learners);
  plan["relax"] = model.plan.relax;
  plan["adaptive"] = model.plan.adaptive;
  plan["solver_tolerance"] = model.plan.solver_tolerance;
  doc["plan"] = std::move(plan);

  json cv;
  cv["k_outer"] = model.cv.k_outer;
  cv["k_lambda"] = model.cv.k_lambda;
  cv["seed"] = model.cv.seed;
  cv["lambda_rule"] = lambda_rule_name(model.cv.lambda_rule);
  doc["cv"] = std::move(cv);

  json na;
  na["kind"] = na_kind_name(model.na.kind);
  na["m"] = model.na.m;
  na["donors"] = model.na.donors;
  doc["na"] = std::move(na);

  doc["warnings"] = model.warnings;

  json levels = json::array();
  for (const LevelRecord& record : model.levels) {
    json level;
    level["z"] = matrix_to_json(record.z);
    json imputation;
    imputation["method"] = record.imputation.method;
    imputation["m"] = record.imputation.m;
    imputation["donors"] = record.imputation.donors;
    imputation["notes"] = record.imputation.notes;
    level["imputation"] = std::move(imputation);
    json models = json::array();
    for (const SubModel& sub : record.models) models.push_back(submodel_to_json(sub));
    level["models"] = std::move(models);
    levels.push_back(std::move(level));
  }
  doc["levels"] = std::move(levels);

  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << doc.dump() << '\n';
}

MvsModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  try {
    const std::string format = doc.value("format", "");
    if (format != kModelFormat)
      throw VersionError("'" + path.string() + "' has format '" + format + "'; this build reads '" +
                         kModelFormat + "'");

    MvsModel model;
    model.family = family_from_string(doc["family"].get<std::string>());
    model.seed = doc["seed"].get<std::uint64_t>();
    model.n_features = doc["n_features"].get<Eigen::Index>();
    model.y_mean = doc["y_mean"].get<double>();

    const json& hierarchy = doc["hierarchy"];
    model.hierarchy.levels = hierarchy["levels"].get<int>();
    const auto& assignment = hierarchy["assignment"];
    const auto rows = static_cast<Eigen::Index>(assignment.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(assignment.front().size()) : 0;
    model.hierarchy.assignment.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        model.hierarchy.assignment(r, c) =
            assignment[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<int>();
    model.hierarchy.view_counts = hierarchy["view_counts"].get<std::vector<int>>();
    model.hierarchy.original_labels =
        hierarchy["original_labels"].get<std::vector<std::vector<int>>>();

    const json& plan = doc["plan"];
    model.plan.alphas = plan["alphas"].get<std::vector<double>>();
    model.plan.nnc = plan["nnc"].get<std::vector<int>>();
    for (const auto& name : plan["type"])
      model.plan.learners.push_back(learner_from_string(name.get<std::string>()));
    model.plan.relax = plan["relax"].get<std::vector<int>>();
    model.plan.adaptive = plan["adaptive"].get<std::vector<int>>();
    model.plan.solver_tolerance = plan["solver_tolerance"].get<double>();

    const json& cv = doc["cv"];
    model.cv.k_outer = cv["k_outer"].get<int>();
    model.cv.k_lambda = cv["k_lambda"].get<int>();
    model.cv.seed = cv["seed"].get<std::uint64_t>();
    model.cv.lambda_rule = lambda_rule_from_string(cv["lambda_rule"].get<std::string>());

    const json& na = doc["na"];
    model.na.kind = na_kind_from_string(na["kind"].get<std::string>());
    model.na.m = na["m"].get<int>();
    model.na.donors = na["donors"].get<int>();

    model.warnings = doc["warnings"].get<std::vector<std::string>>();

    for (const auto& level_doc : doc["levels"]) {
      LevelRecord record;
      record.z = matrix_from_json(level_doc["z"], 0);
      const json& imputation = level_doc["imputation"];
      record.imputation.method = imputation["method"].get<std::vector<std::string>>();
      record.imputation.m = imputation["m"].get<int>();
      record.imputation.donors = imputation["donors"].get<int>();
      record.imputation.notes = imputation["notes"].get<std::vector<std::string>>();
      for (const auto& sub_doc : level_doc["models"])
        record.models.push_back(submodel_from_json(sub_doc));
      model.levels.push_back(std::move(record));
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace mvstack
