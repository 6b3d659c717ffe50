// Command-line front-end: fit / predict / coef / importance / mrm / simulate.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvstack/io.hpp"
#include "mvstack/mrm.hpp"
#include "mvstack/stacking.hpp"

namespace {

using namespace mvstack;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  out.push_back(current);
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& tok : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": cannot parse '" + tok + "' as a number");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_doubles(text, what)) {
    if (v != static_cast<int>(v)) throw ConfigError(std::string(what) + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<int> expand_flags(std::vector<int> values, int levels, const char* what) {
  if (values.size() == 1) values.assign(static_cast<std::size_t>(levels), values[0]);
  if (static_cast<int>(values.size()) != levels) {
    std::ostringstream msg;
    msg << what << " needs 1 or " << levels << " entries";
    throw ConfigError(msg.str());
  }
  return values;
}

std::string format_coefficient(double v) {
  if (v == 0.0) return ".";
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.7g", v);
  return buffer;
}

void print_coef_level(const std::vector<CoefRecord>& records, int level) {
  std::cout << "Level " << level << "\n";
  for (std::size_t m = 0; m < records.size(); ++m) {
    const CoefRecord& rec = records[m];
    std::cout << "  [model " << (m + 1) << "]\n";
    if (!rec.applicable) {
      std::cout << "    NA\n";
      continue;
    }
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%.7g", rec.intercept);
    std::cout << "    (Intercept)  " << buffer << "\n";
    for (Eigen::Index j = 0; j < rec.coefficients.size(); ++j) {
      std::cout << "    " << rec.names[static_cast<std::size_t>(j)] << "  "
                << format_coefficient(rec.coefficients[j]) << "\n";
    }
  }
}

void print_importance_level(const std::vector<ImportanceRecord>& records, int level,
                            Family family) {
  const char* column =
      family == Family::binomial ? "MeanDecreaseGini" : "MeanDecreaseImpurity";
  std::cout << "Level " << level << "\n";
  for (std::size_t m = 0; m < records.size(); ++m) {
    const ImportanceRecord& rec = records[m];
    std::cout << "  [model " << (m + 1) << "]";
    if (!rec.applicable) {
      std::cout << "  NA\n";
      continue;
    }
    std::cout << "  " << column << "\n";
    char buffer[48];
    for (Eigen::Index j = 0; j < rec.values.size(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.7g", rec.values[j]);
      std::cout << "    " << (j + 1) << "  " << buffer << "\n";
    }
  }
}

struct FitArgs {
  std::string data, outcome, views, family = "binomial";
  std::string alphas, nnc, type, relax, adaptive;
  int levels = 0;
  std::string na_action = "fail";
  std::vector<std::string> na_args;
  int k = 10, k_lambda = 10;
  std::string lambda_rule = "min";
  std::uint64_t seed = 1;
  bool parallel = false;
  std::string out = "model.json";
};

int run_fit(const FitArgs& args) {
  const Family family = family_from_string(args.family);
  LoadedData loaded = load_csv(args.data, args.outcome, args.views, family,
                               args.levels > 0 ? std::optional<int>(args.levels)
                                               : std::nullopt);
  const int levels = loaded.hierarchy.levels;

  std::vector<double> alphas;
  if (!args.alphas.empty()) alphas = parse_doubles(args.alphas, "--alphas");
  std::vector<int> nnc;
  if (!args.nnc.empty()) nnc = parse_ints(args.nnc, "--nnc");
  std::vector<LearnerKind> learners;
  if (!args.type.empty()) {
    std::vector<std::string> names = split_list(args.type);
    if (names.size() == 1) names.assign(static_cast<std::size_t>(levels), names[0]);
    for (const auto& name : names) learners.push_back(learner_from_string(name));
  }
  std::vector<int> relax;
  if (!args.relax.empty()) relax = expand_flags(parse_ints(args.relax, "--relax"), levels, "--relax");
  std::vector<int> adaptive;
  if (!args.adaptive.empty())
    adaptive = expand_flags(parse_ints(args.adaptive, "--adaptive"), levels, "--adaptive");

  std::vector<std::string> warnings;
  const LevelPlan plan = make_level_plan(levels, std::move(alphas), std::move(nnc),
                                         std::move(learners), std::move(relax),
                                         std::move(adaptive), &warnings);

  NaAction na;
  na.kind = na_kind_from_string(args.na_action);
  if (na.kind == NaKind::fail && !args.na_args.empty())
    throw ConfigError("na-action 'fail' admits no --na-arg options");
  for (const std::string& kv : args.na_args) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--na-arg expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    int parsed = 0;
    try {
      parsed = std::stoi(value);
    } catch (const std::exception&) {
      throw ConfigError("--na-arg " + key + ": cannot parse '" + value + "'");
    }
    if (key == "m") {
      na.m = parsed;
    } else if (key == "donors") {
      na.donors = parsed;
    } else {
      throw ConfigError("unknown --na-arg key '" + key + "' (supported: m, donors)");
    }
  }

  CvConfig cv;
  cv.k_outer = args.k;
  cv.k_lambda = args.k_lambda;
  cv.seed = args.seed;
  cv.lambda_rule = lambda_rule_from_string(args.lambda_rule);

  MvsOptions options;
  options.parallel = args.parallel;
  options.progress = [](const std::string& text) { std::cerr << text << "\n"; };

  const MvsModel model = mvs_fit(loaded.dataset, loaded.hierarchy, plan, cv, na, options);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";

  for (int level = 1; level <= levels; ++level) {
    const LevelRecord& record = model.levels[static_cast<std::size_t>(level - 1)];
    std::cout << "level " << level << ": " << record.models.size()
              << (record.models.size() == 1 ? " model" : " models") << "\n";
  }
  const auto coef = mvs_coef(model);
  for (int level = 2; level <= levels; ++level) {
    const auto& records = coef[static_cast<std::size_t>(level - 1)];
    std::ostringstream kept;
    bool applicable = false;
    int shown = 0, total = 0;
    for (const CoefRecord& rec : records) {
      if (!rec.applicable) continue;
      applicable = true;
      for (Eigen::Index j = 0; j < rec.coefficients.size(); ++j) {
        ++total;
        if (rec.coefficients[j] != 0.0) {
          if (shown++) kept << ", ";
          if (records.size() > 1) kept << "model " << rec.label << ":";
          kept << rec.names[static_cast<std::size_t>(j)];
        }
      }
    }
    if (applicable)
      std::cout << "selected at level " << level << ": "
                << (shown ? kept.str() : "(none)") << "  [" << shown << " of " << total << "]\n";
  }

  save_model(model, args.out);
  std::cout << "model written to " << args.out << "\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, predtype = "response", out;
};

int run_predict(const PredictArgs& args) {
  const MvsModel model = load_model(args.model);
  PredType predtype;
  if (args.predtype == "response") {
    predtype = PredType::response;
  } else if (args.predtype == "class") {
    predtype = PredType::class_label;
  } else {
    throw ConfigError("unknown predtype '" + args.predtype + "' (supported: response, class)");
  }
  if (predtype == PredType::class_label && model.family != Family::binomial)
    throw ConfigError("class predictions are only defined for the binomial family");

  const CsvTable table = read_csv(args.data);
  const Vector pred = mvs_predict(model, table.values, predtype);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.out.empty()) {
    file.open(args.out);
    if (!file) throw ParseError("cannot write '" + args.out + "'");
    out = &file;
  }
  char buffer[48];
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (predtype == PredType::class_label) {
      *out << static_cast<int>(pred[i]) << "\n";
    } else {
      std::snprintf(buffer, sizeof(buffer), "%.17g", pred[i]);
      *out << buffer << "\n";
    }
  }
  return 0;
}

int run_coef(const std::string& model_path, int level) {
  const MvsModel model = load_model(model_path);
  const auto coef = mvs_coef(model);
  if (level > 0) {
    if (level < 1 || level > static_cast<int>(coef.size()))
      throw ConfigError("level out of range");
    print_coef_level(coef[static_cast<std::size_t>(level - 1)], level);
  } else {
    for (std::size_t l = 0; l < coef.size(); ++l)
      print_coef_level(coef[l], static_cast<int>(l) + 1);
  }
  return 0;
}

int run_importance(const std::string& model_path, int level) {
  const MvsModel model = load_model(model_path);
  const auto importance = mvs_importance(model);
  if (level > 0) {
    if (level < 1 || level > static_cast<int>(importance.size()))
      throw ConfigError("level out of range");
    print_importance_level(importance[static_cast<std::size_t>(level - 1)], level, model.family);
  } else {
    for (std::size_t l = 0; l < importance.size(); ++l)
      print_importance_level(importance[l], static_cast<int>(l) + 1, model.family);
  }
  return 0;
}

struct MrmArgs {
  std::string model;
  int level = 2;
  double a = 0.0, b = 1.0;
  std::optional<double> constant;
};

int run_mrm(const MrmArgs& args) {
  const MvsModel model = load_model(args.model);
  MrmQuery query;
  query.level = args.level;
  query.a = args.a;
  query.b = args.b;
  query.constant = args.constant;
  const Vector values = mrm(model, query);

  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.7g", query.constant.value_or(model.y_mean));
  std::cerr << "mrm: level " << query.level << ", a=" << args.a << ", b=" << args.b
            << ", constant=" << buffer << "\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::snprintf(buffer, sizeof(buffer), "%.7f", values[i]);
    std::cout << "V" << (i + 1) << " " << buffer << "\n";
  }
  if (model.plan.levels() == 2) {
    // with two levels the meta coefficients carry the same information
    const auto coef = mvs_coef(model);
    const CoefRecord& meta = coef.back().front();
    if (meta.applicable) {
      std::cout << "meta coefficients:\n";
      std::snprintf(buffer, sizeof(buffer), "%.7g", meta.intercept);
      std::cout << "(Intercept) " << buffer << "\n";
      for (Eigen::Index j = 0; j < meta.coefficients.size(); ++j)
        std::cout << meta.names[static_cast<std::size_t>(j)] << " "
                  << format_coefficient(meta.coefficients[j]) << "\n";
    }
  }
  return 0;
}

struct SimulateArgs {
  std::string spec_file;
  int n = 100;
  std::string view_sizes, sub_view_sizes;
  int signal_count = 0;
  int signal_offset = 0;
  double signal_magnitude = 10.0;
  bool fixed_sign = false;
  std::string family = "binomial";
  std::uint64_t seed = 1;
  std::string missing_rows;  // A:B, 1-based inclusive
  int missing_view = 0;
  std::string out_prefix = "sim";
};

int run_simulate(const SimulateArgs& args) {
  SimSpec spec;
  if (!args.spec_file.empty()) {
    spec = sim_spec_from_json_file(args.spec_file);
  } else {
    spec.n = args.n;
    if (args.view_sizes.empty()) throw ConfigError("--view-sizes is required without --spec");
    spec.view_sizes = parse_ints(args.view_sizes, "--view-sizes");
    if (!args.sub_view_sizes.empty())
      spec.sub_view_sizes = parse_ints(args.sub_view_sizes, "--sub-view-sizes");
    spec.signal_count = args.signal_count;
    spec.signal_offset = args.signal_offset;
    spec.signal_magnitude = args.signal_magnitude;
    spec.random_sign = !args.fixed_sign;
    spec.family = family_from_string(args.family);
    spec.seed = args.seed;
    if (!args.missing_rows.empty()) {
      const auto colon = args.missing_rows.find(':');
      if (colon == std::string::npos)
        throw ConfigError("--missing-rows expects A:B (1-based, inclusive)");
      MissingBlock block;
      block.row_begin = std::stoi(args.missing_rows.substr(0, colon));
      block.row_end = std::stoi(args.missing_rows.substr(colon + 1));
      block.view = args.missing_view > 0 ? args.missing_view : 1;
      spec.missing = block;
    } else if (args.missing_view > 0) {
      throw ConfigError("--missing-view requires --missing-rows");
    }
  }

  const SimResult sim = simulate(spec);
  const std::string prefix = args.out_prefix;
  write_csv(prefix + "_x.csv", sim.dataset.x);
  Matrix y(sim.dataset.y.size(), 1);
  y.col(0) = sim.dataset.y;
  write_csv(prefix + "_y.csv", y);
  Matrix views = sim.hierarchy.assignment.cast<double>();
  write_csv(prefix + "_views.csv", views);
  std::cout << "wrote " << prefix << "_x.csv, " << prefix << "_y.csv, " << prefix
            << "_views.csv (n=" << sim.dataset.n() << ", p=" << sim.dataset.p() << ")\n";
  return 0;
}

int classify_exit(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const ConvergenceError*>(&e)) return 3;
  return 2;
}

const char* error_kind(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const LabelError*>(&e)) return "LabelError";
  if (dynamic_cast<const NestingError*>(&e)) return "NestingError";
  if (dynamic_cast<const NumericError*>(&e)) return "NumericError";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const DegenerateError*>(&e)) return "DegenerateError";
  if (dynamic_cast<const StratificationError*>(&e)) return "StratificationError";
  if (dynamic_cast<const MissingDataError*>(&e)) return "MissingDataError";
  if (dynamic_cast<const DataError*>(&e)) return "DataError";
  if (dynamic_cast<const ImputeError*>(&e)) return "ImputeError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const VersionError*>(&e)) return "VersionError";
  return "Error";
}

std::string json_escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view stacking: penalized view models combined by a constrained meta-learner"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a stacked model");
  fit->add_option("--data", fit_args.data, "feature CSV")->required();
  fit->add_option("--outcome", fit_args.outcome, "outcome CSV or feature-column name")->required();
  fit->add_option("--views", fit_args.views, "view label CSV, one column per grouping level")
      ->required();
  fit->add_option("--family", fit_args.family, "gaussian | binomial | poisson");
  fit->add_option("--levels", fit_args.levels, "total level count (default: views columns + 1)");
  fit->add_option("--alphas", fit_args.alphas, "per-level elastic-net mix, e.g. 0,1");
  fit->add_option("--nnc", fit_args.nnc, "per-level nonnegativity flags, e.g. 0,1");
  fit->add_option("--type", fit_args.type, "per-level learner: glm | rf");
  fit->add_option("--relax", fit_args.relax, "per-level relaxation flags");
  fit->add_option("--adaptive", fit_args.adaptive, "per-level adaptive-weight flags");
  fit->add_option("--na-action", fit_args.na_action, "fail | pass | mean | matched-draw");
  fit->add_option("--na-arg", fit_args.na_args, "imputation option key=value (m, donors)");
  fit->add_option("--k", fit_args.k, "outer folds for the meta features");
  fit->add_option("--k-lambda", fit_args.k_lambda, "folds for internal lambda selection");
  fit->add_option("--lambda-rule", fit_args.lambda_rule, "min | 1se");
  fit->add_option("--seed", fit_args.seed, "RNG seed");
  fit->add_flag("--parallel", fit_args.parallel, "run independent sub-problems concurrently");
  fit->add_option("--out", fit_args.out, "model file to write");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "predict new observations");
  predict->add_option("--model", predict_args.model, "model file")->required();
  predict->add_option("--data", predict_args.data, "feature CSV")->required();
  predict->add_option("--predtype", predict_args.predtype, "response | class");
  predict->add_option("--out", predict_args.out, "write predictions here instead of stdout");

  std::string coef_model;
  int coef_level = 0;
  CLI::App* coef = app.add_subcommand("coef", "print model coefficients");
  coef->add_option("--model", coef_model, "model file")->required();
  coef->add_option("--level", coef_level, "restrict to one level");

  std::string imp_model;
  int imp_level = 0;
  CLI::App* importance = app.add_subcommand("importance", "print impurity importances");
  importance->add_option("--model", imp_model, "model file")->required();
  importance->add_option("--level", imp_level, "restrict to one level");

  MrmArgs mrm_args;
  double mrm_constant = std::numeric_limits<double>::quiet_NaN();
  CLI::App* mrm_cmd = app.add_subcommand("mrm", "minority report measure per view");
  mrm_cmd->add_option("--model", mrm_args.model, "model file")->required();
  mrm_cmd->add_option("--level", mrm_args.level, "hierarchy level to score (>= 2)");
  mrm_cmd->add_option("--a", mrm_args.a, "lower input value");
  mrm_cmd->add_option("--b", mrm_args.b, "upper input value");
  mrm_cmd->add_option("--constant", mrm_constant, "value held on the other views");

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "write a synthetic data set");
  sim->add_option("--spec", sim_args.spec_file, "JSON spec file (overrides inline flags)");
  sim->add_option("--n", sim_args.n, "observations");
  sim->add_option("--view-sizes", sim_args.view_sizes, "feature counts per view, e.g. 45,20,20");
  sim->add_option("--sub-view-sizes", sim_args.sub_view_sizes, "nested sub-view feature counts");
  sim->add_option("--signal-count", sim_args.signal_count, "number of nonzero coefficients");
  sim->add_option("--signal-offset", sim_args.signal_offset, "0-based start of the signal block");
  sim->add_option("--signal-magnitude", sim_args.signal_magnitude, "absolute coefficient size");
  sim->add_flag("--fixed-sign", sim_args.fixed_sign, "disable random coefficient signs");
  sim->add_option("--family", sim_args.family, "gaussian | binomial | poisson");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--missing-rows", sim_args.missing_rows, "rows to blank, A:B (1-based)");
  sim->add_option("--missing-view", sim_args.missing_view, "view to blank");
  sim->add_option("--out-prefix", sim_args.out_prefix, "output file prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*fit) return run_fit(fit_args);
    if (*predict) return run_predict(predict_args);
    if (*coef) return run_coef(coef_model, coef_level);
    if (*importance) return run_importance(imp_model, imp_level);
    if (*mrm_cmd) {
      if (!std::isnan(mrm_constant)) mrm_args.constant = mrm_constant;
      return run_mrm(mrm_args);
    }
    if (*sim) return run_simulate(sim_args);
  } catch (const Error& e) {
    const int code = classify_exit(e);
    std::cerr << "{\"error\":\"" << error_kind(e) << "\",\"exit\":" << code << ",\"message\":\""
              << json_escape(e.what()) << "\"}\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "{\"error\":\"Error\",\"exit\":3,\"message\":\"" << json_escape(e.what())
              << "\"}\n";
    return 3;
  }
  return 0;
}
