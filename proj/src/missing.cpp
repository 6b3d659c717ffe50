#include "mvstack/missing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mvstack/rng.hpp"

namespace mvstack {

NaKind na_kind_from_string(const std::string& name) {
  if (name == "fail") return NaKind::fail;
  if (name == "pass") return NaKind::pass;
  if (name == "mean") return NaKind::mean;
  if (name == "matched-draw" || name == "matched_draw") return NaKind::matched_draw;
  throw ConfigError("unknown na-action '" + name +
                    "' (supported: fail, pass, mean, matched-draw)");
}

std::string na_kind_name(NaKind kind) {
  switch (kind) {
    case NaKind::fail: return "fail";
    case NaKind::pass: return "pass";
    case NaKind::mean: return "mean";
    case NaKind::matched_draw: return "matched-draw";
  }
  return "?";
}

bool ImputationReport::any() const {
  return std::any_of(method.begin(), method.end(),
                     [](const std::string& m) { return !m.empty(); });
}

std::vector<int> complete_rows_on(const Matrix& x, const std::vector<int>& columns) {
  std::vector<int> rows;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    bool complete = true;
    for (int c : columns) {
      if (is_missing(x(i, c))) {
        complete = false;
        break;
      }
    }
    if (complete) rows.push_back(static_cast<int>(i));
  }
  return rows;
}

MissingScreen screen_missing(const Dataset& data, const ViewHierarchy& hierarchy,
                             const NaAction& na) {
  const bool any = !data.x.allFinite();  // validated data: non-finite means NaN
  if (na.kind == NaKind::fail && any) {
    throw MissingDataError(
        "Missing values detected in x. Either remove or impute missing values, or choose a "
        "different na-action");
  }
  MissingScreen screen;
  screen.any_missing = any;
  const int v_count = hierarchy.view_count(0);
  for (int v = 1; v <= v_count; ++v) {
    auto rows = complete_rows_on(data.x, hierarchy.features_of(0, v));
    screen.missing_counts.push_back(static_cast<int>(data.n()) - static_cast<int>(rows.size()));
    screen.complete_rows.push_back(std::move(rows));
  }
  return screen;
}

namespace {

// Least-squares fit of `target` on [1, predictors]; rank deficiencies are
// absorbed by the pivoted QR.
Vector linear_predictor(const Matrix& predictors, const Vector& target,
                        const Matrix& eval_points) {
  Matrix design(predictors.rows(), predictors.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(predictors.cols()) = predictors;
  const Vector coef = design.colPivHouseholderQr().solve(target);
  Matrix eval_design(eval_points.rows(), eval_points.cols() + 1);
  eval_design.col(0).setOnes();
  eval_design.rightCols(eval_points.cols()) = eval_points;
  return eval_design * coef;
}

}  // namespace

std::pair<Matrix, ImputationReport> impute_meta(const Matrix& z, const Vector& y,
                                                const NaAction& na, std::uint64_t seed) {
  if (na.kind == NaKind::fail) throw ConfigError("impute_meta not applicable to na-action fail");
  if (na.m < 1) throw ConfigError("imputation count m must be at least 1");
  if (na.donors < 1) throw ConfigError("donor count must be at least 1");

  const Eigen::Index n = z.rows();
  const Eigen::Index v = z.cols();

  ImputationReport report;
  report.method.assign(static_cast<std::size_t>(v), "");
  report.m = na.m;
  report.donors = na.donors;

  std::vector<std::vector<int>> missing_rows(static_cast<std::size_t>(v));
  std::vector<std::vector<int>> observed_rows(static_cast<std::size_t>(v));
  bool any = false;
  for (Eigen::Index c = 0; c < v; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      (is_missing(z(i, c)) ? missing_rows : observed_rows)[static_cast<std::size_t>(c)].push_back(
          static_cast<int>(i));
    }
    if (!missing_rows[static_cast<std::size_t>(c)].empty()) {
      any = true;
      if (observed_rows[static_cast<std::size_t>(c)].empty()) {
        std::ostringstream msg;
        msg << "column " << (c + 1) << " has no observed values to impute from";
        throw ImputeError(msg.str());
      }
    }
  }

  if (na.kind == NaKind::pass) {
    for (Eigen::Index c = 0; c < v; ++c)
      if (!missing_rows[static_cast<std::size_t>(c)].empty())
        report.method[static_cast<std::size_t>(c)] = "pass";
    return {z, report};
  }
  if (!any) return {z, report};

  Matrix out = z;

  if (na.kind == NaKind::mean) {
    for (Eigen::Index c = 0; c < v; ++c) {
      const auto& miss = missing_rows[static_cast<std::size_t>(c)];
      if (miss.empty()) continue;
      const auto& obs = observed_rows[static_cast<std::size_t>(c)];
      double mean = 0.0;
      for (int r : obs) mean += z(r, c);
      mean /= static_cast<double>(obs.size());
      for (int r : miss) out(r, c) = mean;
      report.method[static_cast<std::size_t>(c)] = "mean";
    }
    return {out, report};
  }

  // matched_draw: m independent rounds of predictive-mean-matched donor
  // draws, averaged cell-wise. Each round starts from a mean-filled working
  // copy and revisits the incomplete columns in ascending order, so later
  // columns see observed-or-previously-imputed values.
  report.notes.push_back("matched-draw conditioning: ascending column order, mean-initialized");
  Matrix working_init = out;
  for (Eigen::Index c = 0; c < v; ++c) {
    const auto& miss = missing_rows[static_cast<std::size_t>(c)];
    if (miss.empty()) continue;
    const auto& obs = observed_rows[static_cast<std::size_t>(c)];
    double mean = 0.0;
    for (int r : obs) mean += z(r, c);
    mean /= static_cast<double>(obs.size());
    for (int r : miss) working_init(r, c) = mean;
    report.method[static_cast<std::size_t>(c)] = "matched-draw";
  }

  Matrix accum = Matrix::Zero(n, v);
  for (int round = 0; round < na.m; ++round) {
    Matrix working = working_init;
    for (Eigen::Index c = 0; c < v; ++c) {
      const auto& miss = missing_rows[static_cast<std::size_t>(c)];
      if (miss.empty()) continue;
      const auto& obs = observed_rows[static_cast<std::size_t>(c)];

      // predictors: every other column plus the outcome
      Matrix predictors(n, v);
      Eigen::Index k = 0;
      for (Eigen::Index c2 = 0; c2 < v; ++c2) {
        if (c2 == c) continue;
        predictors.col(k++) = working.col(c2);
      }
      predictors.col(k) = y;

      const Matrix obs_pred_rows = select_rows(predictors, obs);
      Vector obs_target(static_cast<Eigen::Index>(obs.size()));
      for (std::size_t i = 0; i < obs.size(); ++i) obs_target[static_cast<Eigen::Index>(i)] = z(obs[i], c);
      const Matrix miss_pred_rows = select_rows(predictors, miss);

      Matrix both(obs_pred_rows.rows() + miss_pred_rows.rows(), predictors.cols());
      both.topRows(obs_pred_rows.rows()) = obs_pred_rows;
      both.bottomRows(miss_pred_rows.rows()) = miss_pred_rows;
      const Vector fitted = linear_predictor(obs_pred_rows, obs_target, both);

      RngEngine rng(seed_chain(seed, {seed_tag::impute, static_cast<std::uint64_t>(round),
                                      static_cast<std::uint64_t>(c)}));
      const int pool = std::min<int>(na.donors, static_cast<int>(obs.size()));
      for (std::size_t mi = 0; mi < miss.size(); ++mi) {
        const double target_pred = fitted[obs_pred_rows.rows() + static_cast<Eigen::Index>(mi)];
        // donors: observed rows nearest in predicted value; ties by row index
        std::vector<std::pair<double, int>> dist;
        dist.reserve(obs.size());
        for (std::size_t oi = 0; oi < obs.size(); ++oi) {
          dist.emplace_back(std::abs(fitted[static_cast<Eigen::Index>(oi)] - target_pred), obs[oi]);
        }
        std::partial_sort(dist.begin(), dist.begin() + pool, dist.end());
        const int donor = dist[draw_below(rng, static_cast<std::uint64_t>(pool))].second;
        working(miss[mi], c) = z(donor, c);
      }
    }
    for (Eigen::Index c = 0; c < v; ++c)
      for (int r : missing_rows[static_cast<std::size_t>(c)]) accum(r, c) += working(r, c);
  }

  for (Eigen::Index c = 0; c < v; ++c)
    for (int r : missing_rows[static_cast<std::size_t>(c)])
      out(r, c) = accum(r, c) / static_cast<double>(na.m);
  return {out, report};
}

}  // namespace mvstack
