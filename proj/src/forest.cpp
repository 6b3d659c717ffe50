#include "mvstack/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mvstack/parallel.hpp"
#include "mvstack/rng.hpp"

namespace mvstack {

namespace {

struct GrownTree {
  Tree tree;
  Vector importance;
  std::vector<char> in_bag;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = 0.0;
};

// Node impurity times node size: Gini for classification, SSE for regression.
double weighted_impurity(bool classify, double sum, double sum_sq, double count) {
  if (count <= 0.0) return 0.0;
  if (classify) {
    const double p1 = sum / count;
    return count * 2.0 * p1 * (1.0 - p1);
  }
  return sum_sq - sum * sum / count;
}

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, const Vector& y, bool classify, int mtry, int min_node,
             RngEngine rng)
      : x_(x), y_(y), classify_(classify), mtry_(mtry), min_node_(min_node), rng_(rng) {}

  GrownTree grow() {
    const auto n = static_cast<std::size_t>(x_.rows());
    GrownTree out;
    out.importance = Vector::Zero(x_.cols());
    out.in_bag.assign(n, 0);

    std::vector<int> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto pick = static_cast<int>(draw_below(rng_, n));
      rows[i] = pick;
      out.in_bag[static_cast<std::size_t>(pick)] = 1;
    }
    importance_ = &out.importance;
    nodes_ = &out.tree.nodes;
    build_node(std::move(rows));
    return out;
  }

 private:
  int build_node(std::vector<int> rows) {
    const auto node_id = static_cast<int>(nodes_->size());
    nodes_->push_back(TreeNode{});

    double sum = 0.0, sum_sq = 0.0;
    for (int r : rows) {
      sum += y_[r];
      sum_sq += y_[r] * y_[r];
    }
    const double count = static_cast<double>(rows.size());
    (*nodes_)[node_id].value = sum / count;

    const double impurity = weighted_impurity(classify_, sum, sum_sq, count);
    const bool splittable = rows.size() >= 2 * static_cast<std::size_t>(min_node_) &&
                            rows.size() >= 2 && impurity > 0.0;
    if (!splittable) return node_id;

    const SplitChoice split = best_split(rows, sum, sum_sq);
    if (split.feature < 0) return node_id;

    std::vector<int> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (int r : rows) {
      (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    (*importance_)[split.feature] += split.decrease;
    (*nodes_)[node_id].feature = split.feature;
    (*nodes_)[node_id].threshold = split.threshold;
    const int left_id = build_node(std::move(left));
    (*nodes_)[node_id].left = left_id;
    const int right_id = build_node(std::move(right));
    (*nodes_)[node_id].right = right_id;
    return node_id;
  }

  SplitChoice best_split(const std::vector<int>& rows, double sum, double sum_sq) {
    const auto p = static_cast<std::size_t>(x_.cols());
    // partial Fisher-Yates over the feature indices
    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    const auto m = std::min<std::size_t>(static_cast<std::size_t>(mtry_), p);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(draw_below(rng_, p - i));
      std::swap(features[i], features[j]);
    }
    features.resize(m);
    std::sort(features.begin(), features.end());

    const double parent = weighted_impurity(classify_, sum, sum_sq, static_cast<double>(rows.size()));
    SplitChoice best;

    std::vector<std::pair<double, double>> points;  // (feature value, outcome)
    points.reserve(rows.size());
    for (int f : features) {
      points.clear();
      for (int r : rows) points.emplace_back(x_(r, f), y_[r]);
      std::sort(points.begin(), points.end());

      double left_sum = 0.0, left_sq = 0.0;
      const double total = static_cast<double>(points.size());
      for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        left_sum += points[i].second;
        left_sq += points[i].second * points[i].second;
        if (points[i].first == points[i + 1].first) continue;
        const double n_left = static_cast<double>(i + 1);
        const double n_right = total - n_left;
        if (n_left < min_node_ || n_right < min_node_) continue;
        const double decrease =
            parent - weighted_impurity(classify_, left_sum, left_sq, n_left) -
            weighted_impurity(classify_, sum - left_sum, sum_sq - left_sq, n_right);
        if (decrease > best.decrease) {
          best.decrease = decrease;
          best.feature = f;
          best.threshold = points[i].first + 0.5 * (points[i + 1].first - points[i].first);
        }
      }
    }
    if (best.decrease <= 1e-12) best.feature = -1;
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  bool classify_;
  int mtry_;
  int min_node_;
  RngEngine rng_;
  Vector* importance_ = nullptr;
  std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace

double tree_predict_row(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = tree.nodes[static_cast<std::size_t>(node)];
    node = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
  }
  return tree.nodes[static_cast<std::size_t>(node)].value;
}

ForestFit forest_fit(const Dataset& data, const ForestSpec& spec, bool parallel) {
  if (data.n() < 2) throw DataError("need at least 2 observations");
  if (!data.x.allFinite()) throw NumericError("design matrix contains non-finite values");
  validate_dataset(data);
  const bool classify = data.family == Family::binomial;
  if (classify && ((data.y.array() == data.y[0]).all()))
    throw DegenerateError("binomial outcome holds a single class");

  ForestFit fit;
  fit.spec = spec;
  fit.family = data.family;
  fit.n_features = data.p();
  if (fit.spec.n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (fit.spec.mtry == 0) {
    fit.spec.mtry = classify
                        ? std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(data.p())))))
                        : std::max(1, static_cast<int>(data.p() / 3));
  }
  if (fit.spec.mtry < 1 || fit.spec.mtry > data.p())
    throw ConfigError("mtry must lie in [1, p]");
  if (fit.spec.min_node == 0) fit.spec.min_node = classify ? 1 : 5;
  if (fit.spec.min_node < 1) throw ConfigError("min_node must be at least 1");

  const auto n_trees = static_cast<std::size_t>(fit.spec.n_trees);
  std::vector<GrownTree> grown(n_trees);
  parallel_for(n_trees, parallel, [&](std::size_t t) {
    RngEngine rng(seed_chain(fit.spec.seed, {seed_tag::tree, static_cast<std::uint64_t>(t)}));
    TreeGrower grower(data.x, data.y, classify, fit.spec.mtry, fit.spec.min_node, std::move(rng));
    grown[t] = grower.grow();
  });

  fit.trees.reserve(n_trees);
  fit.importance = Vector::Zero(data.p());
  Vector oob_sum = Vector::Zero(data.n());
  Eigen::VectorXi oob_count = Eigen::VectorXi::Zero(data.n());
  for (std::size_t t = 0; t < n_trees; ++t) {
    fit.importance += grown[t].importance;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (!grown[t].in_bag[static_cast<std::size_t>(i)]) {
        oob_sum[i] += tree_predict_row(grown[t].tree, data.x.row(i));
        ++oob_count[i];
      }
    }
    fit.trees.push_back(std::move(grown[t].tree));
  }
  fit.importance /= static_cast<double>(n_trees);
  fit.oob_predictions.resize(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    fit.oob_predictions[i] = oob_count[i] > 0 ? oob_sum[i] / oob_count[i] : missing_value();
  }
  return fit;
}

Vector forest_predict(const ForestFit& fit, const Matrix& x_new) {
  if (x_new.cols() != fit.n_features) {
    std::ostringstream msg;
    msg << "prediction data has " << x_new.cols() << " columns; forest expects "
        << fit.n_features;
    throw ShapeError(msg.str());
  }
  Vector out = Vector::Zero(x_new.rows());
  for (const Tree& tree : fit.trees) {
    for (Eigen::Index i = 0; i < x_new.rows(); ++i) out[i] += tree_predict_row(tree, x_new.row(i));
  }
  out /= static_cast<double>(fit.trees.size());
  return out;
}

}  // namespace mvstack
