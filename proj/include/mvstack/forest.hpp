#pragma once

#include <cstdint>
#include <vector>

#include "mvstack/types.hpp"

namespace mvstack {

// Minimal CART random forest: classification (binomial, leaves store class-1
// proportions so predictions are probabilities) or regression (gaussian,
// poisson). Exact threshold search over sorted unique values with midpoint
// thresholds; impurity ties broken by lowest feature index, then lowest
// threshold, so growth is deterministic given the seed.

struct ForestSpec {
  int n_trees = 500;
  int mtry = 0;      // 0 = floor(sqrt(p)) classification, floor(p/3) regression
  int min_node = 0;  // 0 = 1 classification, 5 regression
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // left child: x <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;      // leaf: class-1 proportion or mean response
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestFit {
  ForestSpec spec;  // with defaults resolved
  Family family = Family::binomial;
  Eigen::Index n_features = 0;
  std::vector<Tree> trees;
  Vector importance;        // mean decrease in impurity per feature, >= 0
  Vector oob_predictions;   // NaN where a row was never out of bag
};

ForestFit forest_fit(const Dataset& data, const ForestSpec& spec, bool parallel = false);

Vector forest_predict(const ForestFit& fit, const Matrix& x_new);

double tree_predict_row(const Tree& tree, const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace mvstack
