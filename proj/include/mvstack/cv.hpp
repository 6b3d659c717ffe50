#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvstack/learner.hpp"
#include "mvstack/types.hpp"

namespace mvstack {

struct FoldAssignment {
  std::vector<int> fold_of;  // fold id per observation, 0..k-1
  int k = 0;
  bool stratified = false;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  std::vector<int> members(int fold) const;
  std::vector<int> complement(int fold) const;
};

// Deterministic fold assignment; stratified by class for binomial outcomes
// unless a class has fewer than k members, in which case stratification
// degrades to plain shuffling with a recorded warning. Fold sizes differ by
// at most one.
FoldAssignment make_folds(const Vector& y, int k, Family family, std::uint64_t seed);

// Out-of-sample predictions z: for each fold the learner is trained on the
// complement (including its internal lambda tuning, seeded from a per-fold
// substream) and predicts the held-out rows on the response scale, so z_i
// always comes from a model that never saw row i.
Vector oos_predictions(const Dataset& data, const std::vector<int>& columns,
                       const LearnerConfig& config, const FoldAssignment& folds,
                       std::uint64_t seed);

// Restriction of oos_predictions to rows fully observed on the view: the
// learner is trained and cross-validated on `complete_rows` only and the
// returned vector carries missing markers on all other rows.
Vector oos_predictions_partial(const Dataset& data, const std::vector<int>& columns,
                               const LearnerConfig& config, const FoldAssignment& folds,
                               const std::vector<int>& complete_rows, std::uint64_t seed);

}  // namespace mvstack
