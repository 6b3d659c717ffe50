#include "mvstack/cv.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mvstack/rng.hpp"

namespace mvstack {

std::vector<int> FoldAssignment::members(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> FoldAssignment::complement(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(static_cast<int>(i));
  return out;
}

FoldAssignment make_folds(const Vector& y, int k, Family family, std::uint64_t seed) {
  const auto n = static_cast<int>(y.size());
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (k > n) {
    std::ostringstream msg;
    msg << "fold count " << k << " exceeds the " << n << " observations";
    throw ConfigError(msg.str());
  }

  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.fold_of.assign(static_cast<std::size_t>(n), -1);
  RngEngine rng(seed);

  bool stratify = false;
  if (family == Family::binomial) {
    const auto ones = static_cast<int>((y.array() == 1.0).count());
    const int zeros = n - ones;
    if (ones >= k && zeros >= k) {
      stratify = true;
    } else if (ones > 0 && zeros > 0) {
      folds.warnings.push_back(
          "stratification disabled: a class has fewer members than folds");
    }
  }
  folds.stratified = stratify;

  if (stratify) {
    // Deal each class round-robin, carrying the fold cursor across classes so
    // total fold sizes still differ by at most one.
    int cursor = 0;
    for (double cls : {1.0, 0.0}) {
      std::vector<int> idx;
      for (int i = 0; i < n; ++i)
        if (y[i] == cls) idx.push_back(i);
      shuffle_in_place(idx, rng);
      for (int i : idx) {
        folds.fold_of[static_cast<std::size_t>(i)] = cursor % k;
        ++cursor;
      }
    }
  } else {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_in_place(idx, rng);
    for (int i = 0; i < n; ++i) folds.fold_of[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i % k;
  }
  return folds;
}

namespace {

template <typename ErrorType>
[[noreturn]] void rethrow_with_fold(const ErrorType& e, int fold) {
  std::ostringstream msg;
  msg << "fold " << (fold + 1) << ": " << e.what();
  throw ErrorType(msg.str());
}

[[noreturn]] void annotate_fold_error(int fold) {
  try {
    throw;
  } catch (const StratificationError& e) {
    rethrow_with_fold(e, fold);
  } catch (const ConvergenceError& e) {
    rethrow_with_fold(e, fold);
  } catch (const DegenerateError& e) {
    rethrow_with_fold(e, fold);
  } catch (const NumericError& e) {
    rethrow_with_fold(e, fold);
  } catch (const DataError& e) {
    rethrow_with_fold(e, fold);
  } catch (const ConfigError& e) {
    rethrow_with_fold(e, fold);
  }
}

}  // namespace

Vector oos_predictions_partial(const Dataset& data, const std::vector<int>& columns,
                               const LearnerConfig& config, const FoldAssignment& folds,
                               const std::vector<int>& complete_rows, std::uint64_t seed) {
  if (static_cast<int>(complete_rows.size()) < folds.k) {
    std::ostringstream msg;
    msg << "only " << complete_rows.size() << " rows observed on the view; at least " << folds.k
        << " are required for " << folds.k << "-fold predictions";
    throw DataError(msg.str());
  }

  std::vector<char> complete(static_cast<std::size_t>(data.n()), 0);
  for (int r : complete_rows) complete[static_cast<std::size_t>(r)] = 1;

  Vector z = Vector::Constant(data.n(), missing_value());
  const Matrix x_view = select_cols(data.x, columns);

  for (int f = 0; f < folds.k; ++f) {
    std::vector<int> train, test;
    for (int r : complete_rows) {
      (folds.fold_of[static_cast<std::size_t>(r)] == f ? test : train).push_back(r);
    }
    if (test.empty()) continue;
    if (train.size() < 2) {
      std::ostringstream msg;
      msg << "fold " << (f + 1) << ": fewer than 2 observed training rows on the view";
      throw DataError(msg.str());
    }
    try {
      const TrainedLearner model =
          train_learner(select_rows(x_view, train), select(data.y, train), data.family, config,
                        seed_chain(seed, {seed_tag::oos_fold, static_cast<std::uint64_t>(f)}));
      const Vector pred = learner_predict(model, select_rows(x_view, test));
      for (std::size_t i = 0; i < test.size(); ++i) z[test[i]] = pred[static_cast<Eigen::Index>(i)];
    } catch (const Error&) {
      annotate_fold_error(f);
    }
  }
  return z;
}

Vector oos_predictions(const Dataset& data, const std::vector<int>& columns,
                       const LearnerConfig& config, const FoldAssignment& folds,
                       std::uint64_t seed) {
  std::vector<int> all_rows(static_cast<std::size_t>(data.n()));
  std::iota(all_rows.begin(), all_rows.end(), 0);
  return oos_predictions_partial(data, columns, config, folds, all_rows, seed);
}

}  // namespace mvstack
