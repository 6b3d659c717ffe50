#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvstack/types.hpp"

namespace mvstack {

// Missing-view handling. Missingness is only supported in the feature matrix
// at training time; it is screened per view, carried into the matrix of
// cross-validated predictions, and resolved there (one cell per missing
// view-observation pair instead of one per missing feature cell).

enum class NaKind { fail, pass, mean, matched_draw };

NaKind na_kind_from_string(const std::string& name);
std::string na_kind_name(NaKind kind);

struct NaAction {
  NaKind kind = NaKind::fail;
  int m = 5;       // imputation rounds (matched_draw)
  int donors = 5;  // donor pool size (matched_draw)
};

struct ImputationReport {
  std::vector<std::string> method;  // per Z column; "" when the column was untouched
  int m = 0;
  int donors = 0;
  std::vector<std::string> notes;

  bool any() const;
};

struct MissingScreen {
  std::vector<std::vector<int>> complete_rows;  // per lowest-level view
  std::vector<int> missing_counts;              // rows missing the view
  bool any_missing = false;
};

// Per-view complete-row sets. A row missing any cell of a view counts as
// missing that view. kind=fail throws on any missing cell.
MissingScreen screen_missing(const Dataset& data, const ViewHierarchy& hierarchy,
                             const NaAction& na);

// Resolves missing markers in Z. pass returns Z unchanged; mean substitutes
// column means of the observed entries; matched_draw runs m rounds of
// predictive-mean-matched donor draws (a linear model of each incomplete
// column on the other columns and y, drawing the observed value of one of
// the `donors` nearest donors) and averages the rounds. Observed cells are
// returned bit-identical.
std::pair<Matrix, ImputationReport> impute_meta(const Matrix& z, const Vector& y,
                                                const NaAction& na, std::uint64_t seed);

// Rows of x fully observed on every listed column.
std::vector<int> complete_rows_on(const Matrix& x, const std::vector<int>& columns);

}  // namespace mvstack
