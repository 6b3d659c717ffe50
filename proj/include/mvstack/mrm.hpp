#pragma once

#include <optional>

#include "mvstack/stacking.hpp"

namespace mvstack {

// Minority report measure: how much the final stacked prediction changes as
// the prediction feeding level `level` from one view moves from a to b while
// every other same-level input is held at `constant`. Levels are counted as
// in the hierarchy (level 1 = features), so the lowest admissible level is 2
// and level equal to the model depth scores the top-level views.

struct MrmQuery {
  int level = 2;
  double a = 0.0;
  double b = 1.0;
  std::optional<double> constant;  // default: mean of the training outcome
};

Vector mrm(const MvsModel& model, const MrmQuery& query);

}  // namespace mvstack
