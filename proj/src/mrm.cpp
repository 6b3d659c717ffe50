#include "mvstack/mrm.hpp"

#include <sstream>

namespace mvstack {

Vector mrm(const MvsModel& model, const MrmQuery& query) {
  const int depth = model.plan.levels();
  if (query.level < 2 || query.level > depth) {
    std::ostringstream msg;
    msg << "MRM level must lie in [2, " << depth << "] (level 1 is the feature level)";
    throw ConfigError(msg.str());
  }
  if (query.a == query.b) throw ConfigError("MRM endpoints a and b must differ");

  // Views at hierarchy level `level` produce the columns of the level-(l-1)
  // prediction matrix; perturb one column at a time and push the row through
  // the remaining levels.
  const auto source = static_cast<std::size_t>(query.level - 2);
  const auto inputs = static_cast<Eigen::Index>(model.levels[source].models.size());
  const double constant = query.constant.value_or(model.y_mean);

  Vector out(inputs);
  for (Eigen::Index i = 0; i < inputs; ++i) {
    Vector at_b = Vector::Constant(inputs, constant);
    Vector at_a = at_b;
    at_b[i] = query.b;
    at_a[i] = query.a;
    out[i] = compose_from_level(model, query.level - 1, at_b) -
             compose_from_level(model, query.level - 1, at_a);
  }
  return out;
}

}  // namespace mvstack
