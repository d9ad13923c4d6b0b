#include "slim/model.hpp"

namespace slim {

Eigen::Index ScoringSystem::model_size() const {
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < coefficients.size(); ++j)
    if (coefficients(j) != 0.0 && !(intercept_index && *intercept_index == j)) ++count;
  return count;
}

}  // namespace slim
