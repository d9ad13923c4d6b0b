#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace slim {

struct Provenance {
  std::string config_hash;
  std::string dataset_hash;
  std::string solve_status;
};

/// Trained linear scoring system: predict +1 iff x . coefficients > 0.
struct ScoringSystem {
  Eigen::VectorXd coefficients;
  std::vector<std::string> feature_names;
  std::optional<Eigen::Index> intercept_index;
  Provenance provenance;

  Eigen::Index size() const { return coefficients.size(); }
  /// Nonzero coefficients, intercept excluded.
  Eigen::Index model_size() const;
  double intercept() const { return intercept_index ? coefficients(*intercept_index) : 0.0; }
};

}  // namespace slim
