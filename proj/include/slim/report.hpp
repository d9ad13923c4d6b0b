#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slim/dataset.hpp"
#include "slim/harness.hpp"
#include "slim/model.hpp"

namespace slim {

/// Display names for the two classes.
struct LabelMap {
  std::string positive = "+1";
  std::string negative = "-1";
};

enum class TextFormat { kPlain, kMarkdown };

struct ScoreSheetOptions {
  TextFormat format = TextFormat::kPlain;
  LabelMap labels;
  /// Observed value range per feature name, shown next to the feature.
  std::map<std::string, std::pair<double, double>> ranges;
};

/// Min and max of every column.
std::map<std::string, std::pair<double, double>> feature_ranges(const Dataset& d);

/// One "+c × Feature  (lo to hi)" row per nonzero non-intercept coefficient,
/// the intercept as a standalone "+c  (intercept)" row, then the total and the
/// prediction rule.
std::string render_score_sheet(const ScoringSystem& m, const ScoreSheetOptions& options = {});

/// Reads the coefficient rows of a plain-text sheet back into a vector ordered
/// like `feature_names`. Features absent from the sheet are 0.
Eigen::VectorXd parse_score_sheet(const std::string& text, const std::vector<std::string>& feature_names,
                                  std::optional<Index> intercept_index);

/// Sequential yes/no questions on binary features; a leaf carries the prediction.
struct DecisionNode {
  std::optional<Index> feature;  ///< unset for a leaf
  std::string feature_name;
  int prediction = 0;  ///< leaf only, +1 or -1
  std::unique_ptr<DecisionNode> yes;
  std::unique_ptr<DecisionNode> no;

  bool is_leaf() const { return !feature.has_value(); }
  /// Prediction for a full 0/1 assignment of the dataset's columns.
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::size_t leaves() const;
};

/// Splits on active features in order of decreasing |coefficient| (index breaks
/// ties) until every remaining combination gets the same prediction. Active
/// features must be 0/1 in d (NotApplicableError); more than 16 is a SizeError.
DecisionNode induce_decision_table(const ScoringSystem& m, const Dataset& d);
std::string render_decision_table(const DecisionNode& root, const LabelMap& labels = {},
                                  TextFormat format = TextFormat::kPlain);
/// "A? yes → x; no → B? yes → y; no → z"
std::string render_decision_table_inline(const DecisionNode& root, const LabelMap& labels = {});

/// Test error, train error, model size and model range per C0 column;
/// percentages to one decimal.
std::string render_results_table(const CvReport& r, TextFormat format = TextFormat::kPlain);

}  // namespace slim
