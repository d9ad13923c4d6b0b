#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace slim {

using Index = Eigen::Index;
using MatrixXi64 = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr const char* kInterceptName = "(Intercept)";

/// Immutable N x P classification dataset with labels in {-1, +1}.
///
/// Besides the double matrix, the dataset keeps an exact integer image of the
/// features: every entry times 10^feature_scale() is an integer. The solver
/// works on that image so the sign of a score is never subject to rounding.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, Eigen::VectorXi labels, std::vector<std::string> feature_names,
          std::optional<Index> intercept_index = std::nullopt, std::string label_name = "label");

  Index n() const { return features_.rows(); }
  Index p() const { return features_.cols(); }

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXi& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const std::optional<Index>& intercept_index() const { return intercept_; }
  const std::string& label_name() const { return label_name_; }

  /// features() * 10^feature_scale(), exact.
  const MatrixXi64& scaled_features() const { return scaled_; }
  int feature_scale() const { return scale_; }

  Index positives() const;
  Index negatives() const { return n() - positives(); }

  /// Column index by name, or nullopt.
  std::optional<Index> find_feature(const std::string& name) const;

  /// Rows in the given order; metadata carried over.
  Dataset subset(std::span<const Index> rows) const;

  /// 64-bit FNV-1a over the canonical CSV text; stable across runs.
  std::uint64_t fingerprint() const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXi labels_;
  std::vector<std::string> names_;
  std::optional<Index> intercept_;
  std::string label_name_;
  MatrixXi64 scaled_;
  int scale_ = 0;
};

enum class MissingPolicy { kDrop, kImputeMean };

struct LoadOptions {
  std::string label_column = "label";
  bool add_intercept = true;
  MissingPolicy missing_policy = MissingPolicy::kDrop;
  /// Columns expanded to one 0/1 column per level, named "column=level".
  std::vector<std::string> categorical_columns;
};

Dataset load_csv(const std::string& path, const LoadOptions& options = {});
Dataset read_csv(std::istream& in, const LoadOptions& options = {});

/// Writes every feature column (intercept included) plus the label column as 0/1.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::string& path);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = false;

  std::vector<Index> members(int fold) const;
  std::vector<Index> complement(int fold) const;
};

FoldAssignment split_folds(const Dataset& d, int k, std::uint64_t seed, bool stratified = true);

/// FNV-1a, used for provenance hashes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace slim
