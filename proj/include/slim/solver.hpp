#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slim/coefset.hpp"
#include "slim/dataset.hpp"
#include "slim/model.hpp"
#include "slim/objective.hpp"

namespace slim {

struct TracePoint {
  double elapsed_s = 0.0;
  double incumbent_objective = 0.0;
  Eigen::Index incumbent_nnz = 0;
  double lower_bound = 0.0;
};

using TraceSink = std::function<void(const TracePoint&)>;

/// Writes "elapsed_s,incumbent,lower_bound,nnz" lines.
TraceSink csv_trace_sink(std::ostream& out);

enum class SolveStatus { kOptimal, kFeasibleBudgetExhausted };
std::string to_string(SolveStatus s);

struct SolveResult {
  ScoringSystem best;
  ObjectiveValue objective;
  double lower_bound = 0.0;
  /// (objective - lower_bound) / max(objective, 1e-12)
  double gap = 0.0;
  SolveStatus status = SolveStatus::kFeasibleBudgetExhausted;
  std::vector<TracePoint> trace;
  std::uint64_t nodes_explored = 0;
  double elapsed_s = 0.0;
  double c1 = 0.0;  ///< C1 actually used
};

namespace detail {
struct Lattice;
}

/// Partial coefficient assignment with exact per-example margin intervals.
///
/// Assigned coefficients contribute their exact margin; each unassigned one
/// contributes its best case over the domain. An example whose best-case
/// margin is <= 0 is misclassified by every completion.
class SearchState {
 public:
  SearchState(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg);

  Eigen::Index p() const;
  void assign(Eigen::Index j, const Decimal& value);
  void assign_index(Eigen::Index j, std::size_t value_index);
  void unassign(Eigen::Index j);
  bool is_assigned(Eigen::Index j) const;
  bool complete() const;

  /// Fixed penalties plus weighted loss of examples decided as misclassified.
  Ticks lower_bound() const;
  /// lower_bound() after assigning each value of the unassigned coefficient j.
  std::vector<Ticks> child_bounds(Eigen::Index j) const;

 private:
  friend class BranchAndBound;
  std::shared_ptr<const detail::Lattice> lattice_;
  std::vector<int> assigned_;  // value index, -1 when free
  std::vector<__int128> margin_;
  std::vector<__int128> slack_;  // sum of best-case contributions of free coefficients
  Ticks fixed_ = 0;
  Eigen::Index free_count_ = 0;
};

double lower_bound_of(const SearchState& state);

/// Exact minimizer of the weighted 0-1 loss plus L0/L1/tier penalties over the
/// coefficient lattice. Ties are broken by smaller L1 norm, then by the
/// lexicographically smallest coefficient vector.
SolveResult solve(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, const TraceSink& sink = {});

/// Rounded class-mean-difference heuristic; always a member of the lattice.
Eigen::VectorXd warm_start(const Dataset& d, const CoefficientSet& s);

}  // namespace slim
