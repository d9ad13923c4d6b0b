#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "slim/coefset.hpp"
#include "slim/dataset.hpp"
#include "slim/objective.hpp"
#include "slim/solver.hpp"

namespace slim {

/// One (C0, fold) training run.
struct CvRecord {
  double c0 = 0.0;
  int fold = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  Index model_size = 0;  ///< nonzero coefficients, intercept excluded
  std::string status;
  double gap = 0.0;
  double runtime_s = 0.0;
  Eigen::VectorXd coefficients;
};

struct CvAggregate {
  double c0 = 0.0;
  double test_error_mean = 0.0;
  double test_error_sd = 0.0;
  double train_error_mean = 0.0;
  double train_error_sd = 0.0;
  double model_size_median = 0.0;
  Index model_size_min = 0;
  Index model_size_max = 0;
  int optimal_runs = 0;
};

struct CvReport {
  std::vector<double> c0_grid;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<CvRecord> records;  ///< grid-major, then fold
  std::vector<std::string> warnings;
};

/// count values from 1/N to 1, geometric, both ends included.
std::vector<double> default_c0_grid(Index n, int count = 6);

struct CvOptions {
  int k = 5;
  std::uint64_t seed = 0;
  bool stratified = true;
  int jobs = 1;  ///< concurrent solves
  std::function<void(const CvRecord&)> on_record;
};

CvReport run_cv(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, const std::vector<double>& c0_grid,
                const CvOptions& options = {});

/// Sample mean and (n-1) standard deviation; sd is 0 for a single value.
std::pair<double, double> mean_sd(const std::vector<double>& values);
double median(std::vector<double> values);

std::vector<CvAggregate> aggregate(const CvReport& r);

/// c0,fold,train_error,test_error,model_size,status,gap[,runtime_s]
void write_records_csv(const CvReport& r, std::ostream& out, bool include_runtime = false);
nlohmann::json aggregates_json(const CvReport& r);

enum class SelectionRule { kMinError, kOneStandardError };
/// min_error: lowest mean test error (ties go to the larger C0). one_se: the
/// largest C0 whose mean test error is within one standard error of the minimum.
double select_c0(const CvReport& r, SelectionRule rule);

struct FrontierPoint {
  std::string label;
  double test_error_mean = 0.0;
  double model_size_median = 0.0;
  bool dominated = false;
};

/// A point is dominated when another point is no worse in both error and size
/// and strictly better in one.
std::vector<FrontierPoint> frontier(std::vector<FrontierPoint> points);
/// label,test_error,model_size with a header row.
std::vector<FrontierPoint> read_frontier_csv(std::istream& in);
void write_frontier_csv(const std::vector<FrontierPoint>& points, std::ostream& out);

}  // namespace slim
