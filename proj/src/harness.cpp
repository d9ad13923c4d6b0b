#include "slim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "slim/errors.hpp"

namespace slim {

std::vector<double> default_c0_grid(Index n, int count) {
  if (n < 1) throw ArgumentError("N must be at least 1");
  if (count < 1) throw ArgumentError("grid needs at least one value");
  const double lo = 1.0 / static_cast<double>(n);
  if (count == 1) return {lo};
  std::vector<double> grid;
  for (int k = 0; k < count; ++k) grid.push_back(std::pow(lo, 1.0 - static_cast<double>(k) / (count - 1)));
  grid.back() = 1.0;
  return grid;
}

CvReport run_cv(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, const std::vector<double>& c0_grid,
                const CvOptions& options) {
  if (c0_grid.empty()) throw ArgumentError("C0 grid is empty");
  if (options.k < 2) throw ArgumentError("cross-validation needs at least 2 folds");
  const auto folds = split_folds(d, options.k, options.seed, options.stratified);

  CvReport report;
  report.c0_grid = c0_grid;
  report.k = options.k;
  report.seed = options.seed;

  std::vector<Dataset> train, test;
  for (int f = 0; f < options.k; ++f) {
    const auto tr = folds.complement(f);
    const auto te = folds.members(f);
    train.push_back(d.subset(tr));
    test.push_back(d.subset(te));
    if (train.back().positives() == 0 || train.back().negatives() == 0)
      report.warnings.push_back("fold " + std::to_string(f) + ": training data has a single class");
  }

  const std::size_t jobs_total = c0_grid.size() * static_cast<std::size_t>(options.k);
  report.records.resize(jobs_total);
  std::mutex mutex;
  std::size_t next = 0;
  std::vector<std::string> errors(jobs_total);

  auto worker = [&] {
    for (;;) {
      std::size_t job;
      {
        std::lock_guard<std::mutex> lock(mutex);
        if (next >= jobs_total) return;
        job = next++;
      }
      const double c0 = c0_grid[job / static_cast<std::size_t>(options.k)];
      const int fold = static_cast<int>(job % static_cast<std::size_t>(options.k));
      SlimConfig run_cfg = cfg;
      run_cfg.c0 = c0;
      try {
        const auto& tr = train[static_cast<std::size_t>(fold)];
        const auto result = solve(tr, s, run_cfg);
        CvRecord rec;
        rec.c0 = c0;
        rec.fold = fold;
        rec.coefficients = result.best.coefficients;
        rec.train_error = error_rate(tr, rec.coefficients);
        rec.test_error = error_rate(test[static_cast<std::size_t>(fold)], rec.coefficients);
        rec.model_size = result.best.model_size();
        rec.status = to_string(result.status);
        rec.gap = result.gap;
        rec.runtime_s = result.elapsed_s;
        std::lock_guard<std::mutex> lock(mutex);
        report.records[job] = rec;
        if (options.on_record) options.on_record(rec);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mutex);
        errors[job] = e.what();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs_total)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error("cross-validation run failed: " + e);
  return report;
}

std::pair<double, double> mean_sd(const std::vector<double>& values) {
  if (values.empty()) throw ArgumentError("no values to summarize");
  long double sum = 0;
  for (const double v : values) sum += v;
  const long double mean = sum / static_cast<long double>(values.size());
  if (values.size() == 1) return {static_cast<double>(mean), 0.0};
  long double ss = 0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {static_cast<double>(mean), static_cast<double>(std::sqrt(ss / static_cast<long double>(values.size() - 1)))};
}

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("no values to summarize");
  std::sort(values.begin(), values.end());
  const auto mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<CvAggregate> aggregate(const CvReport& r) {
  if (r.c0_grid.empty() || r.records.empty()) throw ArgumentError("report has no runs");
  std::vector<CvAggregate> out;
  for (const double c0 : r.c0_grid) {
    std::vector<double> test, train, size;
    CvAggregate a;
    a.c0 = c0;
    for (const auto& rec : r.records) {
      if (rec.c0 != c0) continue;
      test.push_back(rec.test_error);
      train.push_back(rec.train_error);
      size.push_back(static_cast<double>(rec.model_size));
      if (rec.status == "optimal") ++a.optimal_runs;
    }
    if (test.empty()) continue;
    std::tie(a.test_error_mean, a.test_error_sd) = mean_sd(test);
    std::tie(a.train_error_mean, a.train_error_sd) = mean_sd(train);
    a.model_size_median = median(size);
    a.model_size_min = static_cast<Index>(*std::min_element(size.begin(), size.end()));
    a.model_size_max = static_cast<Index>(*std::max_element(size.begin(), size.end()));
    out.push_back(a);
  }
  return out;
}

void write_records_csv(const CvReport& r, std::ostream& out, bool include_runtime) {
  out << "c0,fold,train_error,test_error,model_size,status,gap";
  if (include_runtime) out << ",runtime_s";
  out << '\n';
  for (const auto& rec : r.records) {
    out << format_double(rec.c0) << ',' << rec.fold << ',' << format_double(rec.train_error) << ','
        << format_double(rec.test_error) << ',' << rec.model_size << ',' << rec.status << ','
        << format_double(rec.gap);
    if (include_runtime) out << ',' << format_double(rec.runtime_s);
    out << '\n';
  }
}

nlohmann::json aggregates_json(const CvReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& a : aggregate(r)) {
    rows.push_back({{"c0", a.c0},
                    {"test_error_mean", a.test_error_mean},
                    {"test_error_sd", a.test_error_sd},
                    {"train_error_mean", a.train_error_mean},
                    {"train_error_sd", a.train_error_sd},
                    {"model_size_median", a.model_size_median},
                    {"model_size_min", a.model_size_min},
                    {"model_size_max", a.model_size_max},
                    {"optimal_runs", a.optimal_runs}});
  }
  return {{"folds", r.k},
          {"seed", r.seed},
          {"aggregates", rows},
          {"warnings", r.warnings},
          {"selected_c0",
           {{"min_error", select_c0(r, SelectionRule::kMinError)},
            {"one_se", select_c0(r, SelectionRule::kOneStandardError)}}}};
}

double select_c0(const CvReport& r, SelectionRule rule) {
  const auto aggs = aggregate(r);
  const CvAggregate* best = nullptr;
  for (const auto& a : aggs)
    if (!best || a.test_error_mean < best->test_error_mean ||
        (a.test_error_mean == best->test_error_mean && a.c0 > best->c0))
      best = &a;
  if (rule == SelectionRule::kMinError) return best->c0;
  const double limit = best->test_error_mean + best->test_error_sd / std::sqrt(static_cast<double>(r.k));
  double chosen = best->c0;
  for (const auto& a : aggs)
    if (a.test_error_mean <= limit && a.c0 > chosen) chosen = a.c0;
  return chosen;
}

std::vector<FrontierPoint> frontier(std::vector<FrontierPoint> points) {
  for (auto& p : points) {
    p.dominated = false;
    for (const auto& q : points) {
      const bool no_worse = q.test_error_mean <= p.test_error_mean && q.model_size_median <= p.model_size_median;
      const bool better = q.test_error_mean < p.test_error_mean || q.model_size_median < p.model_size_median;
      if (no_worse && better) {
        p.dominated = true;
        break;
      }
    }
  }
  return points;
}

std::vector<FrontierPoint> read_frontier_csv(std::istream& in) {
  std::vector<FrontierPoint> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || row == 1) continue;  // header
    std::stringstream ss(line);
    std::string label, err, size;
    if (!std::getline(ss, label, ',') || !std::getline(ss, err, ',') || !std::getline(ss, size, ','))
      throw ParseError("baseline row " + std::to_string(row) + " needs label,test_error,model_size");
    try {
      out.push_back({label, std::stod(err), std::stod(size), false});
    } catch (const std::exception&) {
      throw ParseError("baseline row " + std::to_string(row) + " has a non-numeric value");
    }
  }
  return out;
}

void write_frontier_csv(const std::vector<FrontierPoint>& points, std::ostream& out) {
  out << "label,test_error,model_size,dominated\n";
  for (const auto& p : points)
    out << p.label << ',' << format_double(p.test_error_mean) << ',' << format_double(p.model_size_median) << ','
        << (p.dominated ? "true" : "false") << '\n';
}

}  // namespace slim
