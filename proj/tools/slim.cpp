// slim: train, cross-validate, export and inspect sparse integer scoring systems.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "slim/bounds.hpp"
#include "slim/errors.hpp"
#include "slim/harness.hpp"
#include "slim/io.hpp"
#include "slim/mip.hpp"
#include "slim/report.hpp"
#include "slim/solver.hpp"

using namespace slim;

namespace {

struct DataArgs {
  std::string path;
  std::string label = "label";
  bool no_intercept = false;
  std::string missing = "drop";
  std::vector<std::string> categorical;

  void add(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--data", path, "CSV file with a header row");
    if (required) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--label", label, "label column (values 0/1 or -1/+1)")->capture_default_str();
    cmd->add_flag("--no-intercept", no_intercept, "do not prepend an all-ones column");
    cmd->add_option("--missing", missing, "missing-value policy")
        ->check(CLI::IsMember({"drop", "impute_mean"}))
        ->capture_default_str();
    cmd->add_option("--categorical", categorical, "columns to expand into 0/1 indicators")->delimiter(',');
  }

  Dataset load() const {
    LoadOptions o;
    o.label_column = label;
    o.add_intercept = !no_intercept;
    o.missing_policy = missing == "drop" ? MissingPolicy::kDrop : MissingPolicy::kImputeMean;
    o.categorical_columns = categorical;
    return load_csv(path, o);
  }
};

struct ModelArgs {
  std::string coefset;
  double c0 = 0.01;
  std::string c1 = "auto";
  std::string weights = "1,1";
  double gamma = 0.1;

  void add(CLI::App* cmd) {
    cmd->add_option("--coefset", coefset, "coefficient set JSON (default: integers in [-100, 100])")
        ->check(CLI::ExistingFile);
    cmd->add_option("--c0", c0, "penalty per nonzero coefficient")->capture_default_str();
    cmd->add_option("--c1", c1, "penalty per unit of |coefficient|, or auto")->capture_default_str();
    cmd->add_option("--weights", weights, "class weights W+,W- or auto")->capture_default_str();
    cmd->add_option("--gamma", gamma, "margin of the exported loss rows")->capture_default_str();
  }

  CoefficientSet set_for(const Dataset& d) const {
    if (coefset.empty()) return CoefficientSet::uniform(d.p(), CoefficientDomain::bounded_integer(100));
    return load_coefset(coefset, d.feature_names());
  }

  SlimConfig config_for(const Dataset& d) const {
    SlimConfig cfg;
    cfg.c0 = c0;
    cfg.gamma = gamma;
    if (c1 != "auto") cfg.c1 = Decimal::parse(c1).to_double();
    if (weights == "auto") {
      std::tie(cfg.w_plus, cfg.w_minus) = default_weights(d);
    } else {
      const auto comma = weights.find(',');
      if (comma == std::string::npos) throw ArgumentError("--weights expects auto or W+,W-");
      cfg.w_plus = Decimal::parse(weights.substr(0, comma)).to_double();
      cfg.w_minus = Decimal::parse(weights.substr(comma + 1)).to_double();
    }
    return cfg;
  }
};

double budget_with_env(double budget) {
  if (const char* env = std::getenv("SLIM_BUDGET_S"); env && *env) {
    try {
      budget = Decimal::parse(env).to_double();
    } catch (const Error&) {
      throw ArgumentError(std::string("SLIM_BUDGET_S is not a number: '") + env + "'");
    }
  }
  return budget;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

LabelMap labels_from(const std::string& pos, const std::string& neg) { return {pos, neg}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact trainer and toolkit for sparse linear integer scoring systems"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // ---------------------------------------------------------------- train
  auto* train = app.add_subcommand("train", "fit a scoring system");
  DataArgs train_data;
  ModelArgs train_model;
  double budget = 60.0;
  int jobs = 1;
  std::string out_path, trace_path, pos_name = "+1", neg_name = "-1";
  double gap_tol = 0.0;
  std::uint64_t node_limit = 0, seed = 0;
  train_data.add(train);
  train_model.add(train);
  train->add_option("--budget", budget, "time budget in seconds (SLIM_BUDGET_S overrides)")->capture_default_str();
  train->add_option("--jobs", jobs, "search workers")->capture_default_str();
  train->add_option("--out", out_path, "model JSON to write")->required();
  train->add_option("--trace", trace_path, "write the incumbent/bound trace as CSV");
  train->add_option("--gap-tolerance", gap_tol, "stop once the relative gap is at most this")->capture_default_str();
  train->add_option("--node-limit", node_limit, "stop after this many search nodes (0: no limit)");
  train->add_option("--seed", seed, "recorded for provenance")->capture_default_str();
  train->add_option("--positive", pos_name, "name of the +1 class")->capture_default_str();
  train->add_option("--negative", neg_name, "name of the -1 class")->capture_default_str();

  // ------------------------------------------------------------------- cv
  auto* cv = app.add_subcommand("cv", "k-fold cross-validation over a C0 grid");
  DataArgs cv_data;
  ModelArgs cv_model;
  std::vector<double> grid;
  int folds = 5, cv_jobs = 1;
  std::uint64_t cv_seed = 0, cv_nodes = 0;
  double cv_budget = 60.0;
  std::string records_path, aggregates_path, baselines_path, frontier_path;
  bool include_runtime = false, markdown_table = false;
  cv_data.add(cv);
  cv_model.add(cv);
  cv->add_option("--c0-grid", grid, "comma-separated C0 values (default: 6 geometric values in [1/N, 1])")
      ->delimiter(',');
  cv->add_option("--folds", folds, "fold count")->capture_default_str();
  cv->add_option("--seed", cv_seed, "fold assignment seed")->capture_default_str();
  cv->add_option("--budget", cv_budget, "per-solve time budget in seconds")->capture_default_str();
  cv->add_option("--node-limit", cv_nodes, "per-solve node limit (0: no limit)");
  cv->add_option("--jobs", cv_jobs, "concurrent solves")->capture_default_str();
  cv->add_option("--records", records_path, "per-run CSV");
  cv->add_option("--aggregates", aggregates_path, "per-C0 summary JSON");
  cv->add_flag("--include-runtime", include_runtime, "add the runtime_s column to the records CSV");
  cv->add_flag("--markdown", markdown_table, "print the results table as Markdown");
  cv->add_option("--baselines", baselines_path, "CSV label,test_error,model_size of other methods")
      ->check(CLI::ExistingFile);
  cv->add_option("--frontier", frontier_path, "write the frontier with dominance flags");

  // ----------------------------------------------------------- export-mip
  auto* exp = app.add_subcommand("export-mip", "write the training problem as a CPLEX LP file");
  DataArgs exp_data;
  ModelArgs exp_model;
  std::string variant = "standard", lp_out;
  exp_data.add(exp);
  exp_model.add(exp);
  exp->add_option("--variant", variant, "standard, weighted or pilm")
      ->check(CLI::IsMember({"standard", "weighted", "pilm"}))
      ->capture_default_str();
  exp->add_option("--out", lp_out, "LP file to write")->required();

  // ---------------------------------------------------------------- bound
  auto* bound = app.add_subcommand("bound", "generalization bound for a finite coefficient lattice");
  int theorem = 1, bound_p = 1;
  std::int64_t bound_lambda = 1, bound_n = 1;
  double delta = 0.05;
  bound->add_option("--theorem", theorem, "1: all of {-L..L}^P; 2: coprime points")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  bound->add_option("--lambda", bound_lambda, "coefficient bound L")->required();
  bound->add_option("--p", bound_p, "number of coefficients P")->required();
  bound->add_option("--n", bound_n, "sample count")->required();
  bound->add_option("--delta", delta, "failure probability")->capture_default_str();

  // --------------------------------------------------------------- report
  auto* rep = app.add_subcommand("report", "render a trained model");
  std::string model_path, rep_pos = "+1", rep_neg = "-1";
  bool decision_table = false, markdown = false;
  DataArgs rep_data;
  rep->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  rep_data.add(rep, false);
  rep->add_flag("--decision-table", decision_table, "also induce a decision table (needs --data)");
  rep->add_flag("--markdown", markdown, "Markdown output");
  rep->add_option("--positive", rep_pos, "name of the +1 class")->capture_default_str();
  rep->add_option("--negative", rep_neg, "name of the -1 class")->capture_default_str();

  // --------------------------------------------------------------- verify
  auto* ver = app.add_subcommand("verify", "check an external solver's solution against an LP model");
  std::string lp_path, sol_path, ver_coefset;
  DataArgs ver_data;
  ver->add_option("--model", lp_path, "LP file written by export-mip")->required()->check(CLI::ExistingFile);
  ver->add_option("--solution", sol_path, "name value pairs")->required()->check(CLI::ExistingFile);
  ver_data.add(ver, false);
  ver->add_option("--coefset", ver_coefset, "coefficient set JSON used for the export")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train) {
      const auto d = train_data.load();
      const auto s = train_model.set_for(d);
      auto cfg = train_model.config_for(d);
      cfg.time_budget_s = budget_with_env(budget);
      cfg.workers = jobs;
      cfg.gap_tolerance = gap_tol;
      cfg.node_limit = node_limit;
      std::cout << "seed: " << seed << '\n';
      if (cfg.c0 > 1.0) std::cerr << "warning: C0 > 1 makes the zero model optimal\n";
      std::ofstream trace;
      TraceSink sink;
      if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw Error("cannot open '" + trace_path + "' for writing");
        trace << "elapsed_s,incumbent,lower_bound,nnz\n";
        sink = csv_trace_sink(trace);
      }
      const auto r = solve(d, s, cfg, sink);
      nlohmann::json meta = {{"objective", r.objective.total()},
                             {"lower_bound", r.lower_bound},
                             {"gap", r.gap},
                             {"c0", cfg.c0},
                             {"c1", r.c1},
                             {"w_plus", cfg.w_plus},
                             {"w_minus", cfg.w_minus},
                             {"seed", seed},
                             {"train_error", error_rate(d, r.best.coefficients)},
                             {"model_size", r.best.model_size()}};
      save_model(r.best, out_path, meta);
      ScoreSheetOptions so;
      so.labels = labels_from(pos_name, neg_name);
      so.ranges = feature_ranges(d);
      std::cout << render_score_sheet(r.best, so);
      if (r.best.model_size() == 0 && r.best.intercept() == 0.0)
        std::cerr << "warning: the trained model is all zeros\n";
      std::cout << "status: " << to_string(r.status) << "\nobjective: " << format_double(r.objective.total())
                << "\nlower_bound: " << format_double(r.lower_bound) << "\ngap: " << format_double(r.gap)
                << "\ntrain_error: " << format_double(error_rate(d, r.best.coefficients))
                << "\nconfig_hash: " << r.best.provenance.config_hash
                << "\ndataset_hash: " << r.best.provenance.dataset_hash << '\n';
      return 0;
    }

    if (*cv) {
      const auto d = cv_data.load();
      const auto s = cv_model.set_for(d);
      auto cfg = cv_model.config_for(d);
      cfg.time_budget_s = budget_with_env(cv_budget);
      cfg.node_limit = cv_nodes;
      if (grid.empty()) grid = default_c0_grid(d.n());
      CvOptions o;
      o.k = folds;
      o.seed = cv_seed;
      o.jobs = cv_jobs;
      std::cout << "seed: " << cv_seed << '\n';
      const auto report = run_cv(d, s, cfg, grid, o);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      if (!records_path.empty()) {
        std::ostringstream os;
        write_records_csv(report, os, include_runtime);
        write_text(records_path, os.str());
      }
      if (!aggregates_path.empty()) write_text(aggregates_path, canonical_dump(aggregates_json(report)));
      std::cout << render_results_table(report, markdown_table ? TextFormat::kMarkdown : TextFormat::kPlain);
      std::cout << "selected C0 (min error): " << format_double(select_c0(report, SelectionRule::kMinError))
                << "\nselected C0 (one standard error): "
                << format_double(select_c0(report, SelectionRule::kOneStandardError)) << '\n';
      if (!baselines_path.empty() || !frontier_path.empty()) {
        std::vector<FrontierPoint> points;
        for (const auto& a : aggregate(report))
          points.push_back({"SLIM C0=" + format_double(a.c0), a.test_error_mean, a.model_size_median, false});
        if (!baselines_path.empty()) {
          std::ifstream in(baselines_path);
          for (auto& p : read_frontier_csv(in)) points.push_back(p);
        }
        std::ostringstream os;
        write_frontier_csv(frontier(points), os);
        if (frontier_path.empty())
          std::cout << os.str();
        else
          write_text(frontier_path, os.str());
      }
      return 0;
    }

    if (*exp) {
      const auto d = exp_data.load();
      const auto s = exp_model.set_for(d);
      const auto cfg = exp_model.config_for(d);
      const auto m = build_model(d, s, cfg, parse_mip_variant(variant));
      write_lp(m, lp_out);
      std::cout << "wrote " << lp_out << ": " << m.variables.size() << " variables, " << m.constraints.size()
                << " constraints\n";
      return 0;
    }

    if (*bound) {
      const auto r = theorem == 1
                         ? theorem1(boost::multiprecision::pow(BigInt(2 * bound_lambda + 1),
                                                               static_cast<unsigned>(std::max(bound_p, 1))),
                                    bound_n, delta)
                         : theorem2(bound_lambda, bound_p, bound_n, delta);
      if (bound_lambda < 1 || bound_p < 1) throw ArgumentError("--lambda and --p must be positive");
      std::cout << "theorem: " << r.theorem << "\nhypothesis_count: " << to_string(r.hypothesis_count)
                << "\ndelta: " << format_double(r.delta) << "\nn: " << r.n << "\ngap: " << format_double(r.bound_gap)
                << '\n';
      return 0;
    }

    if (*rep) {
      const auto m = load_model(model_path);
      ScoreSheetOptions so;
      so.format = markdown ? TextFormat::kMarkdown : TextFormat::kPlain;
      so.labels = labels_from(rep_pos, rep_neg);
      std::optional<Dataset> d;
      if (!rep_data.path.empty()) {
        d = rep_data.load();
        so.ranges = feature_ranges(*d);
      }
      std::cout << render_score_sheet(m, so);
      if (decision_table) {
        if (!d) throw ArgumentError("--decision-table needs --data");
        const auto table = induce_decision_table(m, *d);
        std::cout << '\n' << render_decision_table(table, so.labels, so.format);
      }
      return 0;
    }

    if (*ver) {
      const auto m = read_lp(lp_path);
      const auto a = read_solution_file(sol_path);
      if (ver_data.path.empty()) {
        if (const auto bad = first_violation(m, a)) throw InfeasibleSolutionError("solution violates " + *bad);
        std::cout << "feasible\nmodel_objective: " << format_double(model_objective(m, a)) << '\n';
        return 0;
      }
      const auto d = ver_data.load();
      std::optional<CoefficientSet> s;
      if (!ver_coefset.empty()) s = load_coefset(ver_coefset, d.feature_names());
      const auto v = verify_solution(m, a, d, s ? &*s : nullptr);
      std::cout << "verified\nmodel_objective: " << format_double(v.model_objective)
                << "\nobjective: " << format_double(v.objective.total()) << "\ncoefficients:";
      for (Index j = 0; j < v.lambda.size(); ++j) std::cout << ' ' << format_double(v.lambda(j));
      std::cout << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
