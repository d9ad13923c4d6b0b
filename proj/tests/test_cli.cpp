#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "slim/io.hpp"
#include "slim/mip.hpp"
#include "slim/solver.hpp"

using namespace slim;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Workdir {
 public:
  Workdir() {
    dir_ = fs::temp_directory_path() / ("slim_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  Run run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(SLIM_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
  static inline int counter_ = 0;
};

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

const char* kTwoPoint = "a,b,label\n-1,1,1\n1,-1,0\n";
const char* kUnitSet = R"({"default": {"type": "integer", "max": 1}})";

}  // namespace

TEST_CASE("bound prints the coprime count") {
  Workdir w;
  const auto r = w.run("bound --theorem 2 --lambda 5 --p 1 --n 200 --delta 0.05");
  CHECK(r.code == 0);
  CHECK(has(r.out, "hypothesis_count: 10\n"));
  CHECK(has(r.out, "gap: "));
  const auto r1 = w.run("bound --theorem 1 --lambda 1 --p 1 --n 200 --delta 0.05");
  CHECK(has(r1.out, "hypothesis_count: 3\n"));
  CHECK(has(r1.out, "gap: 0.10466"));
}

TEST_CASE("train on the two-point instance") {
  Workdir w;
  const auto data = w.write("d.csv", kTwoPoint);
  const auto set = w.write("s.json", kUnitSet);
  const auto model = w / "m.json";
  const auto r = w.run("train --data " + data.string() + " --coefset " + set.string() +
                       " --no-intercept --c0 0.1 --out " + model.string());
  REQUIRE(r.code == 0);
  CHECK(has(r.out, "seed: 0"));
  CHECK(has(r.out, "status: optimal"));
  const auto m = load_model(model.string());
  CHECK(m.coefficients == Eigen::Vector2d(-1, 0));
  const auto meta = nlohmann::json::parse(slurp(model))["meta"];
  CHECK(meta.contains("config_hash"));
  CHECK(meta.contains("dataset_hash"));

  SUBCASE("repeat runs write identical files") {
    const auto again = w / "m2.json";
    w.run("train --data " + data.string() + " --coefset " + set.string() + " --no-intercept --c0 0.1 --jobs 4 --out " +
          again.string());
    CHECK(slurp(model) == slurp(again));
  }
  SUBCASE("report renders the saved model") {
    const auto rep = w.run("report --model " + model.string());
    CHECK(rep.code == 0);
    CHECK(has(rep.out, "-1 × a"));
  }
}

TEST_CASE("C0 above one gives the zero model with a warning") {
  Workdir w;
  const auto data = w.write("d.csv", "a,b,label\n1,0,1\n0,1,0\n1,1,1\n2,0,0\n");
  const auto model = w / "m.json";
  const auto r = w.run("train --data " + data.string() + " --c0 2 --out " + model.string());
  CHECK(r.code == 0);
  CHECK(has(r.err, "warning"));
  CHECK(load_model(model.string()).coefficients.isZero());
}

TEST_CASE("exit codes") {
  Workdir w;
  CHECK(w.run("train --bogus-flag 3").code == 2);
  CHECK(w.run("nonsense").code == 2);
  CHECK(w.run("bound --theorem 2 --lambda 5 --p 1").code == 2);
  CHECK(w.run("--help").code == 0);

  const auto missing = w.run("train --data /nonexistent/x.csv --out " + (w / "m.json").string());
  CHECK(missing.code != 0);
  CHECK_FALSE(missing.err.empty());

  const auto bad = w.write("bad.csv", "a,label\nabc,1\n1,0\n");
  const auto r = w.run("train --data " + bad.string() + " --out " + (w / "m.json").string());
  CHECK(r.code == 1);
  CHECK(has(r.err, "error:"));
}

TEST_CASE("budget exhaustion is not a failure") {
  Workdir w;
  const auto model = w / "m.json";
  const auto r = w.run("train --data " + std::string(SLIM_DATA_DIR) +
                       "/mammo.csv --label Malignant --c0 0.002 --node-limit 50 --out " + model.string());
  CHECK(r.code == 0);
  CHECK(has(r.out, "status: feasible_budget_exhausted"));
}

TEST_CASE("export then verify") {
  Workdir w;
  const auto data = w.write("d.csv", kTwoPoint);
  const auto set = w.write("s.json", kUnitSet);
  const auto lp = w / "m.lp";
  const auto e = w.run("export-mip --data " + data.string() + " --coefset " + set.string() +
                       " --no-intercept --c0 0.1 --gamma 1 --out " + lp.string());
  REQUIRE(e.code == 0);
  const auto m = read_lp(lp.string());
  CHECK(m.constraints.size() == 2 + 5 * 2);

  std::istringstream in(kTwoPoint);
  LoadOptions o;
  o.add_intercept = false;
  const auto d = read_csv(in, o);
  const auto s = CoefficientSet::uniform(2, CoefficientDomain::bounded_integer(1));
  {
    std::ofstream sol(w / "good.txt");
    write_solution(assignment_for(m, d, s, Eigen::Vector2d(-1, 0)), sol);
  }
  const auto ok = w.run("verify --model " + lp.string() + " --solution " + (w / "good.txt").string() + " --data " +
                        data.string() + " --no-intercept --coefset " + set.string());
  CHECK(ok.code == 0);
  CHECK(has(ok.out, "verified"));

  auto a = assignment_for(m, d, s, Eigen::Vector2d(-1, 0));
  a["z_0"] = 0;
  a["lam_0"] = 1;
  {
    std::ofstream sol(w / "bad.txt");
    write_solution(a, sol);
  }
  const auto bad = w.run("verify --model " + lp.string() + " --solution " + (w / "bad.txt").string());
  CHECK(bad.code == 1);
  CHECK(has(bad.err, "violates"));
}

TEST_CASE("cv writes byte-identical outputs for a fixed seed") {
  Workdir w;
  std::string csv = "a,b,label\n";
  for (int i = 0; i < 30; ++i) csv += std::to_string(i % 4) + "," + std::to_string((i * 7) % 5) + "," + ((i * 3) % 4 < 2 ? "1" : "0") + "\n";
  const auto data = w.write("d.csv", csv);
  const auto set = w.write("s.json", R"({"default": {"type": "integer", "max": 3}})");
  const std::string base = "cv --data " + data.string() + " --coefset " + set.string() +
                           " --c0-grid 0.01,0.1 --folds 3 --seed 5 --jobs 2 --frontier " + (w / "f.csv").string();
  const auto r1 = w.run(base + " --records " + (w / "r1.csv").string() + " --aggregates " + (w / "a1.json").string());
  const auto r2 = w.run(base + " --records " + (w / "r2.csv").string() + " --aggregates " + (w / "a2.json").string());
  REQUIRE(r1.code == 0);
  CHECK(slurp(w / "r1.csv") == slurp(w / "r2.csv"));
  CHECK(slurp(w / "a1.json") == slurp(w / "a2.json"));
  CHECK(r1.out == r2.out);
  CHECK(has(r1.out, "test error"));
  CHECK(has(slurp(w / "f.csv"), "dominated"));
}
