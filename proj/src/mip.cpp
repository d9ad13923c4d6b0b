#include "slim/mip.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "slim/errors.hpp"

namespace slim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string idx(Index i) { return std::to_string(i); }

bool tiered(const CoefficientSet& s, MipVariant variant, Index j) {
  return variant == MipVariant::kPilm && !s.tiers(j).empty();
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return format_double(v);
}

double parse_number(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInf;
  if (t == "-inf" || t == "-infinity") return -kInf;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ParseError("expected a number, got '" + text + "'");
  return v;
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::kLe:
      return "<=";
    case Sense::kGe:
      return ">=";
    case Sense::kEq:
      return "=";
  }
  return "=";
}

void write_terms(std::ostream& out, const std::vector<MipTerm>& terms) {
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (k > 0 && k % 8 == 0) out << "\n  ";
    const double c = terms[k].coef;
    if (k == 0)
      out << ' ' << number(c) << ' ' << terms[k].var;
    else
      out << (c < 0 ? " - " : " + ") << number(std::abs(c)) << ' ' << terms[k].var;
  }
  if (terms.empty()) out << " 0";
}

double lhs(const MipConstraint& c, const Assignment& a) {
  long double total = 0.0L;
  for (const auto& t : c.terms) total += static_cast<long double>(t.coef) * a.at(t.var);
  return static_cast<double>(total);
}

}  // namespace

std::string to_string(MipVariant v) {
  switch (v) {
    case MipVariant::kStandard:
      return "standard";
    case MipVariant::kWeighted:
      return "weighted";
    case MipVariant::kPilm:
      return "pilm";
  }
  return "standard";
}

MipVariant parse_mip_variant(const std::string& text) {
  if (text == "standard") return MipVariant::kStandard;
  if (text == "weighted") return MipVariant::kWeighted;
  if (text == "pilm") return MipVariant::kPilm;
  throw ArgumentError("unknown MIP variant '" + text + "' (expected standard, weighted or pilm)");
}

const MipVariable* MipModel::find_variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

const MipConstraint* MipModel::find_constraint(const std::string& name) const {
  for (const auto& c : constraints)
    if (c.name == name) return &c;
  return nullptr;
}

std::size_t MipModel::count(VarKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(), [kind](const MipVariable& v) { return v.kind == kind; }));
}

std::vector<double> big_m(const Dataset& d, const CoefficientSet& s, double gamma) {
  if (s.p() != d.p()) throw ArgumentError("coefficient set size does not match the dataset");
  std::vector<double> m(static_cast<std::size_t>(d.n()), gamma);
  for (Index j = 0; j < d.p(); ++j) {
    const double lo = s.domain(j).min().to_double();
    const double hi = s.domain(j).max().to_double();
    for (Index i = 0; i < d.n(); ++i) {
      const double a = -d.labels()(i) * d.features()(i, j);
      m[static_cast<std::size_t>(i)] += std::max(a * lo, a * hi);
    }
  }
  return m;
}

double score_resolution(const Dataset& d, const CoefficientSet& s) {
  return std::pow(10.0, -(d.feature_scale() + s.scale()));
}

MipModel build_model(const Dataset& d, const CoefficientSet& s, const SlimConfig& cfg, MipVariant variant) {
  cfg.validate();
  if (s.p() != d.p()) throw ArgumentError("coefficient set size does not match the dataset");
  if (variant == MipVariant::kPilm && !s.has_tiers()) throw ArgumentError("the pilm variant needs tiers");

  MipModel m;
  auto& prm = m.params;
  prm.variant = variant;
  prm.n = d.n();
  prm.p = d.p();
  prm.c0 = cfg.c0;
  prm.c1 = resolve_c1(cfg, d.n(), &s);
  prm.w_plus = variant == MipVariant::kStandard ? 1.0 : cfg.w_plus;
  prm.w_minus = variant == MipVariant::kStandard ? 1.0 : cfg.w_minus;
  prm.gamma = cfg.gamma;
  prm.feature_names = d.feature_names();

  const auto n = static_cast<double>(d.n());
  const auto mi = big_m(d, s, cfg.gamma);
  for (Index i = 0; i < d.n(); ++i) {
    m.variables.push_back({"z_" + idx(i), VarKind::kBinary, 0.0, 1.0});
    const double w = (d.labels()(i) == 1 ? prm.w_plus : prm.w_minus) / n;
    if (w != 0.0) m.objective.push_back({"z_" + idx(i), w});
  }
  for (Index i = 0; i < d.n(); ++i) {
    std::string name = "loss_" + idx(i);
    if (variant == MipVariant::kWeighted) name = (d.labels()(i) == 1 ? "loss_pos_" : "loss_neg_") + idx(i);
    MipConstraint c{name, {{"z_" + idx(i), mi[static_cast<std::size_t>(i)]}}, Sense::kGe, cfg.gamma};
    for (Index j = 0; j < d.p(); ++j) {
      const double a = d.labels()(i) * d.features()(i, j);
      if (a != 0.0) c.terms.push_back({"lam_" + idx(j), a});
    }
    m.constraints.push_back(std::move(c));
  }

  std::vector<MipVariable> encoding_vars;
  std::vector<MipConstraint> encoding_rows;
  for (Index j = 0; j < d.p(); ++j) {
    const auto& dom = s.domain(j);
    const std::string lam = "lam_" + idx(j), alpha = "alpha_" + idx(j), beta = "beta_" + idx(j), cost = "I_" + idx(j);
    const double reach = dom.max_abs().to_double();
    const bool plain_integer = !tiered(s, variant, j) && dom.is_integer_range();
    m.variables.push_back(
        {lam, plain_integer ? VarKind::kInteger : VarKind::kContinuous, dom.min().to_double(), dom.max().to_double()});
    m.variables.push_back({alpha, VarKind::kBinary, 0.0, 1.0});
    m.variables.push_back({beta, VarKind::kContinuous, 0.0, reach});
    m.variables.push_back({cost, VarKind::kContinuous, 0.0, kInf});
    m.objective.push_back({cost, 1.0});

    MipConstraint def{"cost_" + idx(j), {{cost, 1.0}}, Sense::kEq, 0.0};
    if (prm.c0 != 0.0) def.terms.push_back({alpha, -prm.c0});
    if (prm.c1 != 0.0) def.terms.push_back({beta, -prm.c1});

    if (tiered(s, variant, j)) {
      const auto& tiers = s.tiers(j);
      MipConstraint value{"value_" + idx(j), {{lam, 1.0}}, Sense::kEq, 0.0};
      MipConstraint one{"one_tier_" + idx(j), {}, Sense::kEq, 1.0};
      for (std::size_t r = 0; r < tiers.size(); ++r) {
        const std::string sr = "s_" + idx(j) + "_" + std::to_string(r + 1);
        encoding_vars.push_back({sr, VarKind::kBinary, 0.0, 1.0});
        MipConstraint link{"tier_" + idx(j) + "_" + std::to_string(r + 1), {{sr, 1.0}}, Sense::kEq, 0.0};
        for (std::size_t k = 0; k < tiers[r].values.size(); ++k) {
          const std::string u = "u_" + idx(j) + "_" + std::to_string(r + 1) + "_" + std::to_string(k);
          encoding_vars.push_back({u, VarKind::kBinary, 0.0, 1.0});
          link.terms.push_back({u, -1.0});
          const double l = tiers[r].values[k].to_double();
          if (l != 0.0) value.terms.push_back({u, -l});
        }
        one.terms.push_back({sr, 1.0});
        def.terms.push_back({sr, -tiers[r].cost});
        encoding_rows.push_back(std::move(link));
      }
      encoding_rows.push_back(std::move(value));
      encoding_rows.push_back(std::move(one));
    } else if (!plain_integer) {
      // One-of-K: lam_j is the chosen value, or 0 when no indicator is set.
      MipConstraint value{"value_" + idx(j), {{lam, 1.0}}, Sense::kEq, 0.0};
      MipConstraint one{"one_value_" + idx(j), {}, Sense::kLe, 1.0};
      const auto& vals = dom.values();
      for (std::size_t k = 0; k < vals.size(); ++k) {
        if (vals[k].is_zero()) continue;
        const std::string u = "u_" + idx(j) + "_" + std::to_string(k);
        encoding_vars.push_back({u, VarKind::kBinary, 0.0, 1.0});
        value.terms.push_back({u, -vals[k].to_double()});
        one.terms.push_back({u, 1.0});
      }
      encoding_rows.push_back(std::move(value));
      encoding_rows.push_back(std::move(one));
    }

    m.constraints.push_back(std::move(def));
    MipConstraint nz_lo{"nonzero_lo_" + idx(j), {}, Sense::kGe, 0.0};
    MipConstraint nz_hi{"nonzero_hi_" + idx(j), {}, Sense::kGe, 0.0};
    if (reach != 0.0) {
      nz_lo.terms.push_back({alpha, reach});
      nz_hi.terms.push_back({alpha, reach});
    }
    nz_lo.terms.push_back({lam, -1.0});
    nz_hi.terms.push_back({lam, 1.0});
    m.constraints.push_back(std::move(nz_lo));
    m.constraints.push_back(std::move(nz_hi));
    m.constraints.push_back({"abs_lo_" + idx(j), {{beta, 1.0}, {lam, -1.0}}, Sense::kGe, 0.0});
    m.constraints.push_back({"abs_hi_" + idx(j), {{beta, 1.0}, {lam, 1.0}}, Sense::kGe, 0.0});
  }
  for (auto& v : encoding_vars) m.variables.push_back(std::move(v));
  for (auto& c : encoding_rows) m.constraints.push_back(std::move(c));
  return m;
}

// ------------------------------------------------------------------ LP text

std::string to_lp(const MipModel& m) {
  std::ostringstream out;
  const auto& prm = m.params;
  out << "\\ sparse linear integer scoring system\n";
  out << "\\ variant: " << to_string(prm.variant) << '\n';
  out << "\\ n: " << prm.n << '\n';
  out << "\\ p: " << prm.p << '\n';
  out << "\\ c0: " << number(prm.c0) << '\n';
  out << "\\ c1: " << number(prm.c1) << '\n';
  out << "\\ w_plus: " << number(prm.w_plus) << '\n';
  out << "\\ w_minus: " << number(prm.w_minus) << '\n';
  out << "\\ gamma: " << number(prm.gamma) << '\n';
  for (std::size_t j = 0; j < prm.feature_names.size(); ++j)
    out << "\\ feature: lam_" << j << ' ' << prm.feature_names[j] << '\n';
  out << "Minimize\n obj:";
  write_terms(out, m.objective);
  out << "\nSubject To\n";
  for (const auto& c : m.constraints) {
    out << ' ' << c.name << ':';
    write_terms(out, c.terms);
    out << ' ' << sense_text(c.sense) << ' ' << number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : m.variables) {
    if (std::isinf(v.lower) && v.lower < 0 && std::isinf(v.upper))
      out << ' ' << v.name << " free\n";
    else if (std::isinf(v.upper))
      out << ' ' << v.name << " >= " << number(v.lower) << '\n';
    else
      out << ' ' << number(v.lower) << " <= " << v.name << " <= " << number(v.upper) << '\n';
  }
  auto section = [&](const char* title, VarKind kind) {
    std::vector<std::string> names;
    for (const auto& v : m.variables)
      if (v.kind == kind) names.push_back(v.name);
    if (names.empty()) return;
    out << title << '\n';
    for (std::size_t k = 0; k < names.size(); ++k) out << (k % 10 == 0 ? (k ? "\n " : " ") : " ") << names[k];
    out << '\n';
  };
  section("Generals", VarKind::kInteger);
  section("Binaries", VarKind::kBinary);
  out << "End\n";
  return out.str();
}

void write_lp(const MipModel& m, std::ostream& out) { out << to_lp(m); }

void write_lp(const MipModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_lp(m, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

namespace {

enum class Section { kHeader, kObjective, kConstraints, kBounds, kGenerals, kBinaries, kEnd };

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

bool is_sense(const std::string& t) { return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>"; }

// Parses "[+|-] c var [+|-] c var ..." up to a sense token or the end.
std::vector<MipTerm> parse_terms(const std::vector<std::string>& tok, std::size_t& k) {
  std::vector<MipTerm> terms;
  while (k < tok.size() && !is_sense(tok[k])) {
    double sign = 1.0;
    if (tok[k] == "+" || tok[k] == "-") {
      sign = tok[k] == "-" ? -1.0 : 1.0;
      if (++k >= tok.size()) throw ParseError("dangling sign in LP expression");
    }
    if (k + 1 >= tok.size() || is_sense(tok[k + 1])) {
      // Only the placeholder "0" of an empty expression may stand alone.
      if (parse_number(tok[k]) != 0.0) throw ParseError("constant terms are not supported: '" + tok[k] + "'");
      ++k;
      continue;
    }
    terms.push_back({tok[k + 1], sign * parse_number(tok[k])});
    k += 2;
  }
  return terms;
}

void apply_header(MipParameters& prm, const std::string& line) {
  const std::string body = trim(line.substr(1));
  const auto colon = body.find(':');
  if (colon == std::string::npos) return;
  const std::string key = body.substr(0, colon);
  const std::string value = trim(body.substr(colon + 1));
  if (key == "variant") prm.variant = parse_mip_variant(value);
  else if (key == "n") prm.n = static_cast<Index>(parse_number(value));
  else if (key == "p") prm.p = static_cast<Index>(parse_number(value));
  else if (key == "c0") prm.c0 = parse_number(value);
  else if (key == "c1") prm.c1 = parse_number(value);
  else if (key == "w_plus") prm.w_plus = parse_number(value);
  else if (key == "w_minus") prm.w_minus = parse_number(value);
  else if (key == "gamma") prm.gamma = parse_number(value);
  else if (key == "feature") {
    const auto space = value.find(' ');
    prm.feature_names.push_back(space == std::string::npos ? std::string{} : value.substr(space + 1));
  }
}

}  // namespace

MipModel parse_lp(std::istream& in) {
  MipModel m;
  Section section = Section::kHeader;
  std::string objective_text, constraint_text, integer_text, binary_text;
  std::vector<std::string> bound_lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '\\') {
      if (section == Section::kHeader) apply_header(m.params, t);
      continue;
    }
    const std::string key = lower(t);
    if (key == "minimize" || key == "minimise" || key == "min") {
      section = Section::kObjective;
      continue;
    }
    if (key == "subject to" || key == "st" || key == "s.t.") {
      section = Section::kConstraints;
      continue;
    }
    if (key == "bounds") {
      section = Section::kBounds;
      continue;
    }
    if (key == "generals" || key == "general") {
      section = Section::kGenerals;
      continue;
    }
    if (key == "binaries" || key == "binary") {
      section = Section::kBinaries;
      continue;
    }
    if (key == "end") {
      section = Section::kEnd;
      continue;
    }
    switch (section) {
      case Section::kObjective:
        objective_text += ' ' + t;
        break;
      case Section::kConstraints:
        constraint_text += ' ' + t;
        break;
      case Section::kBounds:
        bound_lines.push_back(t);
        break;
      case Section::kGenerals:
        integer_text += ' ' + t;
        break;
      case Section::kBinaries:
        binary_text += ' ' + t;
        break;
      case Section::kHeader:
        throw ParseError("LP text before the Minimize section: '" + t + "'");
      case Section::kEnd:
        throw ParseError("LP text after End: '" + t + "'");
    }
  }
  if (section != Section::kEnd) throw ParseError("LP file has no End line");

  {
    auto tok = tokens_of(objective_text);
    std::size_t k = 0;
    if (!tok.empty() && tok[0].back() == ':') k = 1;
    m.objective = parse_terms(tok, k);
  }
  {
    const auto tok = tokens_of(constraint_text);
    std::size_t k = 0;
    while (k < tok.size()) {
      if (tok[k].back() != ':') throw ParseError("expected a constraint name, got '" + tok[k] + "'");
      MipConstraint c;
      c.name = tok[k].substr(0, tok[k].size() - 1);
      ++k;
      c.terms = parse_terms(tok, k);
      if (k + 1 >= tok.size()) throw ParseError("constraint '" + c.name + "' has no right-hand side");
      const std::string& s = tok[k];
      c.sense = (s == "<=" || s == "=<") ? Sense::kLe : (s == ">=" || s == "=>") ? Sense::kGe : Sense::kEq;
      c.rhs = parse_number(tok[k + 1]);
      k += 2;
      m.constraints.push_back(std::move(c));
    }
  }
  for (const auto& b : bound_lines) {
    const auto tok = tokens_of(b);
    MipVariable v;
    if (tok.size() == 2 && lower(tok[1]) == "free") {
      v = {tok[0], VarKind::kContinuous, -kInf, kInf};
    } else if (tok.size() == 3 && tok[1] == ">=") {
      v = {tok[0], VarKind::kContinuous, parse_number(tok[2]), kInf};
    } else if (tok.size() == 5 && tok[1] == "<=" && tok[3] == "<=") {
      v = {tok[2], VarKind::kContinuous, parse_number(tok[0]), parse_number(tok[4])};
    } else {
      throw ParseError("unsupported bound line '" + b + "'");
    }
    m.variables.push_back(std::move(v));
  }
  auto mark = [&](const std::string& text, VarKind kind) {
    for (const auto& name : tokens_of(text)) {
      auto it = std::find_if(m.variables.begin(), m.variables.end(), [&](const MipVariable& v) { return v.name == name; });
      if (it == m.variables.end()) {
        m.variables.push_back({name, kind, 0.0, kind == VarKind::kBinary ? 1.0 : kInf});
      } else {
        it->kind = kind;
      }
    }
  };
  mark(integer_text, VarKind::kInteger);
  mark(binary_text, VarKind::kBinary);

  // Variables used but never bounded get the LP default [0, +inf).
  auto declare = [&](const std::string& name) {
    if (!m.find_variable(name)) m.variables.push_back({name, VarKind::kContinuous, 0.0, kInf});
  };
  for (const auto& t : m.objective) declare(t.var);
  for (const auto& c : m.constraints)
    for (const auto& t : c.terms) declare(t.var);
  return m;
}

MipModel read_lp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return parse_lp(in);
}

// ---------------------------------------------------------------- solutions

Assignment read_solution(std::istream& in) {
  Assignment a;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto cut = line.find_first_of("#\\");
    if (cut != std::string::npos) line.resize(cut);
    const auto tok = tokens_of(line);
    if (tok.empty()) continue;
    if (tok.size() % 2 != 0) throw ParseError("solution line " + std::to_string(row) + " is not name/value pairs");
    for (std::size_t k = 0; k < tok.size(); k += 2) {
      try {
        a[tok[k]] = parse_number(tok[k + 1]);
      } catch (const ParseError&) {
        throw ParseError("solution line " + std::to_string(row) + ": bad value '" + tok[k + 1] + "' for " + tok[k]);
      }
    }
  }
  return a;
}

Assignment read_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_solution(in);
}

void write_solution(const Assignment& a, std::ostream& out) {
  for (const auto& [name, value] : a) out << name << ' ' << number(value) << '\n';
}

double model_objective(const MipModel& m, const Assignment& a) {
  long double total = 0.0L;
  for (const auto& t : m.objective) {
    const auto it = a.find(t.var);
    if (it == a.end()) throw ArgumentError("assignment has no value for " + t.var);
    total += static_cast<long double>(t.coef) * it->second;
  }
  return static_cast<double>(total);
}

std::optional<std::string> first_violation(const MipModel& m, const Assignment& a, double tol) {
  for (const auto& v : m.variables) {
    const auto it = a.find(v.name);
    if (it == a.end()) throw ArgumentError("assignment has no value for " + v.name);
    const double x = it->second;
    if (!std::isfinite(x)) return "bound on " + v.name;
    if (x < v.lower - tol || x > v.upper + tol) return "bound on " + v.name;
    if (v.kind != VarKind::kContinuous && std::abs(x - std::round(x)) > tol) return "integrality of " + v.name;
  }
  for (const auto& c : m.constraints) {
    const double left = lhs(c, a);
    const bool ok = c.sense == Sense::kLe   ? left <= c.rhs + tol
                    : c.sense == Sense::kGe ? left >= c.rhs - tol
                                            : std::abs(left - c.rhs) <= tol;
    if (!ok) return c.name;
  }
  return std::nullopt;
}

Eigen::VectorXd extract_lambda(const MipModel& m, const Assignment& a, int decimals) {
  Eigen::VectorXd lambda(m.params.p);
  const double unit = std::pow(10.0, decimals);
  for (Index j = 0; j < m.params.p; ++j) {
    const auto it = a.find("lam_" + idx(j));
    if (it == a.end()) throw ArgumentError("assignment has no value for lam_" + idx(j));
    lambda(j) = std::round(it->second * unit) / unit;
  }
  return lambda;
}

VerifiedSolution verify_solution(const MipModel& m, const Assignment& a, const Dataset& d, const CoefficientSet* s) {
  if (d.n() != m.params.n || d.p() != m.params.p)
    throw ArgumentError("dataset shape " + std::to_string(d.n()) + "x" + std::to_string(d.p()) +
                        " does not match the model (" + std::to_string(m.params.n) + "x" +
                        std::to_string(m.params.p) + ")");
  if (const auto bad = first_violation(m, a)) throw InfeasibleSolutionError("solution violates " + *bad);

  VerifiedSolution out;
  out.model_objective = model_objective(m, a);
  out.lambda = extract_lambda(m, a, s ? s->scale() : 6);
  if (s && !contains(*s, out.lambda)) throw VerificationError("extracted coefficients are not in the coefficient set");

  SlimConfig cfg;
  cfg.c0 = m.params.c0;
  cfg.c1 = m.params.c1;
  cfg.w_plus = m.params.w_plus;
  cfg.w_minus = m.params.w_minus;
  cfg.gamma = m.params.gamma;
  out.objective = evaluate(d, out.lambda, cfg, m.params.variant == MipVariant::kPilm ? s : nullptr);
  if (std::abs(out.objective.total() - out.model_objective) > 1e-6) {
    throw VerificationError("model objective " + format_double(out.model_objective) +
                            " differs from the recomputed objective " + format_double(out.objective.total()));
  }
  return out;
}

Assignment assignment_for(const MipModel& m, const Dataset& d, const CoefficientSet& s,
                          const Eigen::Ref<const Eigen::VectorXd>& lambda) {
  if (lambda.size() != m.params.p) throw ArgumentError("coefficient vector length mismatch");
  Assignment a;
  for (const auto& v : m.variables) a[v.name] = 0.0;
  const bool pilm = m.params.variant == MipVariant::kPilm;
  for (Index j = 0; j < lambda.size(); ++j) {
    const double v = lambda(j);
    const auto dv = Decimal::from_double(v);
    a["lam_" + idx(j)] = v;
    a["alpha_" + idx(j)] = v != 0.0 ? 1.0 : 0.0;
    a["beta_" + idx(j)] = std::abs(v);
    double cost = (v != 0.0 ? m.params.c0 : 0.0) + m.params.c1 * std::abs(v);
    if (pilm && !s.tiers(j).empty()) {
      const int r = s.tier_of(j, dv);
      if (r == 0) throw ArgumentError("value outside every tier");
      const auto& tier = s.tiers(j)[static_cast<std::size_t>(r - 1)];
      const auto k = std::lower_bound(tier.values.begin(), tier.values.end(), dv) - tier.values.begin();
      a["s_" + idx(j) + "_" + std::to_string(r)] = 1.0;
      a["u_" + idx(j) + "_" + std::to_string(r) + "_" + std::to_string(k)] = 1.0;
      cost += tier.cost;
    } else if (m.find_constraint("one_value_" + idx(j)) && v != 0.0) {
      const auto& vals = s.domain(j).values();
      const auto k = std::lower_bound(vals.begin(), vals.end(), dv) - vals.begin();
      a["u_" + idx(j) + "_" + std::to_string(k)] = 1.0;
    }
    a["I_" + idx(j)] = cost;
  }
  for (Index i = 0; i < d.n(); ++i) {
    long double margin = 0.0L;
    for (Index j = 0; j < d.p(); ++j)
      margin += static_cast<long double>(d.labels()(i)) * d.features()(i, j) * lambda(j);
    // z_i may stay 0 only when the loss row holds without it.
    a["z_" + idx(i)] = margin >= static_cast<long double>(m.params.gamma) - 1e-9L ? 0.0 : 1.0;
  }
  return a;
}

}  // namespace slim
