#include "slim/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "slim/errors.hpp"
#include "slim/objective.hpp"

namespace slim {

namespace {

constexpr const char* kTimes = "×";

std::string signed_number(double v) { return (v < 0 ? "-" : "+") + format_double(std::abs(v)); }

std::string range_text(const ScoreSheetOptions& o, const std::string& name) {
  const auto it = o.ranges.find(name);
  if (it == o.ranges.end()) return {};
  return format_double(it->second.first) + " to " + format_double(it->second.second);
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * v;
  return os.str();
}

bool is_intercept(const ScoringSystem& m, Index j) { return m.intercept_index && *m.intercept_index == j; }

}  // namespace

std::map<std::string, std::pair<double, double>> feature_ranges(const Dataset& d) {
  std::map<std::string, std::pair<double, double>> out;
  for (Index j = 0; j < d.p(); ++j)
    out[d.feature_names()[static_cast<std::size_t>(j)]] = {d.features().col(j).minCoeff(), d.features().col(j).maxCoeff()};
  return out;
}

std::string render_score_sheet(const ScoringSystem& m, const ScoreSheetOptions& o) {
  struct Row {
    std::string points, feature, range;
  };
  std::vector<Row> rows;
  for (Index j = 0; j < m.size(); ++j) {
    if (is_intercept(m, j) || m.coefficients(j) == 0.0) continue;
    const auto& name = m.feature_names.at(static_cast<std::size_t>(j));
    rows.push_back({signed_number(m.coefficients(j)), name, range_text(o, name)});
  }
  const bool has_intercept = m.intercept() != 0.0;
  const std::string& pos = o.labels.positive;
  const std::string& neg = o.labels.negative;
  const std::string rule = "Predict " + pos + " if Total > 0; otherwise " + neg + " (Total = 0 predicts " + neg + ").";
  std::ostringstream out;

  if (o.format == TextFormat::kMarkdown) {
    out << "| Points | Feature | Range |\n|---:|---|---|\n";
    for (const auto& r : rows) out << "| " << r.points << " " << kTimes << " | " << r.feature << " | " << r.range << " |\n";
    if (has_intercept) out << "| " << signed_number(m.intercept()) << " | (intercept) | |\n";
    out << "| **Total** | | |\n\n" << rule << '\n';
  } else {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.points.size() + 3 + r.feature.size());
    out << "SCORE SHEET\n";
    for (const auto& r : rows) {
      const std::string left = r.points + " " + kTimes + " " + r.feature;
      out << "  " << left;
      if (!r.range.empty()) out << std::string(width + 2 - (r.points.size() + 3 + r.feature.size()), ' ') << '(' << r.range << ')';
      out << '\n';
    }
    if (has_intercept) out << "  " << signed_number(m.intercept()) << "  (intercept)\n";
    if (rows.empty() && !has_intercept)
      out << "  Total = 0\n";
    else
      out << "  Total = sum of the rows above\n";
    out << rule << '\n';
  }
  if (m.model_size() == 0) {
    out << "Warning: the model uses no features; every example gets the same prediction ("
        << (m.intercept() > 0 ? pos : neg) << ").\n";
  }
  return out.str();
}

Eigen::VectorXd parse_score_sheet(const std::string& text, const std::vector<std::string>& feature_names,
                                  std::optional<Index> intercept_index) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Index>(feature_names.size()));
  std::istringstream in(text);
  std::string line;
  const std::string times = std::string(" ") + kTimes + " ";
  while (std::getline(in, line)) {
    if (line.rfind("  ", 0) != 0) continue;
    const std::string body = line.substr(2);
    if (body.empty() || (body[0] != '+' && body[0] != '-')) continue;
    const auto cut = body.find(times);
    if (cut == std::string::npos) {
      // Intercept row: "+c  (intercept)"
      const auto space = body.find("  (intercept)");
      if (space == std::string::npos) continue;
      if (!intercept_index) throw ParseError("score sheet has an intercept row but the model has no intercept");
      out(*intercept_index) = Decimal::parse(body.substr(0, space)).to_double();
      continue;
    }
    const double points = Decimal::parse(body.substr(0, cut)).to_double();
    std::string name = body.substr(cut + times.size());
    const auto range = name.find("  (");
    if (range != std::string::npos) name.resize(range);
    while (!name.empty() && name.back() == ' ') name.pop_back();
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) throw ParseError("score sheet names unknown feature '" + name + "'");
    out(it - feature_names.begin()) = points;
  }
  return out;
}

// ---------------------------------------------------------------- decision table

int DecisionNode::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const DecisionNode* node = this;
  while (!node->is_leaf()) node = x(*node->feature) != 0.0 ? node->yes.get() : node->no.get();
  return node->prediction;
}

std::size_t DecisionNode::leaves() const { return is_leaf() ? 1 : yes->leaves() + no->leaves(); }

namespace {

struct TableBuilder {
  std::vector<Index> order;          // active features, split order
  std::vector<std::int64_t> points;  // exact coefficients at a common scale, per order position
  std::int64_t intercept = 0;
  const std::vector<std::string>* names = nullptr;

  // Predictions of every completion of the features after `depth`, given the fixed partial sum.
  void outcomes(std::size_t depth, std::int64_t partial, bool& pos, bool& neg) const {
    if (pos && neg) return;
    if (depth == order.size()) {
      (partial > 0 ? pos : neg) = true;
      return;
    }
    outcomes(depth + 1, partial + points[depth], pos, neg);
    outcomes(depth + 1, partial, pos, neg);
  }

  std::unique_ptr<DecisionNode> build(std::size_t depth, std::int64_t partial) const {
    auto node = std::make_unique<DecisionNode>();
    bool pos = false, neg = false;
    outcomes(depth, partial, pos, neg);
    if (!(pos && neg)) {
      node->prediction = pos ? 1 : -1;
      return node;
    }
    node->feature = order[depth];
    node->feature_name = (*names)[static_cast<std::size_t>(order[depth])];
    node->yes = build(depth + 1, partial + points[depth]);
    node->no = build(depth + 1, partial);
    return node;
  }
};

}  // namespace

DecisionNode induce_decision_table(const ScoringSystem& m, const Dataset& d) {
  if (m.size() != d.p()) throw ArgumentError("model and dataset have different feature counts");
  TableBuilder b;
  b.names = &m.feature_names;
  const auto exact = to_decimals(m.coefficients);
  int scale = 0;
  for (const auto& v : exact) scale = std::max(scale, v.scale);
  for (Index j = 0; j < m.size(); ++j) {
    if (is_intercept(m, j) || m.coefficients(j) == 0.0) continue;
    const auto col = d.features().col(j);
    if (!((col.array() == 0.0) || (col.array() == 1.0)).all())
      throw NotApplicableError("feature '" + m.feature_names[static_cast<std::size_t>(j)] + "' is not binary");
    b.order.push_back(j);
  }
  if (b.order.size() > 16) throw SizeError("decision tables support at most 16 active features");
  std::stable_sort(b.order.begin(), b.order.end(),
                   [&](Index a, Index c) { return std::abs(m.coefficients(a)) > std::abs(m.coefficients(c)); });
  for (const auto j : b.order) b.points.push_back(exact[static_cast<std::size_t>(j)].scaled_to(scale));
  if (m.intercept_index) b.intercept = exact[static_cast<std::size_t>(*m.intercept_index)].scaled_to(scale);
  auto root = b.build(0, b.intercept);
  return std::move(*root);
}

namespace {

std::string leaf_text(const DecisionNode& n, const LabelMap& labels) {
  return n.prediction > 0 ? labels.positive : labels.negative;
}

void render_node(const DecisionNode& n, const LabelMap& labels, int indent, bool markdown, std::ostringstream& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string bullet = markdown ? "- " : "";
  if (n.is_leaf()) {
    out << pad << bullet << "predict " << leaf_text(n, labels) << '\n';
    return;
  }
  out << pad << bullet << n.feature_name << "?\n";
  for (const auto* branch : {&n.yes, &n.no}) {
    const char* answer = branch == &n.yes ? "yes" : "no";
    const DecisionNode& child = **branch;
    if (child.is_leaf()) {
      out << pad << "  " << bullet << answer << ": predict " << leaf_text(child, labels) << '\n';
    } else {
      out << pad << "  " << bullet << answer << ":\n";
      render_node(child, labels, indent + 2, markdown, out);
    }
  }
}

std::string inline_node(const DecisionNode& n, const LabelMap& labels) {
  if (n.is_leaf()) return leaf_text(n, labels);
  return n.feature_name + "? yes → " + inline_node(*n.yes, labels) + "; no → " + inline_node(*n.no, labels);
}

}  // namespace

std::string render_decision_table(const DecisionNode& root, const LabelMap& labels, TextFormat format) {
  std::ostringstream out;
  render_node(root, labels, 0, format == TextFormat::kMarkdown, out);
  return out.str();
}

std::string render_decision_table_inline(const DecisionNode& root, const LabelMap& labels) {
  return inline_node(root, labels);
}

// ----------------------------------------------------------------- results table

std::string render_results_table(const CvReport& r, TextFormat format) {
  const auto aggs = aggregate(r);
  if (aggs.empty()) throw ArgumentError("report has no runs");
  std::vector<std::string> header{"C0"};
  std::vector<std::vector<std::string>> rows{
      {"test error"}, {"train error"}, {"model size"}, {"model range"}};
  for (const auto& a : aggs) {
    header.push_back(format_double(a.c0));
    rows[0].push_back(percent(a.test_error_mean) + " ± " + percent(a.test_error_sd) + "%");
    rows[1].push_back(percent(a.train_error_mean) + " ± " + percent(a.train_error_sd) + "%");
    rows[2].push_back(format_double(a.model_size_median));
    rows[3].push_back(std::to_string(a.model_size_min) + " - " + std::to_string(a.model_size_max));
  }
  std::ostringstream out;
  if (format == TextFormat::kMarkdown) {
    auto line = [&](const std::vector<std::string>& cells) {
      out << '|';
      for (const auto& c : cells) out << ' ' << c << " |";
      out << '\n';
    };
    line(header);
    out << "|---|";
    for (std::size_t k = 1; k < header.size(); ++k) out << "---:|";
    out << '\n';
    for (const auto& row : rows) line(row);
    return out.str();
  }
  // Column widths in code points; the ± sign is two bytes in UTF-8.
  auto width_of = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  std::vector<std::size_t> widths(header.size(), 0);
  auto widen = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) widths[k] = std::max(widths[k], width_of(cells[k]));
  };
  widen(header);
  for (const auto& row : rows) widen(row);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const std::string fill(widths[k] - width_of(cells[k]), ' ');
      out << (k ? "  " : "") << (k ? fill + cells[k] : cells[k] + fill);
    }
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
  return out.str();
}

}  // namespace slim
