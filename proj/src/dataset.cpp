#include "slim/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "slim/decimal.hpp"
#include "slim/errors.hpp"

namespace slim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Uniform integer in [0, bound) with rejection; independent of the standard
// library's distribution implementation so fold splits are portable.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

void shuffle(std::vector<Index>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features, Eigen::VectorXi labels, std::vector<std::string> feature_names,
                 std::optional<Index> intercept_index, std::string label_name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      names_(std::move(feature_names)),
      intercept_(intercept_index),
      label_name_(std::move(label_name)) {
  if (features_.rows() < 1 || features_.cols() < 1) throw EmptyDataError("dataset needs N >= 1 and P >= 1");
  if (labels_.size() != features_.rows()) throw ArgumentError("label count does not match row count");
  if (static_cast<Index>(names_.size()) != features_.cols())
    throw ArgumentError("feature name count does not match column count");
  for (Index i = 0; i < labels_.size(); ++i)
    if (labels_(i) != 1 && labels_(i) != -1)
      throw LabelError("label at row " + std::to_string(i) + " is " + std::to_string(labels_(i)) +
                       ", expected -1 or +1");
  if (!features_.allFinite()) throw ArgumentError("feature matrix contains NaN or infinity");
  if (intercept_) {
    if (*intercept_ < 0 || *intercept_ >= p()) throw ArgumentError("intercept index out of range");
    if (!(features_.col(*intercept_).array() == 1.0).all())
      throw ArgumentError("intercept column '" + names_[static_cast<std::size_t>(*intercept_)] + "' is not all ones");
  }

  std::vector<Decimal> exact(static_cast<std::size_t>(features_.size()));
  for (Index k = 0; k < features_.size(); ++k) {
    exact[static_cast<std::size_t>(k)] = Decimal::from_double(features_.data()[k]);
    scale_ = std::max(scale_, exact[static_cast<std::size_t>(k)].scale);
  }
  if (scale_ > Decimal::kMaxScale)
    throw ArgumentError("feature values need more than " + std::to_string(Decimal::kMaxScale) + " decimal digits");
  scaled_.resize(features_.rows(), features_.cols());
  for (Index k = 0; k < features_.size(); ++k) scaled_.data()[k] = exact[static_cast<std::size_t>(k)].scaled_to(scale_);
}

Index Dataset::positives() const { return (labels_.array() == 1).count(); }

std::optional<Index> Dataset::find_feature(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<Index>(it - names_.begin());
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  if (rows.empty()) throw EmptyDataError("empty row subset");
  Eigen::MatrixXd x(static_cast<Index>(rows.size()), p());
  Eigen::VectorXi y(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= n()) throw ArgumentError("row index out of range");
    x.row(static_cast<Index>(r)) = features_.row(rows[r]);
    y(static_cast<Index>(r)) = labels_(rows[r]);
  }
  return Dataset(std::move(x), std::move(y), names_, intercept_, label_name_);
}

std::uint64_t Dataset::fingerprint() const {
  std::ostringstream os;
  write_csv(*this, os);
  return fnv1a(os.str());
}

Dataset read_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header row");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  const auto label_it = std::find(header.begin(), header.end(), options.label_column);
  if (label_it == header.end()) throw ParseError("label column '" + options.label_column + "' not found in header");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());

  std::vector<bool> categorical(header.size(), false);
  for (const auto& name : options.categorical_columns) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("categorical column '" + name + "' not found in header");
    categorical[static_cast<std::size_t>(it - header.begin())] = true;
  }

  // Raw cells, row-major; missing cells recorded as nullopt.
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    for (auto& c : cells) c = trim(c);
    rows.push_back(std::move(cells));
  }

  // Labels first: rows with a missing label are always dropped.
  std::vector<int> labels;
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cell = rows[r][label_col];
    if (is_missing(cell)) continue;
    Decimal v;
    try {
      v = Decimal::parse(cell);
    } catch (const ParseError&) {
      throw LabelError("row " + std::to_string(r + 1) + ": label '" + cell + "' is not numeric");
    }
    int y = 0;
    if (v == Decimal::from_int(1)) y = 1;
    else if (v == Decimal::from_int(0) || v == Decimal::from_int(-1)) y = -1;
    else throw LabelError("row " + std::to_string(r + 1) + ": label '" + cell + "' is outside {0,1,-1,+1}");
    labels.push_back(y);
    kept.push_back(r);
  }

  // Output columns: numeric columns keep their name, categorical ones expand.
  struct OutColumn {
    std::size_t source;
    std::optional<std::string> level;
    std::string name;
  };
  std::vector<OutColumn> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col) continue;
    if (!categorical[c]) {
      columns.push_back({c, std::nullopt, header[c]});
      continue;
    }
    std::vector<std::string> levels;
    for (std::size_t r : kept)
      if (!is_missing(rows[r][c])) levels.push_back(rows[r][c]);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (const auto& level : levels) columns.push_back({c, level, header[c] + "=" + level});
  }

  const std::size_t ncol = columns.size();
  std::vector<std::vector<std::optional<double>>> values(kept.size(), std::vector<std::optional<double>>(ncol));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& row = rows[kept[k]];
    for (std::size_t j = 0; j < ncol; ++j) {
      const auto& col = columns[j];
      const auto& cell = row[col.source];
      if (is_missing(cell)) continue;
      if (col.level) {
        values[k][j] = (cell == *col.level) ? 1.0 : 0.0;
        continue;
      }
      try {
        values[k][j] = Decimal::parse(cell).to_double();
      } catch (const ParseError&) {
        throw ParseError("row " + std::to_string(kept[k] + 1) + ", column '" + header[col.source] +
                         "': cannot parse '" + cell + "' as a number");
      }
    }
  }

  std::vector<std::size_t> final_rows;
  if (options.missing_policy == MissingPolicy::kDrop) {
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (std::all_of(values[k].begin(), values[k].end(), [](const auto& v) { return v.has_value(); }))
        final_rows.push_back(k);
  } else {
    for (std::size_t j = 0; j < ncol; ++j) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& row : values)
        if (row[j]) {
          sum += *row[j];
          ++count;
        }
      // Rounded to 6 decimals so the imputed value has an exact decimal image.
      const double mean = count ? std::round(sum / static_cast<double>(count) * 1e6) / 1e6 : 0.0;
      for (auto& row : values)
        if (!row[j]) row[j] = mean;
    }
    final_rows.resize(kept.size());
    std::iota(final_rows.begin(), final_rows.end(), std::size_t{0});
  }
  if (final_rows.empty()) throw EmptyDataError("no rows left after handling missing values");

  std::vector<std::string> names;
  std::optional<Index> intercept;
  for (std::size_t j = 0; j < ncol; ++j) {
    names.push_back(columns[j].name);
    if (columns[j].name == kInterceptName) intercept = static_cast<Index>(j);
  }
  const Index offset = (options.add_intercept && !intercept) ? 1 : 0;
  if (offset) {
    names.insert(names.begin(), kInterceptName);
    intercept = 0;
  }

  Eigen::MatrixXd x(static_cast<Index>(final_rows.size()), static_cast<Index>(ncol) + offset);
  Eigen::VectorXi y(static_cast<Index>(final_rows.size()));
  for (std::size_t r = 0; r < final_rows.size(); ++r) {
    const auto k = final_rows[r];
    if (offset) x(static_cast<Index>(r), 0) = 1.0;
    for (std::size_t j = 0; j < ncol; ++j) x(static_cast<Index>(r), static_cast<Index>(j) + offset) = *values[k][j];
    y(static_cast<Index>(r)) = labels[k];
  }
  return Dataset(std::move(x), std::move(y), std::move(names), intercept, options.label_column);
}

Dataset load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  return read_csv(in, options);
}

void write_csv(const Dataset& d, std::ostream& out) {
  for (const auto& name : d.feature_names()) out << csv_quote(name) << ',';
  out << csv_quote(d.label_name()) << '\n';
  for (Index i = 0; i < d.n(); ++i) {
    for (Index j = 0; j < d.p(); ++j) out << format_double(d.features()(i, j)) << ',';
    out << (d.labels()(i) == 1 ? 1 : 0) << '\n';
  }
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  write_csv(d, out);
}

std::vector<Index> FoldAssignment::members(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index> FoldAssignment::complement(int fold) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(static_cast<Index>(i));
  return out;
}

FoldAssignment split_folds(const Dataset& d, int k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw ArgumentError("fold count must be at least 2");
  if (k > d.n()) throw ArgumentError("fold count " + std::to_string(k) + " exceeds N = " + std::to_string(d.n()));

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Index>> groups;
  if (stratified) {
    groups.resize(2);
    for (Index i = 0; i < d.n(); ++i) groups[d.labels()(i) == 1 ? 0 : 1].push_back(i);
  } else {
    groups.resize(1);
    for (Index i = 0; i < d.n(); ++i) groups[0].push_back(i);
  }

  FoldAssignment out{std::vector<int>(static_cast<std::size_t>(d.n()), 0), k, seed, stratified};
  // Round-robin continues across groups so fold sizes differ by at most one.
  int next = 0;
  for (auto& g : groups) {
    shuffle(g, rng);
    for (Index i : g) {
      out.fold_of[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % k;
    }
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return s;
}

}  // namespace slim
