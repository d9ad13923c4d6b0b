#include "slim/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "slim/errors.hpp"

namespace slim {

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::int64_t json_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ArgumentError(std::string("domain is missing \"") + key + "\"");
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) throw ArgumentError(std::string("\"") + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

std::vector<Decimal> json_values(const json& arr) {
  if (!arr.is_array()) throw ArgumentError("\"values\" must be an array");
  std::vector<Decimal> out;
  for (const auto& v : arr) out.push_back(json_decimal(v));
  return out;
}

const char* sign_text(Sign s) {
  switch (s) {
    case Sign::kPositive:
      return "pos";
    case Sign::kNegative:
      return "neg";
    case Sign::kFree:
      return "free";
  }
  return "free";
}

json decimal_json(const Decimal& d) {
  if (d.is_integer()) return d.mantissa;
  return d.to_double();
}

}  // namespace

Decimal json_decimal(const json& v) {
  if (v.is_string()) return Decimal::parse(v.get<std::string>());
  if (v.is_number_integer()) return Decimal::from_int(v.get<std::int64_t>());
  if (v.is_number_float()) return Decimal::from_double(v.get<double>());
  throw ArgumentError("expected a number, got " + v.dump());
}

CoefficientDomain parse_domain(const json& doc) {
  if (!doc.is_object() || !doc.contains("type")) throw ArgumentError("domain must be an object with a \"type\"");
  const auto type = doc.at("type").get<std::string>();
  if (type == "integer") {
    Sign sign = Sign::kFree;
    if (doc.contains("sign")) {
      const auto s = doc.at("sign").get<std::string>();
      if (s == "pos") sign = Sign::kPositive;
      else if (s == "neg") sign = Sign::kNegative;
      else if (s != "free") throw ArgumentError("sign must be pos, neg or free, got '" + s + "'");
    }
    const auto max = json_int(doc, "max");
    return sign == Sign::kFree ? CoefficientDomain::bounded_integer(max) : CoefficientDomain::signed_integer(sign, max);
  }
  if (type == "significant_digits") {
    return CoefficientDomain::significant_digits(static_cast<int>(json_int(doc, "digits")),
                                                 static_cast<int>(json_int(doc, "exponent_min")),
                                                 static_cast<int>(json_int(doc, "exponent_max")));
  }
  if (type == "set") {
    if (!doc.contains("values")) throw ArgumentError("set domain is missing \"values\"");
    return CoefficientDomain::explicit_set(json_values(doc.at("values")));
  }
  throw ArgumentError("unknown domain type '" + type + "'");
}

json domain_to_json(const CoefficientDomain& d) {
  json out;
  switch (d.kind()) {
    case DomainKind::kBoundedInteger:
      out = {{"type", "integer"}, {"max", d.bound()}};
      break;
    case DomainKind::kSignedBoundedInteger:
      out = {{"type", "integer"}, {"max", d.bound()}, {"sign", sign_text(d.sign())}};
      break;
    case DomainKind::kSignificantDigits:
      out = {{"type", "significant_digits"},
             {"digits", d.digits()},
             {"exponent_min", d.exponent_min()},
             {"exponent_max", d.exponent_max()}};
      break;
    case DomainKind::kExplicitSet: {
      json values = json::array();
      for (const auto& v : d.values()) values.push_back(decimal_json(v));
      out = {{"type", "set"}, {"values", values}};
      break;
    }
  }
  return out;
}

CoefficientSet parse_coefset(const json& doc, const std::vector<std::string>& feature_names) {
  if (!doc.is_object()) throw ArgumentError("coefficient set document must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (key != "default" && key != "features") throw ArgumentError("unknown coefficient set key '" + key + "'");
  const json default_doc = doc.contains("default") ? doc.at("default") : json{{"type", "integer"}, {"max", 100}};
  const json features = doc.contains("features") ? doc.at("features") : json::object();
  if (!features.is_object()) throw ArgumentError("\"features\" must be an object");
  for (const auto& [name, _] : features.items())
    if (std::find(feature_names.begin(), feature_names.end(), name) == feature_names.end())
      throw ArgumentError("coefficient set names unknown feature '" + name + "'");

  std::vector<CoefficientDomain> domains;
  std::vector<const json*> sources;
  for (const auto& name : feature_names) {
    const json& src = features.contains(name) ? features.at(name) : default_doc;
    try {
      domains.push_back(parse_domain(src));
    } catch (const ArgumentError& e) {
      throw ArgumentError("feature '" + name + "': " + e.what());
    }
    sources.push_back(&src);
  }
  CoefficientSet set(std::move(domains));
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const json& src = *sources[j];
    if (!src.contains("tiers")) continue;
    std::vector<Tier> tiers;
    for (const auto& t : src.at("tiers")) {
      if (!t.contains("cost") || !t.contains("values")) throw ArgumentError("tier needs \"cost\" and \"values\"");
      tiers.push_back({json_values(t.at("values")), t.at("cost").get<double>()});
    }
    try {
      set.set_tiers(static_cast<Index>(j), std::move(tiers));
    } catch (const ArgumentError& e) {
      throw ArgumentError("feature '" + feature_names[j] + "': " + e.what());
    }
  }
  return set;
}

CoefficientSet load_coefset(const std::string& path, const std::vector<std::string>& feature_names) {
  return parse_coefset(read_json_file(path), feature_names);
}

json coefset_to_json(const CoefficientSet& s, const std::vector<std::string>& feature_names) {
  if (static_cast<Index>(feature_names.size()) != s.p()) throw ArgumentError("feature name count mismatch");
  json features = json::object();
  for (Index j = 0; j < s.p(); ++j) {
    json d = domain_to_json(s.domain(j));
    if (!s.tiers(j).empty()) {
      json tiers = json::array();
      for (const auto& t : s.tiers(j)) {
        json values = json::array();
        for (const auto& v : t.values) values.push_back(decimal_json(v));
        tiers.push_back({{"cost", t.cost}, {"values", values}});
      }
      d["tiers"] = tiers;
    }
    features[feature_names[static_cast<std::size_t>(j)]] = d;
  }
  return {{"features", features}};
}

json model_to_json(const ScoringSystem& m, const json& extra_meta) {
  json features = json::array();
  for (Index j = 0; j < m.size(); ++j) {
    if (m.intercept_index && *m.intercept_index == j) continue;
    features.push_back({{"name", m.feature_names.at(static_cast<std::size_t>(j))}, {"coef", m.coefficients(j)}});
  }
  json meta = {{"config_hash", m.provenance.config_hash},
               {"dataset_hash", m.provenance.dataset_hash},
               {"status", m.provenance.solve_status}};
  if (m.intercept_index) {
    meta["intercept_index"] = *m.intercept_index;
    meta["intercept_name"] = m.feature_names.at(static_cast<std::size_t>(*m.intercept_index));
  }
  for (const auto& [k, v] : extra_meta.items()) meta[k] = v;
  return {{"features", features}, {"intercept", m.intercept()}, {"meta", meta}};
}

ScoringSystem model_from_json(const json& doc) {
  try {
    ScoringSystem m;
    const auto& meta = doc.contains("meta") ? doc.at("meta") : json::object();
    std::vector<std::pair<std::string, double>> feats;
    for (const auto& f : doc.at("features")) feats.emplace_back(f.at("name").get<std::string>(), f.at("coef").get<double>());
    std::optional<Index> icpt;
    if (meta.contains("intercept_index")) icpt = meta.at("intercept_index").get<Index>();
    const double intercept = doc.contains("intercept") ? doc.at("intercept").get<double>() : 0.0;
    if (!icpt && intercept != 0.0) icpt = 0;
    const Index p = static_cast<Index>(feats.size()) + (icpt ? 1 : 0);
    if (icpt && (*icpt < 0 || *icpt >= p)) throw ParseError("intercept_index out of range");
    m.coefficients = Eigen::VectorXd::Zero(p);
    std::size_t f = 0;
    for (Index j = 0; j < p; ++j) {
      if (icpt && j == *icpt) {
        m.coefficients(j) = intercept;
        m.feature_names.push_back(meta.value("intercept_name", std::string(kInterceptName)));
      } else {
        m.coefficients(j) = feats[f].second;
        m.feature_names.push_back(feats[f].first);
        ++f;
      }
    }
    m.intercept_index = icpt;
    m.provenance.config_hash = meta.value("config_hash", "");
    m.provenance.dataset_hash = meta.value("dataset_hash", "");
    m.provenance.solve_status = meta.value("status", "");
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
}

std::string canonical_dump(const json& doc) { return doc.dump(2) + "\n"; }

void save_model(const ScoringSystem& m, const std::string& path, const json& extra_meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << canonical_dump(model_to_json(m, extra_meta));
  if (!out) throw Error("failed writing '" + path + "'");
}

ScoringSystem load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace slim
