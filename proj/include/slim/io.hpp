#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "slim/coefset.hpp"
#include "slim/model.hpp"
#include "slim/objective.hpp"

namespace slim {

/// Coefficient-set document (see docs/coefset-format.md):
///   {"default": <domain>, "features": {"<name>": <domain>, ...}}
/// where <domain> is one of
///   {"type": "integer", "max": 10, "sign": "free"|"pos"|"neg"}
///   {"type": "significant_digits", "digits": 1|2, "exponent_min": -3, "exponent_max": 2}
///   {"type": "set", "values": [0, 1, -1, 0.5]}
/// optionally with "tiers": [{"cost": 0.01, "values": [...]}, ...].
/// A missing default means integers in [-100, 100].
CoefficientSet parse_coefset(const nlohmann::json& doc, const std::vector<std::string>& feature_names);
CoefficientSet load_coefset(const std::string& path, const std::vector<std::string>& feature_names);
nlohmann::json coefset_to_json(const CoefficientSet& s, const std::vector<std::string>& feature_names);

CoefficientDomain parse_domain(const nlohmann::json& doc);
nlohmann::json domain_to_json(const CoefficientDomain& d);

/// {"features": [{"name", "coef"}], "intercept": v, "meta": {...}}. Features
/// exclude the intercept; `extra_meta` entries are merged into "meta".
nlohmann::json model_to_json(const ScoringSystem& m, const nlohmann::json& extra_meta = nlohmann::json::object());
ScoringSystem model_from_json(const nlohmann::json& doc);
void save_model(const ScoringSystem& m, const std::string& path,
                const nlohmann::json& extra_meta = nlohmann::json::object());
ScoringSystem load_model(const std::string& path);

/// Stable text form of a JSON document (sorted keys, two-space indent, trailing newline).
std::string canonical_dump(const nlohmann::json& doc);

/// Exact decimal from a JSON number or numeric string.
Decimal json_decimal(const nlohmann::json& v);

}  // namespace slim
