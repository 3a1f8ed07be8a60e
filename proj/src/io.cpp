#include "pab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pab/errors.hpp"

namespace pab {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                    const std::string& where, bool lenient,
                    std::vector<std::string>& warnings) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& key : allowed)
      if (it.key() == key) known = true;
    if (!known) {
      std::string msg = "unknown field \"" + it.key() + "\" in " + where;
      if (lenient)
        warnings.push_back(msg);
      else
        throw ParseError(msg);
    }
  }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw ParseError("missing or non-numeric \"" + key + "\" in " + where);
  return obj[key].get<double>();
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += "\"";
  return out;
}

std::string num_array(const std::vector<double>& v) {
  std::vector<std::string> parts;
  parts.reserve(v.size());
  for (double x : v) parts.push_back(fmt12(x));
  return "[" + join(parts, ", ") + "]";
}

std::string index_array(const std::vector<std::size_t>& v) {
  std::vector<std::string> parts;
  parts.reserve(v.size());
  for (std::size_t x : v) parts.push_back(std::to_string(x));
  return "[" + join(parts, ", ") + "]";
}

std::string csv_header(const std::string& prefix, std::size_t n) {
  std::vector<std::string> parts;
  for (std::size_t i = 1; i <= n; ++i) parts.push_back(prefix + "_" + std::to_string(i));
  return join(parts, ",");
}

std::string csv_values(const std::vector<double>& v) {
  std::vector<std::string> parts;
  parts.reserve(v.size());
  for (double x : v) parts.push_back(fmt12(x));
  return join(parts, ",");
}

}  // namespace

std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ParsedScenario parse_scenario_json(const std::string& text, bool lenient) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("scenario file must be a JSON object");

  std::vector<std::string> warnings;
  reject_unknown(j, {"schema_version", "demand", "producers", "k", "labels"},
                 "scenario", lenient, warnings);

  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != 1)
    throw ParseError("schema_version must be the integer 1");

  if (!j.contains("demand") || !j["demand"].is_object())
    throw ParseError("missing \"demand\" object");
  const json& dj = j["demand"];
  if (!dj.contains("type") || !dj["type"].is_string())
    throw ParseError("demand.type must be \"affine\" or \"polynomial\"");
  const std::string type = dj["type"].get<std::string>();

  DemandModel demand = DemandModel::affine(1.0, 1.0);
  if (type == "affine") {
    reject_unknown(dj, {"type", "gamma", "p_hat"}, "demand", lenient, warnings);
    demand = DemandModel::affine(require_number(dj, "gamma", "demand"),
                                 require_number(dj, "p_hat", "demand"));
  } else if (type == "polynomial") {
    reject_unknown(dj, {"type", "coeffs"}, "demand", lenient, warnings);
    if (!dj.contains("coeffs") || !dj["coeffs"].is_array())
      throw ParseError("polynomial demand needs a \"coeffs\" array");
    std::vector<double> coeffs;
    for (const auto& c : dj["coeffs"]) {
      if (!c.is_number()) throw ParseError("demand coefficients must be numbers");
      coeffs.push_back(c.get<double>());
    }
    demand = DemandModel::polynomial(std::move(coeffs));
  } else {
    throw ParseError("unsupported demand type \"" + type + "\"");
  }

  if (!j.contains("producers") || !j["producers"].is_array() || j["producers"].empty())
    throw ParseError("\"producers\" must be a non-empty array");
  std::vector<CostModel> costs;
  for (const auto& pj : j["producers"]) {
    if (!pj.is_object()) throw ParseError("each producer must be an object");
    reject_unknown(pj, {"b", "c"}, "producer", lenient, warnings);
    double b = 0.0;
    if (pj.contains("b")) {
      if (!pj["b"].is_number()) throw ParseError("producer b must be a number");
      b = pj["b"].get<double>();
    }
    double c = require_number(pj, "c", "producer");
    costs.push_back(CostModel::quadratic(b, c));
  }

  double k = require_number(j, "k", "scenario");

  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) throw ParseError("\"labels\" must be an array");
    for (const auto& l : j["labels"]) {
      if (!l.is_string()) throw ParseError("labels must be strings");
      labels.push_back(l.get<std::string>());
    }
    if (labels.size() != costs.size())
      throw ParseError("labels count must match producer count");
  }

  try {
    ParsedScenario out{Scenario(std::move(costs), std::move(demand), k),
                       std::move(labels), std::move(warnings)};
    return out;
  } catch (const Error&) {
    throw;
  }
}

ParsedScenario load_scenario_file(const std::string& path, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_json(ss.str(), lenient);
}

std::string equilibrium_to_json(const EquilibriumResult& r, bool verified,
                                double worst_gain, double epsilon) {
  std::string out = "{\n";
  out += "  \"method\": " + json_string(to_string(r.method)) + ",\n";
  out += "  \"p_star\": " + fmt12(r.p_star) + ",\n";
  out += "  \"x_star\": " + num_array(r.x_star.x) + ",\n";
  out += "  \"quantities\": " + num_array(r.quantities) + ",\n";
  out += "  \"utilities\": " + num_array(r.utilities) + ",\n";
  out += "  \"active_set\": " + index_array(r.active_set) + ",\n";
  out += "  \"iterations\": " + std::to_string(r.iterations) + ",\n";
  out += "  \"residual\": " + fmt12(r.residual) + ",\n";
  out += "  \"uniqueness\": " +
         json_string(r.uniqueness_guaranteed ? "guaranteed" : "not-guaranteed") + ",\n";
  out += "  \"verified\": " + std::string(verified ? "true" : "false") + ",\n";
  out += "  \"worst_gain\": " + fmt12(worst_gain) + ",\n";
  out += "  \"epsilon\": " + fmt12(epsilon) + "\n";
  out += "}\n";
  return out;
}

std::string equilibrium_to_csv(const EquilibriumResult& r) {
  const std::size_t n = r.x_star.size();
  std::string out = "p_star," + csv_header("x", n) + "," + csv_header("q", n) + "," +
                    csv_header("u", n) + "\n";
  out += fmt12(r.p_star) + "," + csv_values(r.x_star.x) + "," +
         csv_values(r.quantities) + "," + csv_values(r.utilities) + "\n";
  return out;
}

std::string limit_to_json(const LimitResult& r) {
  std::string out = "{\n";
  out += "  \"p_infinity\": " + fmt12(r.p_infinity) + ",\n";
  out += "  \"quantities_infinity\": " + num_array(r.quantities_infinity) + ",\n";
  out += "  \"utilities_infinity\": " + num_array(r.utilities_infinity) + "\n";
  out += "}\n";
  return out;
}

std::string limit_to_csv(const LimitResult& r) {
  const std::size_t n = r.quantities_infinity.size();
  std::string out = "p_infinity," + csv_header("q", n) + "," + csv_header("u", n) + "\n";
  out += fmt12(r.p_infinity) + "," + csv_values(r.quantities_infinity) + "," +
         csv_values(r.utilities_infinity) + "\n";
  return out;
}

std::string comparison_to_json(const ComparisonReport& r) {
  std::string out = "{\n";
  out += "  \"p_sfe\": " + fmt12(r.p_sfe) + ",\n";
  out += "  \"p_pab_infinity\": " + fmt12(r.p_pab_infinity) + ",\n";
  out += "  \"d_r\": " + fmt12(r.d_r) + ",\n";
  out += "  \"sfe_slopes\": " + num_array(r.sfe_slopes) + ",\n";
  out += "  \"p_cournot\": " + (r.p_cournot ? fmt12(*r.p_cournot) : "null") + ",\n";
  out += "  \"p_bertrand_low\": " +
         (r.p_bertrand_low ? fmt12(*r.p_bertrand_low) : "null") + ",\n";
  out += "  \"p_bertrand_alpha\": [";
  for (std::size_t i = 0; i < r.p_bertrand_alpha.size(); ++i) {
    if (i) out += ", ";
    out += "[" + fmt12(r.p_bertrand_alpha[i].first) + ", " +
           fmt12(r.p_bertrand_alpha[i].second) + "]";
  }
  out += "],\n";
  out += "  \"orderings\": [\n";
  for (std::size_t i = 0; i < r.orderings.size(); ++i) {
    const auto& o = r.orderings[i];
    out += "    {\"name\": " + json_string(o.name) +
           ", \"holds\": " + (o.holds ? "true" : "false") +
           ", \"slack\": " + fmt12(o.slack) + "}";
    out += (i + 1 < r.orderings.size()) ? ",\n" : "\n";
  }
  out += "  ]\n";
  out += "}\n";
  return out;
}

std::string comparison_to_csv(const ComparisonReport& r) {
  std::string out = "p_sfe,p_infinity,d_r,p_cournot,p_bertrand_0,orderings_hold\n";
  bool all_hold = true;
  for (const auto& o : r.orderings) all_hold = all_hold && o.holds;
  out += fmt12(r.p_sfe) + "," + fmt12(r.p_pab_infinity) + "," + fmt12(r.d_r) + ",";
  out += (r.p_cournot ? fmt12(*r.p_cournot) : "") + ",";
  out += (r.p_bertrand_low ? fmt12(*r.p_bertrand_low) : "") + ",";
  out += std::string(all_hold ? "1" : "0") + "\n";
  return out;
}

std::string sweep_to_csv(const std::vector<KSweepRow>& rows) {
  if (rows.empty()) return "";
  const std::size_t n = rows.front().x_star.size();
  std::string out = "k,p_star," + csv_header("x", n) + "," + csv_header("q", n) + "\n";
  for (const auto& row : rows) {
    out += fmt12(row.k) + "," + fmt12(row.p_star) + "," + csv_values(row.x_star) +
           "," + csv_values(row.quantities) + "\n";
  }
  return out;
}

std::string sweep_to_json(const std::vector<KSweepRow>& rows) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    out += "  {\"k\": " + fmt12(row.k) + ", \"p_star\": " + fmt12(row.p_star) +
           ", \"x_star\": " + num_array(row.x_star) +
           ", \"quantities\": " + num_array(row.quantities) + "}";
    out += (i + 1 < rows.size()) ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::string curves_to_csv(const Scenario& scenario, const std::vector<double>& x,
                          std::size_t samples) {
  const std::size_t n = scenario.n();
  const double p_hat = scenario.p_hat();
  const double k = scenario.lipschitz_k;
  std::string out = "p," + csv_header("S", n) + ",D\n";
  for (std::size_t s = 0; s < samples; ++s) {
    double p = std::min(
        p_hat, p_hat * (static_cast<double>(s) / static_cast<double>(samples - 1)));
    out += fmt12(p);
    for (std::size_t i = 0; i < n; ++i) {
      double si = (p > x[i]) ? k * (p - x[i]) : 0.0;
      out += "," + fmt12(si);
    }
    out += "," + fmt12(scenario.demand.eval(p)) + "\n";
  }
  return out;
}

std::string validation_to_json(const ValidationReport& r) {
  std::string out = "{\n";
  out += "  \"ok\": " + std::string(r.ok ? "true" : "false") + ",\n";
  out += "  \"p_hat\": " + fmt12(r.p_hat) + ",\n";
  out += "  \"violations\": [";
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    if (i) out += ", ";
    out += json_string(r.violations[i]);
  }
  out += "]\n";
  out += "}\n";
  return out;
}

std::vector<double> parse_profile_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid profile JSON: ") + e.what());
  }
  const char* key = nullptr;
  if (j.is_object() && j.contains("x_star") && j["x_star"].is_array()) key = "x_star";
  else if (j.is_object() && j.contains("x") && j["x"].is_array()) key = "x";
  if (!key) throw ParseError("profile JSON needs an \"x_star\" or \"x\" array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ParseError("profile entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace pab
