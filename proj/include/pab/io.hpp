#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pab/comparative.hpp"
#include "pab/equilibrium.hpp"
#include "pab/market.hpp"
#include "pab/scenario.hpp"

namespace pab {

// Scenario file schema v1:
//   {
//     "schema_version": 1,
//     "demand": {"type": "affine", "gamma": g, "p_hat": ph}
//             | {"type": "polynomial", "coeffs": [c0, c1, ...]},
//     "producers": [{"b": 0.0, "c": 0.5}, ...],   // b optional, default 0
//     "k": 1.0,
//     "labels": ["g1", ...]                       // optional
//   }
// Unknown fields are rejected in strict mode and warned about when lenient.
struct ParsedScenario {
  Scenario scenario;
  std::vector<std::string> labels;
  std::vector<std::string> warnings;
};

ParsedScenario parse_scenario_json(const std::string& text, bool lenient = false);
ParsedScenario load_scenario_file(const std::string& path, bool lenient = false);

// Fixed float formatting used by every CLI emitter: 12 significant digits,
// "." decimal separator, no locale dependence.
std::string fmt12(double v);

// Output builders (all lines end in "\n"; byte-deterministic).
std::string equilibrium_to_json(const EquilibriumResult& r, bool verified,
                                double worst_gain, double epsilon);
std::string equilibrium_to_csv(const EquilibriumResult& r);
std::string limit_to_json(const LimitResult& r);
std::string limit_to_csv(const LimitResult& r);
std::string comparison_to_json(const ComparisonReport& r);
std::string comparison_to_csv(const ComparisonReport& r);
std::string sweep_to_csv(const std::vector<KSweepRow>& rows);
std::string sweep_to_json(const std::vector<KSweepRow>& rows);
std::string curves_to_csv(const Scenario& scenario, const std::vector<double>& x,
                          std::size_t samples);
std::string validation_to_json(const ValidationReport& r);

// Reads an activation profile back from a solve JSON output ("x_star") or a
// bare {"x": [...]} object.
std::vector<double> parse_profile_json(const std::string& text);

}  // namespace pab
