#include <doctest.h>

#include <limits>

#include "pab/errors.hpp"
#include "pab/io.hpp"

using namespace pab;

namespace {

const char* kGood = R"({
  "schema_version": 1,
  "demand": {"type": "affine", "gamma": 1.0, "p_hat": 10.0},
  "producers": [{"b": 0.0, "c": 0.5}, {"c": 2.0}],
  "k": 1.0,
  "labels": ["a", "b"]
})";

}  // namespace

TEST_CASE("scenario parsing: happy path with defaulted b") {
  auto parsed = parse_scenario_json(kGood);
  CHECK(parsed.scenario.n() == 2);
  CHECK(parsed.scenario.demand.gamma() == 1.0);
  CHECK(parsed.scenario.costs[1].b() == 0.0);
  CHECK(parsed.scenario.costs[1].c() == 2.0);
  CHECK(parsed.labels.size() == 2);
  CHECK(parsed.warnings.empty());
}

TEST_CASE("scenario parsing: strict mode rejects unknown fields, lenient warns") {
  const char* extra = R"({
    "schema_version": 1,
    "demand": {"type": "affine", "gamma": 1.0, "p_hat": 10.0},
    "producers": [{"c": 0.5, "capacity": 3.0}],
    "k": 1.0
  })";
  CHECK_THROWS_AS(parse_scenario_json(extra), ParseError);
  auto parsed = parse_scenario_json(extra, /*lenient=*/true);
  CHECK(parsed.warnings.size() == 1);
}

TEST_CASE("scenario parsing: malformed inputs") {
  CHECK_THROWS_AS(parse_scenario_json("not json"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json("{}"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"schema_version": 2})"), ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({
    "schema_version": 1,
    "demand": {"type": "affine", "gamma": 1.0, "p_hat": 10.0},
    "producers": [],
    "k": 1.0
  })"),
                  ParseError);
  CHECK_THROWS_AS(parse_scenario_json(R"({
    "schema_version": 1,
    "demand": {"type": "step"},
    "producers": [{"c": 1.0}],
    "k": 1.0
  })"),
                  ParseError);
  // invalid model values surface as model errors, still input errors upstream
  CHECK_THROWS_AS(parse_scenario_json(R"({
    "schema_version": 1,
    "demand": {"type": "affine", "gamma": 1.0, "p_hat": 10.0},
    "producers": [{"c": -1.0}],
    "k": 1.0
  })"),
                  InvalidModel);
}

TEST_CASE("label count must match producers") {
  CHECK_THROWS_AS(parse_scenario_json(R"({
    "schema_version": 1,
    "demand": {"type": "affine", "gamma": 1.0, "p_hat": 10.0},
    "producers": [{"c": 1.0}],
    "k": 1.0,
    "labels": ["a", "b"]
  })"),
                  ParseError);
}

TEST_CASE("polynomial demand in files") {
  auto parsed = parse_scenario_json(R"({
    "schema_version": 1,
    "demand": {"type": "polynomial", "coeffs": [10.0, -1.0, -0.2]},
    "producers": [{"c": 1.0}],
    "k": 1.0
  })");
  CHECK(parsed.scenario.p_hat() == doctest::Approx(5.0));
}

TEST_CASE("fmt12 pins formatting") {
  CHECK(fmt12(0.0) == "0");
  CHECK(fmt12(-0.0) == "0");
  CHECK(fmt12(4.81643651061) == "4.81643651061");
  CHECK(fmt12(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt12(1e-7) == "1e-07");
  CHECK(fmt12(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("profile JSON round trip") {
  auto x = parse_profile_json(R"({"x_star": [1.0, 2.0]})");
  CHECK(x == std::vector<double>{1.0, 2.0});
  auto y = parse_profile_json(R"({"x": [0.5]})");
  CHECK(y == std::vector<double>{0.5});
  CHECK_THROWS_AS(parse_profile_json(R"({"z": []})"), ParseError);
}

TEST_CASE("csv emitters have stable headers") {
  auto parsed = parse_scenario_json(kGood);
  std::vector<KSweepRow> rows{{1.0, 5.0, {1.0, 2.0}, {4.0, 3.0}}};
  std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("k,p_star,x_1,x_2,q_1,q_2\n", 0) == 0);
  std::string curves = curves_to_csv(parsed.scenario, {1.0, 2.0}, 2);
  CHECK(curves.rfind("p,S_1,S_2,D\n", 0) == 0);
  CHECK(curves.find("\n10,9,8,0\n") != std::string::npos);
}
