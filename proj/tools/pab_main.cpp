#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pab/best_response.hpp"
#include "pab/comparative.hpp"
#include "pab/equilibrium.hpp"
#include "pab/errors.hpp"
#include "pab/io.hpp"
#include "pab/market.hpp"

namespace {

struct GlobalOpts {
  double tol = -1.0;
  std::string out;  // "", "json" or "csv"; empty picks the per-command default
  std::uint64_t seed = 0;
  bool quiet = false;
  bool lenient = false;
};

std::string pick_format(const GlobalOpts& g, const std::string& fallback) {
  return g.out.empty() ? fallback : g.out;
}

void emit_warnings(const pab::ParsedScenario& parsed, const GlobalOpts& g) {
  if (g.quiet) return;
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << "\n";
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

pab::EquilibriumResult run_solver(const pab::Scenario& scenario,
                                  const std::string& method, double tol) {
  if (method == "closed-form") return pab::solve_quadratic_closed_form(scenario);
  if (method == "all-active") return pab::solve_all_active(scenario);
  if (method == "iterated-br") {
    auto init = pab::ActivationProfile::zeros(scenario.n());
    try {
      return pab::solve_nash_iterated_br(scenario, init, pab::Schedule::RoundRobin, tol);
    } catch (const pab::NoConvergence&) {
      return pab::solve_nash_iterated_br(scenario, init, pab::Schedule::RoundRobin, tol,
                                         10000, 0.5);
    }
  }
  // auto: closed form when it applies, otherwise iterated best response
  if (scenario.demand.is_affine() && scenario.all_quadratic()) {
    try {
      return pab::solve_quadratic_closed_form(scenario);
    } catch (const pab::HeterogeneousB&) {
    }
  }
  auto init = pab::ActivationProfile::zeros(scenario.n());
  try {
    return pab::solve_nash_iterated_br(scenario, init, pab::Schedule::RoundRobin, tol);
  } catch (const pab::NoConvergence&) {
    return pab::solve_nash_iterated_br(scenario, init, pab::Schedule::RoundRobin, tol,
                                       10000, 0.5);
  }
}

int cmd_solve(const std::string& path, const std::string& method,
              const GlobalOpts& g) {
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  const pab::Scenario& s = parsed.scenario;

  pab::EquilibriumResult r = run_solver(s, method, g.tol);
  const double tol_eff = (g.tol > 0.0) ? g.tol : 1e-8 * s.p_hat();
  const double epsilon = (r.method == pab::SolveMethod::IteratedBR)
                             ? 10.0 * tol_eff * s.p_hat() * s.lipschitz_k
                             : 1e-8 * s.p_hat() * s.p_hat() * s.lipschitz_k;
  pab::NashReport nash = pab::verify_nash(s, r.x_star, epsilon);

  std::string text = (pick_format(g, "json") == "csv")
                         ? pab::equilibrium_to_csv(r)
                         : pab::equilibrium_to_json(r, nash.is_epsilon_nash,
                                                    nash.worst_gain, epsilon);
  std::cout << text;
  return nash.is_epsilon_nash ? 0 : 2;
}

int cmd_limit(const std::string& path, const GlobalOpts& g) {
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  pab::LimitResult r = pab::limit_equilibrium(parsed.scenario);
  std::cout << ((pick_format(g, "json") == "csv") ? pab::limit_to_csv(r)
                                                  : pab::limit_to_json(r));
  return 0;
}

int cmd_compare(const std::string& path, int ensemble, const GlobalOpts& g) {
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  const pab::Scenario& s = parsed.scenario;

  if (ensemble > 0) {
    double c_lo = s.costs.front().c(), c_hi = c_lo;
    for (const auto& c : s.costs) {
      c_lo = std::min(c_lo, c.c());
      c_hi = std::max(c_hi, c.c());
    }
    std::mt19937_64 rng(g.seed);
    std::string out = "sample,p_sfe,p_infinity,d_r,orderings_hold\n";
    for (int t = 0; t < ensemble; ++t) {
      std::vector<pab::CostModel> costs;
      for (std::size_t i = 0; i < s.n(); ++i)
        costs.push_back(pab::CostModel::quadratic(0.0, c_lo + (c_hi - c_lo) * uniform01(rng)));
      pab::Scenario draw(std::move(costs), s.demand, s.lipschitz_k);
      pab::ComparisonReport rep = pab::ordering_report(draw);
      bool all_hold = true;
      for (const auto& o : rep.orderings) all_hold = all_hold && o.holds;
      out += std::to_string(t) + "," + pab::fmt12(rep.p_sfe) + "," +
             pab::fmt12(rep.p_pab_infinity) + "," + pab::fmt12(rep.d_r) + "," +
             (all_hold ? "1" : "0") + "\n";
    }
    std::cout << out;
    return 0;
  }

  pab::ComparisonReport rep = pab::ordering_report(s);
  std::cout << ((pick_format(g, "json") == "csv") ? pab::comparison_to_csv(rep)
                                                  : pab::comparison_to_json(rep));
  return 0;
}

std::vector<double> parse_k_list(const std::string& arg) {
  std::vector<double> ks;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    ks.push_back(std::stod(item));
  }
  return ks;
}

std::vector<double> parse_k_geom(const std::string& arg) {
  double start = 0.0, stop = 0.0;
  int count = 0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(arg);
  ss >> start >> c1 >> stop >> c2 >> count;
  if (ss.fail() || c1 != ':' || c2 != ':' || count < 2 || !(start > 0.0) || !(stop > start))
    throw pab::ParseError("--k-geom expects start:stop:count with 0 < start < stop, count >= 2");
  std::vector<double> ks(count);
  for (int i = 0; i < count; ++i)
    ks[i] = start * std::pow(stop / start, static_cast<double>(i) / (count - 1));
  return ks;
}

int cmd_sweep(const std::string& path, const std::string& k_list,
              const std::string& k_geom, const GlobalOpts& g) {
  if (k_list.empty() == k_geom.empty())
    throw pab::ParseError("sweep needs exactly one of --k-list or --k-geom");
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  std::vector<double> ks = k_list.empty() ? parse_k_geom(k_geom) : parse_k_list(k_list);
  auto rows = pab::k_sweep(parsed.scenario, ks);
  std::cout << ((pick_format(g, "csv") == "json") ? pab::sweep_to_json(rows)
                                                  : pab::sweep_to_csv(rows));
  return 0;
}

int cmd_curves(const std::string& path, const std::string& profile,
               std::size_t samples, const GlobalOpts& g) {
  if (samples < 2) throw pab::ParseError("--samples must be at least 2");
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  const pab::Scenario& s = parsed.scenario;

  std::vector<double> x;
  if (profile == "from-solve") {
    x = run_solver(s, "auto", g.tol).x_star.x;
  } else {
    std::ifstream in(profile, std::ios::binary);
    if (!in) throw pab::ParseError("cannot open profile file: " + profile);
    std::ostringstream buf;
    buf << in.rdbuf();
    x = pab::parse_profile_json(buf.str());
    pab::check_profile(s, pab::ActivationProfile(x));
  }
  std::cout << pab::curves_to_csv(s, x, samples);
  return 0;
}

int cmd_validate(const std::string& path, const GlobalOpts& g) {
  auto parsed = pab::load_scenario_file(path, g.lenient);
  emit_warnings(parsed, g);
  pab::ValidationReport report = pab::validate(parsed.scenario);
  std::cout << pab::validation_to_json(report);
  return report.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz pay-as-bid auction equilibrium solver"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--tol", g.tol, "solver tolerance (default: per-solver)");
  app.add_option("--out", g.out, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "seed for randomized ensembles");
  app.add_flag("--quiet", g.quiet, "suppress warnings");
  app.add_flag("--lenient", g.lenient, "warn on unknown scenario fields instead of failing");

  std::string file, method = "auto", k_list, k_geom, profile = "from-solve";
  std::size_t samples = 101;
  int ensemble = 0;

  auto* solve = app.add_subcommand("solve", "solve for a Nash equilibrium");
  solve->add_option("file", file)->required();
  solve->add_option("--method", method, "auto|closed-form|all-active|iterated-br")
      ->check(CLI::IsMember({"auto", "closed-form", "all-active", "iterated-br"}));

  auto* limit = app.add_subcommand("limit", "K -> infinity equilibrium");
  limit->add_option("file", file)->required();

  auto* compare = app.add_subcommand("compare", "Cournot/Bertrand/SFE baselines");
  compare->add_option("file", file)->required();
  compare->add_option("--ensemble", ensemble, "emit N random redraws of the cost vector");

  auto* sweep = app.add_subcommand("sweep", "closed form across K values");
  sweep->add_option("file", file)->required();
  sweep->add_option("--k-list", k_list, "comma-separated K values");
  sweep->add_option("--k-geom", k_geom, "geometric K grid start:stop:count");

  auto* curves = app.add_subcommand("curves", "sampled supply and demand curves");
  curves->add_option("file", file)->required();
  curves->add_option("--profile", profile, "from-solve or a profile JSON path");
  curves->add_option("--samples", samples, "number of price samples (>= 2)");

  auto* validate = app.add_subcommand("validate", "check model assumptions");
  validate->add_option("file", file)->required();

  for (auto* sub : {solve, limit, compare, sweep, curves, validate})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(file, method, g);
    if (limit->parsed()) return cmd_limit(file, g);
    if (compare->parsed()) return cmd_compare(file, ensemble, g);
    if (sweep->parsed()) return cmd_sweep(file, k_list, k_geom, g);
    if (curves->parsed()) return cmd_curves(file, profile, samples, g);
    if (validate->parsed()) return cmd_validate(file, g);
  } catch (const pab::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pab::NewtonDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
