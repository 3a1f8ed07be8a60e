#include <doctest.h>

#include <cmath>

#include "pab/best_response.hpp"
#include "pab/equilibrium.hpp"
#include "pab/errors.hpp"
#include "pab/market.hpp"
#include "test_util.hpp"

using namespace pab;
using namespace testutil;

namespace {

Scenario linear_example(double c3 = 3.0, double k = 1.0) {
  return Scenario({CostModel::quadratic(0.0, 0.5), CostModel::quadratic(0.0, 2.0),
                   CostModel::quadratic(0.0, c3)},
                  DemandModel::affine(1.0, 10.0), k);
}

Scenario nonlinear_example(double b3) {
  return Scenario({CostModel::quadratic(0.5, 0.5), CostModel::quadratic(1.0, 4.0),
                   CostModel::quadratic(b3, 0.5)},
                  DemandModel::polynomial({10.0, -1.0, -0.2}), 1.0);
}

double max_coord_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("closed form reproduces the three-producer affine benchmark") {
  auto r = solve_quadratic_closed_form(linear_example());
  CHECK(r.p_star == doctest::Approx(4.8164).epsilon(1e-4));
  CHECK(r.x_star[0] == doctest::Approx(2.1893).epsilon(1e-4));
  CHECK(r.x_star[1] == doctest::Approx(3.3715).epsilon(1e-4));
  CHECK(r.x_star[2] == doctest::Approx(3.7050).epsilon(1e-4));
  CHECK(r.residual <= 1e-10);
  // conservation: quantities sum to demand at the clearing price
  double q = r.quantities[0] + r.quantities[1] + r.quantities[2];
  CHECK(q == doctest::Approx(10.0 - r.p_star).epsilon(1e-12));
}

TEST_CASE("closed form with one very expensive producer") {
  auto r = solve_quadratic_closed_form(linear_example(100.0));
  CHECK(r.p_star == doctest::Approx(5.39).epsilon(2e-3));
  CHECK(r.x_star[0] == doctest::Approx(2.45).epsilon(2e-3));
  CHECK(r.x_star[1] == doctest::Approx(3.77).epsilon(2e-3));
  CHECK(r.x_star[2] == doctest::Approx(5.34).epsilon(2e-3));
  CHECK(r.active_set.size() == 3);  // b = 0 keeps everyone active
}

TEST_CASE("closed form at K = 100 pushes activation prices toward p*") {
  auto r = solve_quadratic_closed_form(linear_example(3.0, 100.0));
  CHECK(r.p_star == doctest::Approx(2.65266).epsilon(1e-4));
  CHECK(r.x_star[0] == doctest::Approx(2.60115).epsilon(1e-4));
  CHECK(r.x_star[1] == doctest::Approx(2.63949).epsilon(1e-4));
  CHECK(r.x_star[2] == doctest::Approx(2.64386).epsilon(1e-4));
}

TEST_CASE("closed form rejects unsupported scenarios") {
  Scenario poly({CostModel::quadratic(0.0, 1.0)},
                DemandModel::polynomial({10.0, -1.0, -0.2}), 1.0);
  CHECK_THROWS_AS(solve_quadratic_closed_form(poly), NotAffine);

  Scenario hetero({CostModel::quadratic(0.0, 1.0), CostModel::quadratic(1.0, 1.0)},
                  DemandModel::affine(1.0, 10.0), 1.0);
  CHECK_THROWS_AS(solve_quadratic_closed_form(hetero), HeterogeneousB);

  Scenario general({CostModel::general([](double q) { return q * q; },
                                       [](double q) { return 2.0 * q; },
                                       [](double) { return 2.0; })},
                   DemandModel::affine(1.0, 10.0), 1.0);
  CHECK_THROWS_AS(solve_quadratic_closed_form(general), NotQuadratic);
}

TEST_CASE("closed form handles b = p_hat gracefully: nobody trades") {
  Scenario s({CostModel::quadratic(10.0, 1.0), CostModel::quadratic(10.0, 2.0)},
             DemandModel::affine(1.0, 10.0), 1.0);
  auto r = solve_quadratic_closed_form(s);
  CHECK(r.p_star == doctest::Approx(10.0));
  CHECK(r.quantities[0] == 0.0);
  CHECK(r.quantities[1] == 0.0);
  CHECK(r.active_set.empty());
}

TEST_CASE("all-active Newton agrees with the closed form") {
  Rng rng(31);
  for (int t = 0; t < 60; ++t) {
    Scenario s = random_affine_quadratic(rng);
    auto cf = solve_quadratic_closed_form(s);
    auto aa = solve_all_active(s);
    CHECK(max_coord_diff(cf.x_star.x, aa.x_star.x) <= 1e-8);
    CHECK(aa.residual <= 1e-10);
  }
}

TEST_CASE("all-active with symmetric producers is symmetric") {
  Scenario s({CostModel::quadratic(1.0, 2.0), CostModel::quadratic(1.0, 2.0),
              CostModel::quadratic(1.0, 2.0), CostModel::quadratic(1.0, 2.0)},
             DemandModel::affine(2.0, 8.0), 3.0);
  auto r = solve_all_active(s);
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(r.x_star[i] == doctest::Approx(r.x_star[0]).epsilon(1e-12));
}

TEST_CASE("all-active accepts general convex costs with a common b") {
  auto cubic = [](double b) {
    return CostModel::general(
        [b](double q) { return b * q + 0.5 * q * q + q * q * q / 6.0; },
        [b](double q) { return b + q + 0.5 * q * q; },
        [](double q) { return 1.0 + q; });
  };
  Scenario s({cubic(0.5), cubic(0.5)}, DemandModel::affine(1.0, 6.0), 1.0);
  auto aa = solve_all_active(s);
  auto br = solve_nash_iterated_br(s, ActivationProfile::zeros(2));
  CHECK(max_coord_diff(aa.x_star.x, br.x_star.x) <= 1e-6);
  CHECK(verify_nash(s, aa.x_star, 1e-7).is_epsilon_nash);
}

TEST_CASE("iterated best response matches the closed form for n = 1") {
  Scenario s({CostModel::quadratic(0.3, 2.0)}, DemandModel::affine(1.5, 8.0), 2.0);
  auto br = solve_nash_iterated_br(s, ActivationProfile::zeros(1));
  auto cf = solve_quadratic_closed_form(s);
  CHECK(std::abs(br.x_star[0] - cf.x_star[0]) <= 1e-7);
  CHECK(br.p_star == doctest::Approx(cf.p_star).epsilon(1e-7));
}

TEST_CASE("iterated best response on the concave-demand example verifies") {
  auto r = solve_nash_iterated_br(nonlinear_example(2.0), ActivationProfile::zeros(3));
  CHECK(verify_nash(nonlinear_example(2.0), r.x_star, 1e-8).is_epsilon_nash);
  // Same fixed point from the opposite extreme.
  auto r2 = solve_nash_iterated_br(nonlinear_example(2.0),
                                   ActivationProfile::constant(3, 5.0));
  CHECK(max_coord_diff(r.x_star.x, r2.x_star.x) <= 1e-6);
  // Jacobi schedule lands on the same equilibrium.
  auto r3 = solve_nash_iterated_br(nonlinear_example(2.0), ActivationProfile::zeros(3),
                                   Schedule::Jacobi);
  CHECK(max_coord_diff(r.x_star.x, r3.x_star.x) <= 1e-6);
}

TEST_CASE("withdrawn producer leaves a continuum of equivalent equilibria") {
  // b_3 = 4.5 exceeds the two-producer clearing price, so producer 3 can stay
  // out. Anchored at the duopoly equilibrium of producers 1 and 2, every
  // activation price y3 in [duopoly p*, p_hat] supports an equilibrium.
  Scenario s = nonlinear_example(4.5);
  Scenario duo({s.costs[0], s.costs[1]}, s.demand, s.lipschitz_k);
  auto d = solve_nash_iterated_br(duo, ActivationProfile::zeros(2));
  REQUIRE(d.p_star < 4.5);
  for (double y3 : {d.p_star, 4.2, 4.5, s.p_hat()}) {
    ActivationProfile x({d.x_star[0], d.x_star[1], y3});
    CHECK(verify_nash(s, x, 1e-7).is_epsilon_nash);
  }

  // The solver itself settles the entrant exactly at the clearing price (a
  // marginal-entry equilibrium, also valid) and reports the payoff-equivalent
  // interval for the withdrawn producer.
  auto r = solve_nash_iterated_br(s, ActivationProfile::zeros(3));
  CHECK(r.quantities[2] == 0.0);
  CHECK(r.x_star[2] >= r.p_star);
  CHECK(verify_nash(s, r.x_star, 1e-7).is_epsilon_nash);
  CHECK(r.equivalent_intervals[2].first == doctest::Approx(r.p_star));
  CHECK(r.equivalent_intervals[2].second == doctest::Approx(s.p_hat()));
}

TEST_CASE("no convergence carries the last iterate") {
  Scenario s = linear_example();
  CHECK_THROWS_AS(solve_nash_iterated_br(s, ActivationProfile::zeros(3),
                                         Schedule::RoundRobin, 1e-12, 1),
                  NoConvergence);
  try {
    solve_nash_iterated_br(s, ActivationProfile::zeros(3), Schedule::RoundRobin, 1e-12, 1);
  } catch (const NoConvergence& e) {
    CHECK(e.last_iterate.size() == 3);
    CHECK(e.iterations == 1);
  }
}

TEST_CASE("two-player multiplicity regimes") {
  auto scenario = [](double c2) {
    return Scenario({CostModel::quadratic(0.0, 1.0), CostModel::quadratic(c2, 1.0)},
                    DemandModel::affine(1.0, 1.0), 1.0);
  };
  const double eps = 1e-9;

  SUBCASE("low c2: unique interior equilibrium") {
    double c2 = 0.3;
    Scenario s = scenario(c2);
    ActivationProfile star({2.0 * c2 / 15.0 + 1.0 / 3.0, 8.0 * c2 / 15.0 + 1.0 / 3.0});
    CHECK(verify_nash(s, star, eps).is_epsilon_nash);
    ActivationProfile perturbed({star[0] + 0.05, star[1]});
    CHECK_FALSE(verify_nash(s, perturbed, eps).is_epsilon_nash);
    auto r = solve_nash_iterated_br(s, ActivationProfile::zeros(2));
    CHECK(max_coord_diff(r.x_star.x, star.x) <= 1e-7);
  }

  SUBCASE("middle c2: a continuum along x1 = 2 x2 - 1") {
    double c2 = 0.73;
    Scenario s = scenario(c2);
    for (double x2 : {5.0 / 7.0, 0.72, 0.7299}) {
      ActivationProfile prof({2.0 * x2 - 1.0, x2});
      CHECK(verify_nash(s, prof, eps).is_epsilon_nash);
    }
    // the interior formula point is no longer an equilibrium here
    ActivationProfile star({2.0 * c2 / 15.0 + 1.0 / 3.0, 8.0 * c2 / 15.0 + 1.0 / 3.0});
    CHECK_FALSE(verify_nash(s, star, eps).is_epsilon_nash);
  }

  SUBCASE("high c2: union of the segment and the withdrawal family") {
    for (double c2 : {0.75, 0.9}) {
      Scenario s = scenario(c2);
      for (double x2 : {5.0 / 7.0, 0.73}) {
        ActivationProfile prof({2.0 * x2 - 1.0, x2});
        CHECK(verify_nash(s, prof, eps).is_epsilon_nash);
      }
      for (double x2 : {0.75, 0.9, 1.0}) {
        ActivationProfile prof({0.5, x2});
        CHECK(verify_nash(s, prof, eps).is_epsilon_nash);
      }
      ActivationProfile off({0.44, 0.9});
      CHECK_FALSE(verify_nash(s, off, eps).is_epsilon_nash);
    }
  }
}

TEST_CASE("rescale: identity, round trip, and clearing invariance") {
  Scenario s = linear_example(3.0, 4.0);
  ActivationProfile x({1.0, 2.0, 3.0});

  auto [same, xs] = rescale(s, x, 4.0);
  CHECK(same.lipschitz_k == 4.0);
  CHECK(same.costs[1].c() == s.costs[1].c());

  // powers of two keep the coefficient arithmetic exact
  auto [unit, xu] = rescale(s, x, 1.0);
  auto [back, xb] = rescale(unit, xu, 4.0);
  CHECK(back.costs[0].c() == s.costs[0].c());
  CHECK(back.costs[2].c() == s.costs[2].c());
  CHECK(back.demand.gamma() == s.demand.gamma());

  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    Scenario g = random_affine_quadratic(rng, 5, false, 0.25, 32.0);
    ActivationProfile p = random_profile(rng, g);
    double to_k = log_uniform(rng, 0.1, 100.0);
    auto [scaled, px] = rescale(g, p, to_k);
    CHECK(clearing_price(g, p) ==
          doctest::Approx(clearing_price(scaled, px)).epsilon(1e-10));
    // utilities scale as to_k / k
    std::size_t i = t % g.n();
    double u1 = pab_utility(g, p, i) / g.lipschitz_k;
    double u2 = pab_utility(scaled, px, i) / to_k;
    CHECK(u1 == doctest::Approx(u2).epsilon(1e-9));
  }
}

TEST_CASE("uniqueness is flagged per demand and entry-cost structure") {
  auto lin = solve_quadratic_closed_form(linear_example());
  CHECK(lin.uniqueness_guaranteed);
  Scenario hetero({CostModel::quadratic(0.0, 1.0), CostModel::quadratic(1.0, 1.0)},
                  DemandModel::affine(1.0, 10.0), 1.0);
  CHECK_FALSE(solve_nash_iterated_br(hetero, ActivationProfile::zeros(2))
                  .uniqueness_guaranteed);
  CHECK_FALSE(solve_nash_iterated_br(nonlinear_example(2.0), ActivationProfile::zeros(3))
                  .uniqueness_guaranteed);
}

TEST_CASE("verify_nash flags the zero profile and accepts the solution") {
  Scenario s = linear_example();
  auto cf = solve_quadratic_closed_form(s);
  double eps = 1e-8 * s.p_hat() * s.p_hat() * s.lipschitz_k;
  CHECK(verify_nash(s, cf.x_star, eps).is_epsilon_nash);
  auto rep = verify_nash(s, ActivationProfile::zeros(3), eps);
  CHECK_FALSE(rep.is_epsilon_nash);
  CHECK(rep.worst_gain > 0.0);
}

TEST_CASE("limit equilibrium formulas") {
  Scenario s = linear_example();
  auto lim = limit_equilibrium(s);
  CHECK(lim.p_infinity == doctest::Approx(60.0 / 23.0).epsilon(1e-14));

  // marginal cost at the limit quantity equals the limit price
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    Scenario g = random_affine_quadratic(rng);
    if (g.costs[0].b() >= g.p_hat()) continue;
    auto l = limit_equilibrium(g);
    for (std::size_t i = 0; i < g.n(); ++i) {
      CHECK(std::abs(g.costs[i].deriv(l.quantities_infinity[i]) - l.p_infinity) <= 1e-10);
    }
  }

  // b = p_hat: no trade in the limit
  Scenario flat({CostModel::quadratic(10.0, 1.0)}, DemandModel::affine(1.0, 10.0), 1.0);
  auto l0 = limit_equilibrium(flat);
  CHECK(l0.p_infinity == doctest::Approx(10.0));
  CHECK(l0.quantities_infinity[0] == 0.0);
  CHECK(l0.utilities_infinity[0] == 0.0);
}

TEST_CASE("k sweep: rows match the closed form and end in the limit") {
  Scenario s = linear_example();
  auto rows = k_sweep(s, {1.0, 100.0});
  CHECK(rows.size() == 3);
  CHECK(rows[0].p_star == doctest::Approx(4.81644).epsilon(1e-5));
  CHECK(rows[1].p_star == doctest::Approx(2.65266).epsilon(1e-5));
  CHECK(std::isinf(rows[2].k));
  CHECK(rows[2].p_star == doctest::Approx(60.0 / 23.0).epsilon(1e-12));

  auto single = k_sweep(s, {7.0});
  auto direct = solve_quadratic_closed_form(s.with_k(7.0));
  CHECK(max_coord_diff(single[0].x_star, direct.x_star.x) == 0.0);

  CHECK_THROWS_AS(k_sweep(s, {}), InvalidModel);
  CHECK_THROWS_AS(k_sweep(s, {2.0, 1.0}), InvalidModel);
}

TEST_CASE("closed-form price approaches the limit monotonically on a geometric sweep") {
  Scenario s = linear_example();
  std::vector<double> ks;
  for (int e = 0; e <= 16; ++e) ks.push_back(std::pow(2.0, e - 2));
  auto rows = k_sweep(s, ks);
  double lim = rows.back().p_star;
  for (std::size_t j = 0; j + 2 < rows.size(); ++j)
    CHECK(rows[j].p_star >= rows[j + 1].p_star - 1e-12);
  CHECK(std::abs(rows[rows.size() - 2].p_star - lim) <= 1e-3);
}

TEST_CASE("active producers are exactly those with cheap entry") {
  Rng rng(43);
  int nontrivial = 0;
  for (int t = 0; t < 120; ++t) {
    // heterogeneous b so that some producers genuinely withdraw
    int n = 2 + static_cast<int>(u01(rng) * 3.0);
    double p_hat = uniform(rng, 5.0, 15.0);
    std::vector<CostModel> costs;
    for (int i = 0; i < n; ++i)
      costs.push_back(CostModel::quadratic(uniform(rng, 0.0, 0.9 * p_hat),
                                           log_uniform(rng, 0.1, 3.0)));
    Scenario s(costs, DemandModel::affine(uniform(rng, 0.5, 2.0), p_hat), 1.0);
    auto r = solve_nash_iterated_br(s, ActivationProfile::zeros(s.n()));
    bool knife_edge = false;
    for (std::size_t i = 0; i < s.n(); ++i)
      if (std::abs(s.costs[i].marginal_at_zero() - r.p_star) < 1e-6) knife_edge = true;
    if (knife_edge) continue;
    CHECK(r.active_set == r.active_set_by_cost);
    if (r.active_set.size() < s.n()) ++nontrivial;
  }
  CHECK(nontrivial > 10);
}

TEST_CASE("raising any cost coefficient never lowers the closed-form price") {
  Rng rng(44);
  for (int t = 0; t < 200; ++t) {
    Scenario s = random_affine_quadratic(rng);
    auto base = solve_quadratic_closed_form(s);
    std::size_t i = t % s.n();
    std::vector<CostModel> costs = s.costs;
    costs[i] = CostModel::quadratic(costs[i].b(), costs[i].c() * uniform(rng, 1.0, 4.0));
    Scenario bumped(costs, s.demand, s.lipschitz_k);
    auto up = solve_quadratic_closed_form(bumped);
    CHECK(up.p_star >= base.p_star - 1e-12);
  }
}

TEST_CASE("cross-solver agreement on a randomized sample") {
  Rng rng(45);
  for (int t = 0; t < 30; ++t) {
    Scenario s = random_affine_quadratic(rng, 6);
    auto cf = solve_quadratic_closed_form(s);
    CHECK(cf.residual <= 1e-10);
    auto aa = solve_all_active(s);
    auto br = solve_nash_iterated_br(s, ActivationProfile::zeros(s.n()),
                                     Schedule::RoundRobin, 1e-10 * s.p_hat(), 40000);
    CHECK(max_coord_diff(cf.x_star.x, aa.x_star.x) <= 1e-6);
    CHECK(max_coord_diff(cf.x_star.x, br.x_star.x) <= 1e-6);
  }
}
