#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pab/scenario.hpp"

namespace pab {

enum class SolveMethod { IteratedBR, AllActive, ClosedForm };
enum class Schedule { RoundRobin, Jacobi };

std::string to_string(SolveMethod m);

struct EquilibriumResult {
  ActivationProfile x_star;
  double p_star = 0.0;
  std::vector<double> quantities;  // K*[p* - x_i]_+
  std::vector<double> utilities;
  std::vector<std::size_t> active_set;           // {i : x_i < p*}
  std::vector<std::size_t> active_set_by_cost;   // {i : C_i'(0) < p*}
  SolveMethod method = SolveMethod::ClosedForm;
  int iterations = 0;
  double residual = 0.0;
  // True for affine demand with homogeneous marginal costs at zero; with
  // heterogeneous entry costs the game can have several equilibria.
  bool uniqueness_guaranteed = false;
  // For producers selling zero, any activation price in [p*, p_hat] leaves
  // that producer's own outcome unchanged (actives carry the degenerate
  // interval [x_i, x_i]). Whether the whole profile stays an equilibrium
  // under such a move depends on the other producers' responses.
  std::vector<std::pair<double, double>> equivalent_intervals;
};

struct LimitResult {
  double p_infinity = 0.0;
  std::vector<double> quantities_infinity;
  std::vector<double> utilities_infinity;
};

struct NashReport {
  bool is_epsilon_nash = false;
  double epsilon = 0.0;
  double worst_gain = 0.0;
  std::vector<double> per_producer_gain;
  std::vector<double> best_deviation;  // best-response activation prices
};

struct KSweepRow {
  double k = 0.0;  // +infinity on the appended limit row
  double p_star = 0.0;
  std::vector<double> x_star;
  std::vector<double> quantities;
};

// Iterated best response from `init` until the largest per-coordinate change
// is at most tol (default 1e-8 * p_hat). RoundRobin updates in place within
// a sweep; Jacobi updates all coordinates against the previous sweep.
// damping in (0, 1] blends old and new coordinates. Throws NoConvergence
// (with the last iterate attached) after max_iter sweeps.
EquilibriumResult solve_nash_iterated_br(const Scenario& scenario,
                                         const ActivationProfile& init,
                                         Schedule schedule = Schedule::RoundRobin,
                                         double tol = -1.0, int max_iter = 10000,
                                         double damping = 1.0);

// Newton iteration on the first-order conditions of the all-active game
// (affine demand, quadratically continued costs for negative quantities):
//   p~ - (n + g)x_i + (n + g - 1) C_i'(K(p~ - x_i)) = 0,  g = gamma/K,
// with p~(x) = (g p_hat + sum x_j)/(n + g). Unique solution; damped steps on
// residual increase, damped fixed point as fallback.
EquilibriumResult solve_all_active(const Scenario& scenario);

// Closed form for affine demand and quadratic costs with a common b:
//   d_i = (K(n-1)+gamma) / (K c_i (n-1) + c_i gamma + n + gamma/K)
//   a_i = (K - d_i) / (K n + gamma),          Delta = sum d_i
//   p*  = (p_hat gamma + b Delta) / (gamma + Delta)
//   x*  = (n + gamma/K) p* a + (b/K) d
EquilibriumResult solve_quadratic_closed_form(const Scenario& scenario);

// K -> infinity equilibrium of the affine + quadratic (common b) game:
//   p_inf = (p_hat gamma + b sum 1/c_j) / (gamma + sum 1/c_j)
//   q_i   = (gamma/c_i) / (gamma + sum 1/c_j) * [p_hat - b]_+
//   u_i   = gamma^2 / (2 c_i (gamma + sum 1/c_j)^2) * [p_hat - b]_+^2
LimitResult limit_equilibrium(const Scenario& scenario);

// The equivalent game with Lipschitz bound to_k (demand and costs rescaled so
// clearing prices are preserved and utilities scale by to_k/K).
std::pair<Scenario, ActivationProfile> rescale(const Scenario& scenario,
                                               const ActivationProfile& x,
                                               double to_k);

// Per-producer gain from deviating to a best response; epsilon-Nash iff the
// worst gain is at most epsilon.
NashReport verify_nash(const Scenario& scenario, const ActivationProfile& x,
                       double epsilon);

// Closed-form equilibria for each K (same demand and costs), plus the limit
// row with k = +infinity.
std::vector<KSweepRow> k_sweep(const Scenario& scenario,
                               const std::vector<double>& k_values);

}  // namespace pab
