#pragma once

#include <cstdint>
#include <limits>

#include "game.hpp"

namespace ids {

struct SolverConfig {
  double gradient_tol = 1e-10;     // stop when the projected-KKT residual drops below this
  std::int64_t max_iterations = 100000;
  double backtrack_shrink = 0.5;
  double armijo = 1e-4;            // sufficient-decrease constant
  double sweep_tol = 1e-10;        // best-response sweep convergence threshold
  std::int32_t deviation_samples = 200;
  std::uint64_t seed = 0;
  double bound_slack = 0.01;       // epsilon in the best-response bound
  double lindahl_kkt_tol = 1e-6;   // residual accepted when personalizing prices
  double dynamics_step = 0.1;
  std::int64_t dynamics_round_cap = 10000;

  void validate() const;  // throws std::invalid_argument on a bad field
};

struct SocialOptimumReport {
  Vec x;
  bool converged = false;
  std::int64_t iterations = 0;
  double kkt_residual = 0.0;
  bool non_unique = false;
  // Max componentwise gap to the total-effort closed form; NaN when it does
  // not apply.
  double closed_form_gap = std::numeric_limits<double>::quiet_NaN();
};

struct EquilibriumReport {
  Vec x;
  bool converged = false;
  std::int64_t sweeps = 0;
  double max_profitable_deviation = 0.0;
  std::vector<bool> active;  // active[i] <=> x[i] > 0
  bool non_unique = false;
};

/// Unit-step projected-gradient residual of the social-cost problem at x,
/// infinity norm: max_j |x_j - max(0, x_j - dG/dx_j)|. Zero exactly at a
/// constrained optimum.
double kkt_residual(const GameSpec& spec, const Vec& x);

/// Projected gradient descent with backtracking on the aggregate cost from
/// zero effort, finished by exact coordinate line solves once objective
/// decreases fall below floating-point resolution. For total-effort games the
/// report carries the gap to the closed form (single investor at the lowest
/// cost).
SocialOptimumReport solve_social_optimum(const GameSpec& spec,
                                         const SolverConfig& cfg);

/// argmin over own effort of player i's cost, the others' efforts held at x
/// (x[i] is ignored). Derivative bisection on [0, player_bound]; the own-cost
/// derivative is strictly increasing, so the root is unique.
double best_response(const GameSpec& spec, std::size_t i, const Vec& x,
                     const SolverConfig& cfg);

/// Gauss-Seidel best-response sweeps in ascending player order from zero
/// effort; ascending order makes the lowest index win under cost ties. The
/// iteration is a heuristic: existence of an equilibrium is guaranteed, its
/// convergence is not, and a capped run is reported as converged=false rather
/// than an error. A nonzero seed additionally restarts once from a random
/// profile when costs tie; reaching a different certified equilibrium sets
/// the non-uniqueness flag (the zero-start profile is still the one
/// returned).
EquilibriumReport solve_unregulated_ne(const GameSpec& spec,
                                       const SolverConfig& cfg);

/// Max over players of the cost saved by unilaterally moving to the exact
/// best response. <= tol certifies x as a Nash equilibrium.
double verify_ne(const GameSpec& spec, const Vec& x, const SolverConfig& cfg);

/// Social-cost ratio G(x_ne)/G(x_so). Guards the (impossible for positive
/// risk) zero denominator with std::domain_error.
double price_of_anarchy(const GameSpec& spec, const Vec& x_ne, const Vec& x_so);

/// Closed forms for the total-effort family: only the lowest-cost player ever
/// invests; its effort solves the scalar first-order condition. Returns false
/// when the family does not apply. Any output pointer may be null.
bool total_effort_closed_forms(const GameSpec& spec, Vec* x_ne, Vec* x_so,
                               double* rho);

}  // namespace ids
