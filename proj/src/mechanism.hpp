#pragma once

#include <functional>

#include "solvers.hpp"

namespace ids {

/// One player's report to the regulator: a nonnegative price vector for the
/// whole investment profile and a proposal for that profile. Proposals may
/// carry negative components (the message space is unrestricted there), even
/// though realized investments must be nonnegative.
struct Message {
  Vec prices;    // componentwise >= 0
  Vec proposal;  // unrestricted sign
};

struct MessageProfile {
  std::vector<Message> players;

  std::size_t size() const { return players.size(); }
};

/// Allocation produced from a message profile, with the tax split into its
/// three parts: the price term priced by the two cyclic successors, the
/// player's own discrepancy penalty, and the balancing penalty. taxes[i] =
/// price_term[i] + own_penalty[i] - balance_penalty[i]; the cyclic structure
/// makes the taxes sum to zero for every profile, in or out of equilibrium.
struct MechanismOutcome {
  Vec x;  // averaged proposal
  Vec taxes;
  Vec price_term;
  Vec own_penalty;
  Vec balance_penalty;
  // False when averaging produced a negative coordinate; such an allocation
  // is not a valid investment profile and utilities are undefined on it.
  bool x_feasible = true;
};

/// Personalized prices l_i and multipliers lambda_i >= 0 making the social
/// optimum each player's own optimum under the charge l_i . x:
/// sum_i l_i = 0, lambda_i . x* = 0, and l_i + grad cost_i(x*) = lambda_i.
struct LindahlSystem {
  std::vector<Vec> prices;       // l_i, one vector per player
  std::vector<Vec> multipliers;  // lambda_i
};

struct PairVerdict {
  std::size_t payer = 0;      // i, the player charged
  std::size_t investor = 0;   // j, the player invested
  double cost_slope = 0.0;    // d cost_i / d x_j at the allocation
  double price = 0.0;         // l_{i,j}
  bool vacuous = false;       // investor inactive or slope >= 0
  bool holds = true;
};

struct ExternalityReport {
  bool all_hold = true;
  std::vector<PairVerdict> pairs;  // every ordered pair i != j
};

struct DynamicsReport {
  MessageProfile terminal;
  MechanismOutcome terminal_outcome;
  std::int64_t rounds = 0;
  bool converged = false;
  double terminal_deviation = 0.0;
  bool terminal_certified = false;
};

/// Called once per round with the profile in force and its outcome; return
/// false to stop the run early.
using DynamicsObserver = std::function<bool(
    std::int64_t round, const MessageProfile&, const MechanismOutcome&,
    double social_cost, double max_change)>;

/// Averages the proposals and assesses the cyclic discrepancy taxes.
/// Requires at least three players: with two, a player's own price vector
/// would price its own tax's first term and the incentive structure breaks.
MechanismOutcome outcome(const MessageProfile& m);

/// Personalized prices supporting x* (choice l_i = -grad cost_i(x*) +
/// lambda_i). The multiplier mass on each inactive coordinate, fixed in sum
/// by the optimality of x*, is spread uniformly across players, which keeps
/// sum_i l_i = 0 to machine precision. Rejects x* whose projected-KKT
/// residual exceeds cfg.lindahl_kkt_tol.
LindahlSystem lindahl_prices(const GameSpec& spec, const Vec& x_star,
                             const SolverConfig& cfg);

/// Builds the equilibrium messages: every proposal equals x*, and the price
/// vectors solve the cyclic difference system (price of the successor pair =
/// l_i). The recursion is seeded with the constant vector M = sum_i
/// max_k |l_{i,k}|, large enough that every price stays nonnegative; the seed
/// is reported via price_seed for reproducibility.
MessageProfile construct_equilibrium_messages(const GameSpec& spec,
                                              const Vec& x_star,
                                              const LindahlSystem& lindahl,
                                              double* price_seed = nullptr);

/// Largest utility gain any single player can reach by replacing its own
/// message, searched over (a) the price-free family that steers the averaged
/// allocation to an arbitrary nonnegative target - a coordinate grid around
/// the current allocation with golden-section refinement, equivalent to the
/// KKT test of the player's priced problem - and (b) cfg.deviation_samples
/// seeded random (price, target) pairs. Deviations that would drive the
/// average outside the nonnegative cone are not meaningful investments and
/// are excluded. <= tol certifies the profile as a mechanism equilibrium.
double verify_mechanism_ne(const GameSpec& spec, const MessageProfile& m,
                           const SolverConfig& cfg);

/// Checks the compensation structure at an allocation: whenever investor j is
/// active and lowers payer i's cost, the personalized price l_{i,j} and hence
/// the payment l_{i,j} x_j must be positive.
ExternalityReport externality_sign_check(const GameSpec& spec, const Vec& xhat,
                                         const LindahlSystem& lindahl);

/// Heuristic message exchange with no convergence guarantee: per round every
/// player takes one damped projected gradient step of its realized utility in
/// its proposal (projection keeps proposals nonnegative, so the averaged
/// allocation stays a valid investment profile) and raises each price in
/// proportion to the observed discrepancy with its successor's proposal.
/// Stops when the largest message change drops below cfg.sweep_tol or at
/// cfg.dynamics_round_cap rounds; the terminal profile is then certified (or
/// not) by verify_mechanism_ne. Initial proposals must be nonnegative.
DynamicsReport run_dynamics(const GameSpec& spec, const MessageProfile& initial,
                            const SolverConfig& cfg,
                            const DynamicsObserver& observer = {});

/// Deterministic starting profile for the dynamics: proposals uniform in
/// [0, strategy_bound], prices uniform in [0, 1].
MessageProfile seeded_profile(const GameSpec& spec, std::uint64_t seed,
                              double bound_slack);

}  // namespace ids
