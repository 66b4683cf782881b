#pragma once

#include "solvers.hpp"

namespace ids {

enum class IrRegime {
  kFreeRide,     // loner exerts nothing, the coordinated group invests
  kAllEffort,    // loner carries all the effort
  kMixedCorner,  // nobody invests
};

const char* to_string(IrRegime r);

/// Result of the opt-out game: the loner (lowest-cost player) best-responds
/// to the remaining coordinated players, who re-optimize jointly against the
/// loner's effort. Only the two lowest-cost players can ever be active.
struct SequentialOutcome {
  double loner_effort = 0.0;
  double partner_effort = 0.0;  // effort of the group's cheapest member
  IrRegime regime = IrRegime::kMixedCorner;
  double u_in = 0.0;   // loner's utility inside the mechanism (NaN until computed)
  double u_out = 0.0;  // loner's utility after opting out
  double gap = 0.0;    // u_in - u_out; negative means opting out wins
};

/// Solves the opt-out game in closed form. Requires the unit total-effort
/// family (alpha = beta = 1) and ascending costs; efforts are clamped at zero
/// throughout. u_in and gap are left NaN; ir_gap_numeric fills them.
SequentialOutcome sequential_equilibrium(const GameSpec& spec);

/// Literal participation-gap formula (c1/n)((n-1)(1 - ln c1) - ln n). Only
/// meaningful where the loner carries all effort and c1 < 1; outside that
/// region the unclamped algebra behind it allows negative efforts, so the
/// clamped computation in ir_gap_numeric is the ground truth.
double ir_gap_formula(std::size_t n, double c1);

/// Participation gap with clamped efforts: u_in evaluated at the social
/// optimum under the loner's personalized-price tax, u_out from
/// sequential_equilibrium.
SequentialOutcome ir_gap_numeric(const GameSpec& spec, const SolverConfig& cfg);

}  // namespace ids
