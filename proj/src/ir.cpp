#include "ir.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mechanism.hpp"
#include "numeric.hpp"

namespace ids {

namespace {

void require_unit_total_effort(const GameSpec& spec) {
  const auto* te = std::get_if<TotalEffortExp>(&spec.model());
  if (!te) {
    throw unsupported_family(
        "opt-out analysis: requires the total-effort exponential risk family");
  }
  if (std::abs(te->alpha - 1.0) > 1e-12 || std::abs(te->beta - 1.0) > 1e-12) {
    throw unsupported_family(
        "opt-out analysis: requires alpha = beta = 1, got alpha = " +
        std::to_string(te->alpha) + ", beta = " + std::to_string(te->beta));
  }
  if (spec.player_count() < 2) {
    throw std::invalid_argument("opt-out analysis: at least 2 players required");
  }
  for (std::size_t i = 1; i < spec.player_count(); ++i) {
    if (spec.costs()[i] < spec.costs()[i - 1]) {
      throw std::invalid_argument("opt-out analysis: costs must be sorted ascending");
    }
  }
}

}  // namespace

const char* to_string(IrRegime r) {
  switch (r) {
    case IrRegime::kFreeRide: return "free-ride";
    case IrRegime::kAllEffort: return "all-effort";
    case IrRegime::kMixedCorner: return "mixed-corner";
  }
  return "unknown";
}

SequentialOutcome sequential_equilibrium(const GameSpec& spec) {
  require_unit_total_effort(spec);
  const double c1 = spec.costs()[0];
  const double c2 = spec.costs()[1];
  const std::size_t n = spec.player_count();

  // Group threshold: facing loner effort x1, the coordinated players invest
  // max(0, threshold - x1) through their cheapest member.
  const double threshold = std::max(0.0, std::log(static_cast<double>(n - 1) / c2));

  // Loner's cost is exp(-threshold) + c1*x1 below the threshold (the group
  // fills in) and exp(-x1) + c1*x1 beyond it (solo). Both pieces are convex;
  // the global minimum is at x1 = 0 or at the solo stationary point -ln c1
  // when that lies past the threshold.
  SequentialOutcome out;
  out.u_in = std::numeric_limits<double>::quiet_NaN();
  out.gap = std::numeric_limits<double>::quiet_NaN();

  const double solo_stationary = -std::log(c1);
  double loner = 0.0;
  if (threshold > 0.0) {
    if (solo_stationary > threshold) {
      const double free_ride_cost = std::exp(-threshold);
      const double all_effort_cost = c1 * (1.0 - std::log(c1));
      loner = all_effort_cost < free_ride_cost ? solo_stationary : 0.0;
    }
  } else {
    loner = std::max(0.0, solo_stationary);
  }

  out.loner_effort = loner;
  out.partner_effort = std::max(0.0, threshold - loner);
  out.u_out = -(std::exp(-loner - out.partner_effort) + c1 * loner);
  if (out.loner_effort > 0.0) {
    out.regime = IrRegime::kAllEffort;
  } else if (out.partner_effort > 0.0) {
    out.regime = IrRegime::kFreeRide;
  } else {
    out.regime = IrRegime::kMixedCorner;
  }
  return out;
}

double ir_gap_formula(std::size_t n, double c1) {
  if (n < 2) throw std::invalid_argument("gap formula: n must be >= 2");
  if (!std::isfinite(c1) || c1 <= 0.0) {
    throw std::invalid_argument("gap formula: c1 must be > 0, got " + std::to_string(c1));
  }
  const double nd = static_cast<double>(n);
  return (c1 / nd) * ((nd - 1.0) * (1.0 - std::log(c1)) - std::log(nd));
}

SequentialOutcome ir_gap_numeric(const GameSpec& spec, const SolverConfig& cfg) {
  SequentialOutcome out = sequential_equilibrium(spec);

  const SocialOptimumReport so = solve_social_optimum(spec, cfg);
  const LindahlSystem lindahl = lindahl_prices(spec, so.x, cfg);
  const double tax = dot(lindahl.prices[0], so.x);
  out.u_in = utility(spec, 0, so.x, tax);
  out.gap = out.u_in - out.u_out;
  return out;
}

}  // namespace ids
