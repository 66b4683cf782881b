#pragma once

#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ids {

using Vec = std::vector<double>;

/// Thrown when an operation needs a risk family the given game does not use.
struct unsupported_family : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Every player faces the same loss alpha * exp(-beta * sum_j x_j).
struct TotalEffortExp {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Player i faces alpha_i * exp(-sum_j w_ij x_j); all weights strictly positive,
/// so each player's investment lowers everyone's loss.
struct WeightedEffortExp {
  Vec alphas;                // one per player, > 0
  std::vector<Vec> weights;  // row i = sensitivities of player i's loss, all > 0
};

using RiskModel = std::variant<TotalEffortExp, WeightedEffortExp>;

/// Immutable description of an interdependent-security game: per-unit
/// investment costs and a parametric risk model. Construction validates
/// positivity of every parameter; instances are safe to share across threads.
class GameSpec {
 public:
  GameSpec(Vec costs, RiskModel model);

  std::size_t player_count() const { return costs_.size(); }
  const Vec& costs() const { return costs_; }
  double cost_rate(std::size_t i) const { return costs_.at(i); }
  const RiskModel& model() const { return model_; }

  bool is_total_effort() const;
  /// True when two players share the exact same unit cost. Downstream solvers
  /// tie-break by lowest index; equilibria need not be unique in this case.
  bool has_cost_ties() const;

 private:
  Vec costs_;
  RiskModel model_;
};

/// Expected loss f_i(x) of player i. Requires x >= 0 componentwise.
double risk(const GameSpec& spec, std::size_t i, const Vec& x);

/// f_i(0,...,0), the loss when nobody invests.
double risk_at_zero(const GameSpec& spec, std::size_t i);

/// Player i's full cost: risk plus investment spending, f_i(x) + c_i x_i.
double cost(const GameSpec& spec, std::size_t i, const Vec& x);

/// -cost - tax. A negative tax is a reward.
double utility(const GameSpec& spec, std::size_t i, const Vec& x, double tax);

/// Sum of all players' costs, accumulated in ascending player order.
double social_cost(const GameSpec& spec, const Vec& x);

/// Analytic gradient of player i's cost; component j is
/// d f_i/d x_j + c_i * [j == i].
Vec cost_gradient(const GameSpec& spec, std::size_t i, const Vec& x);

/// Upper bound (f_i(0) + slack)/c_i on player i's best response: beyond it the
/// player's own cost is strictly increasing regardless of the others' efforts.
double player_bound(const GameSpec& spec, std::size_t i, double slack);

/// max_i player_bound: every best response lies in [0, strategy_bound].
double strategy_bound(const GameSpec& spec, double slack);

/// Validates that x is a well-formed investment profile for spec
/// (length, nonnegative, finite); throws std::invalid_argument otherwise.
void validate_profile(const GameSpec& spec, const Vec& x);

}  // namespace ids
