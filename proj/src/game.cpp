#include "game.hpp"

#include <cmath>
#include <string>

namespace ids {

namespace {

void require_positive_finite(double v, const std::string& what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(what + ": must be finite and > 0, got " +
                                std::to_string(v));
  }
}

void check_index(const GameSpec& spec, std::size_t i) {
  if (i >= spec.player_count()) {
    throw std::out_of_range("player index " + std::to_string(i) +
                            " out of range for " +
                            std::to_string(spec.player_count()) + " players");
  }
}

// Exponent -sum_j w_ij x_j of player i's loss; never positive on x >= 0.
double weighted_exponent(const WeightedEffortExp& m, std::size_t i, const Vec& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += m.weights[i][j] * x[j];
  return -s;
}

double total(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}

}  // namespace

GameSpec::GameSpec(Vec costs, RiskModel model)
    : costs_(std::move(costs)), model_(std::move(model)) {
  const std::size_t n = costs_.size();
  if (n == 0) throw std::invalid_argument("costs: at least one player required");
  for (std::size_t i = 0; i < n; ++i) {
    require_positive_finite(costs_[i], "costs[" + std::to_string(i) + "]");
  }
  if (const auto* te = std::get_if<TotalEffortExp>(&model_)) {
    require_positive_finite(te->alpha, "risk_model.alpha");
    require_positive_finite(te->beta, "risk_model.beta");
  } else {
    const auto& we = std::get<WeightedEffortExp>(model_);
    if (we.alphas.size() != n) {
      throw std::invalid_argument("risk_model.alpha: expected " +
                                  std::to_string(n) + " entries, got " +
                                  std::to_string(we.alphas.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      require_positive_finite(we.alphas[i], "risk_model.alpha[" + std::to_string(i) + "]");
    }
    if (we.weights.size() != n) {
      throw std::invalid_argument("risk_model.weights: expected " +
                                  std::to_string(n) + " rows, got " +
                                  std::to_string(we.weights.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (we.weights[i].size() != n) {
        throw std::invalid_argument("risk_model.weights[" + std::to_string(i) +
                                    "]: expected " + std::to_string(n) + " entries");
      }
      for (std::size_t j = 0; j < n; ++j) {
        require_positive_finite(we.weights[i][j], "risk_model.weights[" +
                                std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  }
}

bool GameSpec::is_total_effort() const {
  return std::holds_alternative<TotalEffortExp>(model_);
}

bool GameSpec::has_cost_ties() const {
  for (std::size_t i = 0; i < costs_.size(); ++i)
    for (std::size_t j = i + 1; j < costs_.size(); ++j)
      if (costs_[i] == costs_[j]) return true;
  return false;
}

void validate_profile(const GameSpec& spec, const Vec& x) {
  if (x.size() != spec.player_count()) {
    throw std::invalid_argument("investment profile: expected " +
                                std::to_string(spec.player_count()) +
                                " entries, got " + std::to_string(x.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j]) || x[j] < 0.0) {
      throw std::invalid_argument("investment profile[" + std::to_string(j) +
                                  "]: must be finite and >= 0, got " +
                                  std::to_string(x[j]));
    }
  }
}

double risk(const GameSpec& spec, std::size_t i, const Vec& x) {
  check_index(spec, i);
  validate_profile(spec, x);
  if (const auto* te = std::get_if<TotalEffortExp>(&spec.model())) {
    return te->alpha * std::exp(-te->beta * total(x));
  }
  const auto& we = std::get<WeightedEffortExp>(spec.model());
  return we.alphas[i] * std::exp(weighted_exponent(we, i, x));
}

double risk_at_zero(const GameSpec& spec, std::size_t i) {
  check_index(spec, i);
  if (const auto* te = std::get_if<TotalEffortExp>(&spec.model())) return te->alpha;
  return std::get<WeightedEffortExp>(spec.model()).alphas[i];
}

double cost(const GameSpec& spec, std::size_t i, const Vec& x) {
  return risk(spec, i, x) + spec.cost_rate(i) * x[i];
}

double utility(const GameSpec& spec, std::size_t i, const Vec& x, double tax) {
  return -cost(spec, i, x) - tax;
}

double social_cost(const GameSpec& spec, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < spec.player_count(); ++i) s += cost(spec, i, x);
  return s;
}

Vec cost_gradient(const GameSpec& spec, std::size_t i, const Vec& x) {
  check_index(spec, i);
  validate_profile(spec, x);
  const std::size_t n = spec.player_count();
  Vec g(n, 0.0);
  if (const auto* te = std::get_if<TotalEffortExp>(&spec.model())) {
    const double df = -te->alpha * te->beta * std::exp(-te->beta * total(x));
    for (std::size_t j = 0; j < n; ++j) g[j] = df;
  } else {
    const auto& we = std::get<WeightedEffortExp>(spec.model());
    const double f = we.alphas[i] * std::exp(weighted_exponent(we, i, x));
    for (std::size_t j = 0; j < n; ++j) g[j] = -we.weights[i][j] * f;
  }
  g[i] += spec.cost_rate(i);
  return g;
}

double player_bound(const GameSpec& spec, std::size_t i, double slack) {
  check_index(spec, i);
  if (!std::isfinite(slack) || slack <= 0.0) {
    throw std::invalid_argument("slack: must be finite and > 0, got " +
                                std::to_string(slack));
  }
  return (risk_at_zero(spec, i) + slack) / spec.cost_rate(i);
}

double strategy_bound(const GameSpec& spec, double slack) {
  double m = 0.0;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    m = std::max(m, player_bound(spec, i, slack));
  }
  return m;
}

}  // namespace ids
