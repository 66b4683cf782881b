#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numeric.hpp"

namespace ids {

namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(what) + ": must be > 0, got " +
                                std::to_string(v));
  }
}

Vec social_gradient(const GameSpec& spec, const Vec& x) {
  const std::size_t n = spec.player_count();
  Vec g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec gi = cost_gradient(spec, i, x);
    for (std::size_t j = 0; j < n; ++j) g[j] += gi[j];
  }
  return g;
}

// d G / d x_k, the summed cost slope of coordinate k.
double social_partial(const GameSpec& spec, std::size_t k, const Vec& x) {
  if (const auto* te = std::get_if<TotalEffortExp>(&spec.model())) {
    return spec.costs()[k] -
           static_cast<double>(spec.player_count()) * te->beta * risk(spec, 0, x);
  }
  const auto& we = std::get<WeightedEffortExp>(spec.model());
  double s = spec.costs()[k];
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    s -= we.weights[i][k] * risk(spec, i, x);
  }
  return s;
}

std::size_t lowest_cost_player(const GameSpec& spec) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < spec.player_count(); ++i) {
    if (spec.costs()[i] < spec.costs()[best]) best = i;
  }
  return best;
}

bool min_cost_tied(const GameSpec& spec) {
  const double cmin = spec.costs()[lowest_cost_player(spec)];
  int hits = 0;
  for (double c : spec.costs()) hits += (c == cmin);
  return hits > 1;
}

// d cost_i / d x_i at the profile x with x[i] replaced by xi.
double own_cost_slope(const GameSpec& spec, std::size_t i, Vec x, double xi) {
  x[i] = xi;
  return cost_gradient(spec, i, x)[i];
}

}  // namespace

void SolverConfig::validate() const {
  require_positive(gradient_tol, "gradient_tol");
  require_positive(sweep_tol, "sweep_tol");
  require_positive(bound_slack, "bound_slack");
  require_positive(lindahl_kkt_tol, "lindahl_kkt_tol");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations: must be >= 1");
  if (deviation_samples < 1) throw std::invalid_argument("deviation_samples: must be >= 1");
  if (!(backtrack_shrink > 0.0 && backtrack_shrink < 1.0)) {
    throw std::invalid_argument("backtrack_shrink: must lie in (0, 1)");
  }
  if (!(armijo > 0.0 && armijo < 1.0)) {
    throw std::invalid_argument("armijo: must lie in (0, 1)");
  }
  if (!std::isfinite(dynamics_step) || dynamics_step < 0.0) {
    throw std::invalid_argument("dynamics_step: must be >= 0");
  }
  if (dynamics_round_cap < 1) throw std::invalid_argument("dynamics_round_cap: must be >= 1");
}

double kkt_residual(const GameSpec& spec, const Vec& x) {
  validate_profile(spec, x);
  const Vec g = social_gradient(spec, x);
  double r = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double stepped = std::max(0.0, x[j] - g[j]);
    r = std::max(r, std::abs(x[j] - stepped));
  }
  return r;
}

SocialOptimumReport solve_social_optimum(const GameSpec& spec,
                                         const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = spec.player_count();
  SocialOptimumReport rep;
  Vec x(n, 0.0);
  double value = social_cost(spec, x);
  double step = 1.0;

  std::int64_t iter = 0;
  int stagnant = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    const Vec g = social_gradient(spec, x);
    double residual = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      residual = std::max(residual, std::abs(x[j] - std::max(0.0, x[j] - g[j])));
    }
    if (residual <= cfg.gradient_tol) break;

    step = std::min(step * 2.0, 1e6);
    bool moved = false;
    while (step > 1e-18) {
      Vec cand(n);
      for (std::size_t j = 0; j < n; ++j) cand[j] = std::max(0.0, x[j] - step * g[j]);
      double decrease = 0.0;  // g . (x - cand), nonnegative along the projection arc
      for (std::size_t j = 0; j < n; ++j) decrease += g[j] * (x[j] - cand[j]);
      const double cand_value = social_cost(spec, cand);
      if (cand_value <= value - cfg.armijo * decrease) {
        // once decreases fall below resolution, hand over to the line solves
        if (cand_value >= value - 1e-15 * std::max(1.0, std::abs(value))) {
          ++stagnant;
        } else {
          stagnant = 0;
        }
        x = std::move(cand);
        value = cand_value;
        moved = true;
        break;
      }
      step *= cfg.backtrack_shrink;
    }
    if (!moved) break;  // no acceptable step at floating-point resolution
    if (stagnant >= 20) {
      ++iter;
      break;
    }
  }

  // Backtracking progress saturates once objective decreases drop below the
  // floating-point resolution of G, typically around a 1e-8 residual. Exact
  // coordinate line solves (the summed slope is strictly increasing along
  // every coordinate) push the first-order conditions the rest of the way.
  double risk_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) risk_mass += risk_at_zero(spec, i);
  for (int sweep = 0; sweep < 100 && iter < cfg.max_iterations; ++sweep, ++iter) {
    if (kkt_residual(spec, x) <= cfg.gradient_tol) break;
    for (std::size_t k = 0; k < n; ++k) {
      auto slope = [&](double t) {
        Vec y = x;
        y[k] = t;
        return social_partial(spec, k, y);
      };
      if (slope(0.0) >= 0.0) {
        x[k] = 0.0;
        continue;
      }
      double lo = 0.0;
      double hi = (risk_mass + cfg.bound_slack) / spec.costs()[k];
      if (slope(hi) <= 0.0) {
        x[k] = hi;
        continue;
      }
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      x[k] = 0.5 * (lo + hi);
    }
  }

  rep.x = x;
  rep.iterations = iter;
  rep.kkt_residual = kkt_residual(spec, x);
  rep.converged = rep.kkt_residual <= cfg.gradient_tol;

  if (spec.is_total_effort()) {
    Vec oracle;
    total_effort_closed_forms(spec, nullptr, &oracle, nullptr);
    double gap = 0.0;
    for (std::size_t j = 0; j < n; ++j) gap = std::max(gap, std::abs(x[j] - oracle[j]));
    rep.closed_form_gap = gap;
    double s = 0.0;
    for (double v : oracle) s += v;
    rep.non_unique = min_cost_tied(spec) && s > cfg.sweep_tol;
  }
  return rep;
}

double best_response(const GameSpec& spec, std::size_t i, const Vec& x,
                     const SolverConfig& cfg) {
  cfg.validate();
  Vec others = x;
  if (i >= spec.player_count()) {
    throw std::out_of_range("player index " + std::to_string(i) + " out of range");
  }
  others.at(i) = 0.0;
  validate_profile(spec, others);

  if (own_cost_slope(spec, i, others, 0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = player_bound(spec, i, cfg.bound_slack);
  if (own_cost_slope(spec, i, others, hi) <= 0.0) return hi;  // cannot occur for valid families
  // Strictly increasing slope: plain bisection to machine-level width.
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (own_cost_slope(spec, i, others, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// Ascending-order sweeps until the profile stops moving; returns true on
// convergence within the sweep cap.
bool sweep_to_rest(const GameSpec& spec, const SolverConfig& cfg, Vec& x,
                   std::int64_t& sweeps_used) {
  for (sweeps_used = 0; sweeps_used < cfg.max_iterations; ++sweeps_used) {
    double change = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = best_response(spec, i, x, cfg);
      change = std::max(change, std::abs(xi - x[i]));
      x[i] = xi;
    }
    if (change < cfg.sweep_tol) {
      ++sweeps_used;
      return true;
    }
  }
  return false;
}

}  // namespace

EquilibriumReport solve_unregulated_ne(const GameSpec& spec,
                                       const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t n = spec.player_count();
  EquilibriumReport rep;
  Vec x(n, 0.0);
  rep.converged = sweep_to_rest(spec, cfg, x, rep.sweeps);
  rep.x = x;
  rep.max_profitable_deviation = verify_ne(spec, x, cfg);
  rep.active.resize(n);
  for (std::size_t i = 0; i < n; ++i) rep.active[i] = x[i] > 0.0;

  if (spec.is_total_effort()) {
    double s = 0.0;
    for (double v : x) s += v;
    rep.non_unique = min_cost_tied(spec) && s > cfg.sweep_tol;
  }

  // Tie exploration: a nonzero seed buys one restart from a random profile.
  // Landing on a different certified equilibrium is direct evidence of
  // non-uniqueness (the zero-start answer is still the one reported).
  if (rep.converged && cfg.seed != 0 && spec.has_cost_ties()) {
    Rng rng(cfg.seed);
    const double hi = strategy_bound(spec, cfg.bound_slack);
    Vec alt(n);
    for (double& v : alt) v = rng.uniform(0.0, hi);
    std::int64_t unused = 0;
    if (sweep_to_rest(spec, cfg, alt, unused)) {
      double dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) dist = std::max(dist, std::abs(alt[i] - x[i]));
      if (dist > 1e3 * cfg.sweep_tol && verify_ne(spec, alt, cfg) <= 1e-8) {
        rep.non_unique = true;
      }
    }
  }
  return rep;
}

double verify_ne(const GameSpec& spec, const Vec& x, const SolverConfig& cfg) {
  validate_profile(spec, x);
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.player_count(); ++i) {
    const double br = best_response(spec, i, x, cfg);
    Vec moved = x;
    moved[i] = br;
    worst = std::max(worst, cost(spec, i, x) - cost(spec, i, moved));
  }
  return std::max(0.0, worst);
}

double price_of_anarchy(const GameSpec& spec, const Vec& x_ne, const Vec& x_so) {
  validate_profile(spec, x_ne);
  validate_profile(spec, x_so);
  const double denom = social_cost(spec, x_so);
  if (!(denom > 0.0)) {
    throw std::domain_error("price of anarchy: optimal social cost is not positive");
  }
  return social_cost(spec, x_ne) / denom;
}

bool total_effort_closed_forms(const GameSpec& spec, Vec* x_ne, Vec* x_so,
                               double* rho) {
  if (!spec.is_total_effort()) return false;
  const auto& te = std::get<TotalEffortExp>(spec.model());
  const std::size_t n = spec.player_count();
  const std::size_t leader = lowest_cost_player(spec);
  const double cmin = spec.costs()[leader];

  Vec ne(n, 0.0), so(n, 0.0);
  ne[leader] = std::max(0.0, std::log(te.alpha * te.beta / cmin) / te.beta);
  so[leader] = std::max(
      0.0, std::log(static_cast<double>(n) * te.alpha * te.beta / cmin) / te.beta);

  if (rho) *rho = social_cost(spec, ne) / social_cost(spec, so);
  if (x_ne) *x_ne = std::move(ne);
  if (x_so) *x_so = std::move(so);
  return true;
}

}  // namespace ids
