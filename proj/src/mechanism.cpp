#include "mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numeric.hpp"

namespace ids {

namespace {

constexpr double kCertTol = 1e-6;     // deviation gain certifying an equilibrium
constexpr double kActiveTol = 1e-12;  // coordinate counted as invested beyond this

void validate_messages(const MessageProfile& m) {
  const std::size_t n = m.size();
  if (n < 3) {
    throw std::invalid_argument("message profile: at least 3 players required, got " +
                                std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Message& mi = m.players[i];
    if (mi.prices.size() != n || mi.proposal.size() != n) {
      throw std::invalid_argument("message[" + std::to_string(i) +
                                  "]: price and proposal vectors must both have length " +
                                  std::to_string(n));
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(mi.prices[k]) || mi.prices[k] < 0.0) {
        throw std::invalid_argument("message[" + std::to_string(i) + "].prices[" +
                                    std::to_string(k) + "]: must be finite and >= 0");
      }
      if (!std::isfinite(mi.proposal[k])) {
        throw std::invalid_argument("message[" + std::to_string(i) + "].proposal[" +
                                    std::to_string(k) + "]: must be finite");
      }
    }
  }
}

// sum_k p_k (a_k - b_k)^2
double discrepancy_penalty(const Vec& p, const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = a[k] - b[k];
    s += p[k] * d * d;
  }
  return s;
}

void check_lindahl_shape(const GameSpec& spec, const LindahlSystem& lindahl) {
  const std::size_t n = spec.player_count();
  if (lindahl.prices.size() != n) {
    throw std::invalid_argument("lindahl system: expected " + std::to_string(n) +
                                " price vectors");
  }
  for (const Vec& li : lindahl.prices) {
    if (li.size() != n) {
      throw std::invalid_argument("lindahl system: every price vector must have length " +
                                  std::to_string(n));
    }
  }
}

}  // namespace

MechanismOutcome outcome(const MessageProfile& m) {
  validate_messages(m);
  const std::size_t n = m.size();
  MechanismOutcome out;
  out.x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) out.x[k] += m.players[i].proposal[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.x[k] /= static_cast<double>(n);
    if (out.x[k] < 0.0) out.x_feasible = false;
  }

  out.taxes.resize(n);
  out.price_term.resize(n);
  out.own_penalty.resize(n);
  out.balance_penalty.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s1 = (i + 1) % n;  // cyclic successor
    const std::size_t s2 = (i + 2) % n;
    double price = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      price += (m.players[s1].prices[k] - m.players[s2].prices[k]) * out.x[k];
    }
    out.price_term[i] = price;
    out.own_penalty[i] =
        discrepancy_penalty(m.players[i].prices, m.players[i].proposal, m.players[s1].proposal);
    out.balance_penalty[i] =
        discrepancy_penalty(m.players[s1].prices, m.players[s1].proposal, m.players[s2].proposal);
    out.taxes[i] = out.price_term[i] + out.own_penalty[i] - out.balance_penalty[i];
  }
  return out;
}

LindahlSystem lindahl_prices(const GameSpec& spec, const Vec& x_star,
                             const SolverConfig& cfg) {
  cfg.validate();
  validate_profile(spec, x_star);
  const double residual = kkt_residual(spec, x_star);
  if (residual > cfg.lindahl_kkt_tol) {
    throw std::invalid_argument(
        "lindahl prices: supplied profile is not a social optimum "
        "(projected-KKT residual " + std::to_string(residual) + " exceeds " +
        std::to_string(cfg.lindahl_kkt_tol) + ")");
  }

  const std::size_t n = spec.player_count();
  std::vector<Vec> grads(n);
  for (std::size_t i = 0; i < n; ++i) grads[i] = cost_gradient(spec, i, x_star);

  // Optimality fixes only the total multiplier mass per coordinate (zero on
  // active ones, the summed cost slope on inactive ones); spread it uniformly
  // so the prices sum to zero by construction. Active coordinates carry the
  // solver's gradient residual rather than an exact zero; distributing it the
  // same way keeps the zero-sum identity at machine precision instead of at
  // the solver tolerance.
  Vec share(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += grads[i][k];
    share[k] = s / static_cast<double>(n);
  }

  LindahlSystem sys;
  sys.prices.assign(n, Vec(n, 0.0));
  sys.multipliers.assign(n, share);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) sys.prices[i][k] = share[k] - grads[i][k];
  }
  return sys;
}

MessageProfile construct_equilibrium_messages(const GameSpec& spec,
                                              const Vec& x_star,
                                              const LindahlSystem& lindahl,
                                              double* price_seed) {
  const std::size_t n = spec.player_count();
  if (n < 3) {
    throw std::invalid_argument("equilibrium construction: at least 3 players required");
  }
  validate_profile(spec, x_star);
  check_lindahl_shape(spec, lindahl);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += lindahl.prices[i][k];
    if (std::abs(s) > 1e-9) {
      throw std::invalid_argument(
          "equilibrium construction: lindahl prices do not sum to zero (coordinate " +
          std::to_string(k) + " sums to " + std::to_string(s) + ")");
    }
  }

  double seed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(lindahl.prices[i][k]));
    seed += m;
  }

  std::vector<Vec> prices(n);
  prices[0].assign(n, seed);
  for (std::size_t p = 1; p < n; ++p) {
    const Vec& l = lindahl.prices[(p + n - 2) % n];
    prices[p].resize(n);
    for (std::size_t k = 0; k < n; ++k) prices[p][k] = prices[p - 1][k] - l[k];
  }
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n; ++k) {
      if (prices[p][k] < 0.0) {
        if (prices[p][k] < -1e-9) {
          throw std::logic_error("equilibrium construction: price recursion left " +
                                 std::to_string(prices[p][k]) + " at player " +
                                 std::to_string(p));
        }
        prices[p][k] = 0.0;  // rounding dust only
      }
    }
  }

  MessageProfile profile;
  profile.players.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    profile.players[i].prices = std::move(prices[i]);
    profile.players[i].proposal = x_star;
  }
  if (price_seed) *price_seed = seed;
  return profile;
}

double verify_mechanism_ne(const GameSpec& spec, const MessageProfile& m,
                           const SolverConfig& cfg) {
  cfg.validate();
  if (m.size() != spec.player_count()) {
    throw std::invalid_argument("message profile: expected " +
                                std::to_string(spec.player_count()) + " players, got " +
                                std::to_string(m.size()));
  }
  const MechanismOutcome base = outcome(m);
  if (!base.x_feasible) {
    throw std::invalid_argument(
        "message profile: averaged proposal has negative coordinates, utilities are "
        "undefined on it");
  }
  const std::size_t n = m.size();

  double hi = strategy_bound(spec, cfg.bound_slack);
  for (double v : base.x) hi = std::max(hi, v);
  hi = 1.5 * hi + 0.5;

  double price_hi = 1.0;
  for (const Message& mi : m.players) {
    for (double p : mi.prices) price_hi = std::max(price_hi, p);
  }

  Rng rng(cfg.seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s1 = (i + 1) % n;
    const std::size_t s2 = (i + 2) % n;
    Vec dprice(n);
    for (std::size_t k = 0; k < n; ++k) {
      dprice[k] = m.players[s1].prices[k] - m.players[s2].prices[k];
    }
    Vec others_sum(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) others_sum[k] += m.players[j].proposal[k];
    }
    const double base_util = -(cost(spec, i, base.x) + base.taxes[i]);
    const double fixed_balance = base.balance_penalty[i];

    // Price-free deviations: proposing n*y - others_sum steers the average to
    // exactly y, and a zero price vector kills the own penalty, so the player
    // faces cost(y) plus the successors' price difference on y.
    auto priced = [&](const Vec& y) { return cost(spec, i, y) + dot(dprice, y); };
    auto target_gain = [&](const Vec& y) {
      return (-priced(y) + fixed_balance) - base_util;
    };

    Vec y = base.x;
    worst = std::max(worst, target_gain(y));
    for (int sweep = 0; sweep < 3; ++sweep) {
      for (std::size_t k = 0; k < n; ++k) {
        auto line = [&](double t) {
          Vec yy = y;
          yy[k] = t;
          return priced(yy);
        };
        double best_t = y[k];
        double best_f = line(best_t);
        for (int g = 0; g <= 20; ++g) {
          const double t = hi * static_cast<double>(g) / 20.0;
          const double ft = line(t);
          if (ft < best_f) {
            best_f = ft;
            best_t = t;
          }
        }
        const double lo_r = std::max(0.0, best_t - hi / 20.0);
        const double hi_r = std::min(hi, best_t + hi / 20.0);
        double fv = 0.0;
        const double refined = minimize_scalar(line, lo_r, hi_r, 1e-12, &fv);
        if (fv < best_f) {
          best_f = fv;
          best_t = refined;
        }
        y[k] = best_t;
      }
    }
    worst = std::max(worst, target_gain(y));

    // Seeded random (price, target) deviations, own penalty included.
    for (std::int32_t s = 0; s < cfg.deviation_samples; ++s) {
      Vec target(n), dev_price(n);
      for (std::size_t k = 0; k < n; ++k) target[k] = rng.uniform(0.0, hi);
      for (std::size_t k = 0; k < n; ++k) dev_price[k] = rng.uniform(0.0, price_hi);
      double own = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double prop = static_cast<double>(n) * target[k] - others_sum[k];
        const double d = prop - m.players[s1].proposal[k];
        own += dev_price[k] * d * d;
      }
      const double u_dev =
          -cost(spec, i, target) - (dot(dprice, target) + own - fixed_balance);
      worst = std::max(worst, u_dev - base_util);
    }
  }
  return std::max(0.0, worst);
}

ExternalityReport externality_sign_check(const GameSpec& spec, const Vec& xhat,
                                         const LindahlSystem& lindahl) {
  validate_profile(spec, xhat);
  check_lindahl_shape(spec, lindahl);
  const std::size_t n = spec.player_count();
  ExternalityReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec grad = cost_gradient(spec, i, xhat);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      PairVerdict v;
      v.payer = i;
      v.investor = j;
      v.cost_slope = grad[j];
      v.price = lindahl.prices[i][j];
      if (xhat[j] <= kActiveTol || v.cost_slope >= 0.0) {
        v.vacuous = true;
      } else {
        v.holds = v.price > 0.0 && v.price * xhat[j] > 0.0;
      }
      rep.all_hold = rep.all_hold && v.holds;
      rep.pairs.push_back(v);
    }
  }
  return rep;
}

DynamicsReport run_dynamics(const GameSpec& spec, const MessageProfile& initial,
                            const SolverConfig& cfg,
                            const DynamicsObserver& observer) {
  cfg.validate();
  if (initial.size() != spec.player_count()) {
    throw std::invalid_argument("message profile: expected " +
                                std::to_string(spec.player_count()) + " players, got " +
                                std::to_string(initial.size()));
  }
  validate_messages(initial);
  for (std::size_t i = 0; i < initial.size(); ++i) {
    for (double v : initial.players[i].proposal) {
      if (v < 0.0) {
        throw std::invalid_argument(
            "dynamics: initial proposals must be nonnegative so every round's "
            "allocation is a valid investment profile");
      }
    }
  }

  const std::size_t n = initial.size();
  const double nd = static_cast<double>(n);
  MessageProfile cur = initial;
  DynamicsReport rep;
  bool aborted = false;

  std::int64_t round = 1;
  for (; round <= cfg.dynamics_round_cap; ++round) {
    const MechanismOutcome out = outcome(cur);
    const double social = social_cost(spec, out.x);

    MessageProfile next = cur;
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s1 = (i + 1) % n;
      const std::size_t s2 = (i + 2) % n;
      const Vec grad = cost_gradient(spec, i, out.x);
      const Message& mi = cur.players[i];
      const Message& succ = cur.players[s1];
      for (std::size_t k = 0; k < n; ++k) {
        const double slope =
            -grad[k] / nd -
            (cur.players[s1].prices[k] - cur.players[s2].prices[k]) / nd -
            2.0 * mi.prices[k] * (mi.proposal[k] - succ.proposal[k]);
        // Normalizing by the own-penalty curvature keeps the discrepancy map
        // contractive however large the prices grow.
        const double eff_step =
            cfg.dynamics_step / (1.0 + 2.0 * cfg.dynamics_step * mi.prices[k]);
        const double moved = std::max(0.0, mi.proposal[k] + eff_step * slope);
        next.players[i].proposal[k] = moved;
        max_change = std::max(max_change, std::abs(moved - mi.proposal[k]));

        const double raise =
            cfg.dynamics_step * std::abs(mi.proposal[k] - succ.proposal[k]);
        next.players[i].prices[k] = mi.prices[k] + raise;
        max_change = std::max(max_change, raise);
      }
    }

    if (observer && !observer(round, cur, out, social, max_change)) {
      aborted = true;
      break;
    }
    if (max_change < cfg.sweep_tol) {
      rep.converged = true;
      break;
    }
    cur = std::move(next);
  }

  rep.rounds = std::min(round, cfg.dynamics_round_cap);
  if (aborted) rep.converged = false;
  rep.terminal = std::move(cur);
  rep.terminal_outcome = outcome(rep.terminal);
  rep.terminal_deviation = verify_mechanism_ne(spec, rep.terminal, cfg);
  rep.terminal_certified = rep.terminal_deviation <= kCertTol;
  return rep;
}

MessageProfile seeded_profile(const GameSpec& spec, std::uint64_t seed,
                              double bound_slack) {
  const std::size_t n = spec.player_count();
  const double hi = strategy_bound(spec, bound_slack);
  Rng rng(seed);
  MessageProfile profile;
  profile.players.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    profile.players[i].prices.resize(n);
    profile.players[i].proposal.resize(n);
    for (std::size_t k = 0; k < n; ++k) profile.players[i].prices[k] = rng.uniform();
    for (std::size_t k = 0; k < n; ++k) {
      profile.players[i].proposal[k] = rng.uniform(0.0, hi);
    }
  }
  return profile;
}

}  // namespace ids
