#include "ids/ids.h"

#include <cstring>
#include <limits>
#include <string>

#include "game.hpp"
#include "ir.hpp"
#include "mechanism.hpp"
#include "solvers.hpp"
#include "spec_json.hpp"

struct ids_game {
  ids::GameSpec spec;
};

namespace {

thread_local std::string t_last_error;

int fail(ids_status code, const char* what) {
  t_last_error = what;
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ids::unsupported_family& e) {
    return fail(IDS_ERR_UNSUPPORTED, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(IDS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(IDS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::domain_error& e) {
    return fail(IDS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(IDS_ERR_INTERNAL, e.what());
  }
}

int require(bool ok, const char* what) {
  if (ok) return IDS_OK;
  throw std::invalid_argument(what);
}

ids::Vec to_vec(const double* p, std::size_t n) { return ids::Vec(p, p + n); }

ids::SolverConfig to_config(const ids_solver_config* cfg) {
  if (!cfg) return ids::SolverConfig{};
  ids::SolverConfig out;
  out.gradient_tol = cfg->gradient_tol;
  out.max_iterations = cfg->max_iterations;
  out.backtrack_shrink = cfg->backtrack_shrink;
  out.armijo = cfg->armijo;
  out.sweep_tol = cfg->sweep_tol;
  out.deviation_samples = cfg->deviation_samples;
  out.seed = cfg->seed;
  out.bound_slack = cfg->bound_slack;
  out.lindahl_kkt_tol = cfg->lindahl_kkt_tol;
  out.dynamics_step = cfg->dynamics_step;
  out.dynamics_round_cap = cfg->dynamics_round_cap;
  return out;
}

void from_config(const ids::SolverConfig& c, ids_solver_config* out) {
  out->gradient_tol = c.gradient_tol;
  out->max_iterations = c.max_iterations;
  out->backtrack_shrink = c.backtrack_shrink;
  out->armijo = c.armijo;
  out->sweep_tol = c.sweep_tol;
  out->deviation_samples = c.deviation_samples;
  out->seed = c.seed;
  out->bound_slack = c.bound_slack;
  out->lindahl_kkt_tol = c.lindahl_kkt_tol;
  out->dynamics_step = c.dynamics_step;
  out->dynamics_round_cap = c.dynamics_round_cap;
}

ids::MessageProfile to_profile(std::size_t n, const double* prices,
                               const double* proposals) {
  ids::MessageProfile m;
  m.players.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.players[i].prices = to_vec(prices + i * n, n);
    m.players[i].proposal = to_vec(proposals + i * n, n);
  }
  return m;
}

void flatten_profile(const ids::MessageProfile& m, double* prices,
                     double* proposals) {
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (prices) std::memcpy(prices + i * n, m.players[i].prices.data(), n * sizeof(double));
    if (proposals) {
      std::memcpy(proposals + i * n, m.players[i].proposal.data(), n * sizeof(double));
    }
  }
}

void fill_ir(const ids::SequentialOutcome& s, ids_ir_outcome* out) {
  out->loner_effort = s.loner_effort;
  out->partner_effort = s.partner_effort;
  out->regime = static_cast<int32_t>(s.regime);
  out->u_in = s.u_in;
  out->u_out = s.u_out;
  out->gap = s.gap;
}

}  // namespace

extern "C" {

const char* ids_status_name(int status) {
  switch (status) {
    case IDS_OK: return "ok";
    case IDS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IDS_ERR_NO_CONVERGENCE: return "no convergence";
    case IDS_ERR_NOT_CERTIFIED: return "not certified";
    case IDS_ERR_UNSUPPORTED: return "unsupported risk family";
    case IDS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ids_last_error(void) { return t_last_error.c_str(); }

const char* ids_version(void) { return "1.0.0"; }

void ids_solver_config_init(ids_solver_config* cfg) {
  if (!cfg) return;
  from_config(ids::SolverConfig{}, cfg);
}

int ids_game_create_total_effort(int32_t n, const double* costs, double alpha,
                                 double beta, ids_game** out) {
  return guarded([&] {
    require(out && costs, "null pointer argument");
    require(n >= 1, "n: must be >= 1");
    *out = new ids_game{ids::GameSpec(to_vec(costs, static_cast<std::size_t>(n)),
                                      ids::TotalEffortExp{alpha, beta})};
    return IDS_OK;
  });
}

int ids_game_create_weighted(int32_t n, const double* costs, const double* alphas,
                             const double* weights, ids_game** out) {
  return guarded([&] {
    require(out && costs && alphas && weights, "null pointer argument");
    require(n >= 1, "n: must be >= 1");
    const auto un = static_cast<std::size_t>(n);
    ids::WeightedEffortExp we;
    we.alphas = to_vec(alphas, un);
    we.weights.resize(un);
    for (std::size_t i = 0; i < un; ++i) we.weights[i] = to_vec(weights + i * un, un);
    *out = new ids_game{ids::GameSpec(to_vec(costs, un), std::move(we))};
    return IDS_OK;
  });
}

int ids_game_from_json(const char* text, ids_game** out, ids_solver_config* config,
                       int32_t* seed_present) {
  return guarded([&] {
    require(text && out, "null pointer argument");
    ids::SpecDocument doc = ids::parse_spec_document(text);
    if (config) from_config(doc.config, config);
    if (seed_present) *seed_present = doc.seed_present ? 1 : 0;
    *out = new ids_game{std::move(doc.game)};
    return IDS_OK;
  });
}

void ids_game_destroy(ids_game* game) { delete game; }

int32_t ids_game_player_count(const ids_game* game) {
  return game ? static_cast<int32_t>(game->spec.player_count()) : 0;
}

int ids_game_costs(const ids_game* game, double* costs_out) {
  return guarded([&] {
    require(game && costs_out, "null pointer argument");
    std::memcpy(costs_out, game->spec.costs().data(),
                game->spec.player_count() * sizeof(double));
    return IDS_OK;
  });
}

int ids_game_family(const ids_game* game, char* buf, size_t bufsize) {
  return guarded([&] {
    require(game && buf, "null pointer argument");
    const char* name =
        game->spec.is_total_effort() ? "total_effort_exp" : "weighted_effort_exp";
    require(bufsize > std::strlen(name), "buffer too small");
    std::strcpy(buf, name);
    return IDS_OK;
  });
}

int ids_game_has_cost_ties(const ids_game* game, int32_t* out) {
  return guarded([&] {
    require(game && out, "null pointer argument");
    *out = game->spec.has_cost_ties() ? 1 : 0;
    return IDS_OK;
  });
}

int ids_risk(const ids_game* game, int32_t player, const double* x, double* out) {
  return guarded([&] {
    require(game && x && out, "null pointer argument");
    require(player >= 0, "player: must be >= 0");
    *out = ids::risk(game->spec, static_cast<std::size_t>(player),
                     to_vec(x, game->spec.player_count()));
    return IDS_OK;
  });
}

int ids_cost(const ids_game* game, int32_t player, const double* x, double* out) {
  return guarded([&] {
    require(game && x && out, "null pointer argument");
    require(player >= 0, "player: must be >= 0");
    *out = ids::cost(game->spec, static_cast<std::size_t>(player),
                     to_vec(x, game->spec.player_count()));
    return IDS_OK;
  });
}

int ids_utility(const ids_game* game, int32_t player, const double* x, double tax,
                double* out) {
  return guarded([&] {
    require(game && x && out, "null pointer argument");
    require(player >= 0, "player: must be >= 0");
    *out = ids::utility(game->spec, static_cast<std::size_t>(player),
                        to_vec(x, game->spec.player_count()), tax);
    return IDS_OK;
  });
}

int ids_social_cost(const ids_game* game, const double* x, double* out) {
  return guarded([&] {
    require(game && x && out, "null pointer argument");
    *out = ids::social_cost(game->spec, to_vec(x, game->spec.player_count()));
    return IDS_OK;
  });
}

int ids_cost_gradient(const ids_game* game, int32_t player, const double* x,
                      double* grad_out) {
  return guarded([&] {
    require(game && x && grad_out, "null pointer argument");
    require(player >= 0, "player: must be >= 0");
    const ids::Vec g = ids::cost_gradient(game->spec, static_cast<std::size_t>(player),
                                          to_vec(x, game->spec.player_count()));
    std::memcpy(grad_out, g.data(), g.size() * sizeof(double));
    return IDS_OK;
  });
}

int ids_strategy_bound(const ids_game* game, double slack, double* out) {
  return guarded([&] {
    require(game && out, "null pointer argument");
    *out = ids::strategy_bound(game->spec, slack);
    return IDS_OK;
  });
}

int ids_solve_social_optimum(const ids_game* game, const ids_solver_config* cfg,
                             double* x_out, ids_solve_report* report) {
  return guarded([&] {
    require(game && x_out, "null pointer argument");
    const ids::SocialOptimumReport rep =
        ids::solve_social_optimum(game->spec, to_config(cfg));
    std::memcpy(x_out, rep.x.data(), rep.x.size() * sizeof(double));
    if (report) {
      *report = {};
      report->converged = rep.converged;
      report->iterations = rep.iterations;
      report->kkt_residual = rep.kkt_residual;
      report->non_unique = rep.non_unique;
      report->closed_form_gap = rep.closed_form_gap;
    }
    return rep.converged ? IDS_OK
                         : fail(IDS_ERR_NO_CONVERGENCE,
                                "social optimum: iteration cap reached before the "
                                "gradient tolerance");
  });
}

int ids_solve_nash(const ids_game* game, const ids_solver_config* cfg, double* x_out,
                   ids_solve_report* report, int8_t* active_out) {
  return guarded([&] {
    require(game && x_out, "null pointer argument");
    const ids::EquilibriumReport rep =
        ids::solve_unregulated_ne(game->spec, to_config(cfg));
    std::memcpy(x_out, rep.x.data(), rep.x.size() * sizeof(double));
    if (active_out) {
      for (std::size_t i = 0; i < rep.x.size(); ++i) active_out[i] = rep.active[i];
    }
    if (report) {
      *report = {};
      report->converged = rep.converged;
      report->iterations = rep.sweeps;
      report->max_deviation = rep.max_profitable_deviation;
      report->non_unique = rep.non_unique;
      report->closed_form_gap = std::numeric_limits<double>::quiet_NaN();
    }
    return rep.converged
               ? IDS_OK
               : fail(IDS_ERR_NO_CONVERGENCE,
                      "equilibrium: sweep cap reached before the tolerance");
  });
}

int ids_best_response(const ids_game* game, int32_t player, const double* x,
                      const ids_solver_config* cfg, double* out) {
  return guarded([&] {
    require(game && x && out, "null pointer argument");
    require(player >= 0, "player: must be >= 0");
    *out = ids::best_response(game->spec, static_cast<std::size_t>(player),
                              to_vec(x, game->spec.player_count()), to_config(cfg));
    return IDS_OK;
  });
}

int ids_verify_nash(const ids_game* game, const double* x, const ids_solver_config* cfg,
                    double* max_gain_out) {
  return guarded([&] {
    require(game && x && max_gain_out, "null pointer argument");
    *max_gain_out = ids::verify_ne(game->spec, to_vec(x, game->spec.player_count()),
                                   to_config(cfg));
    return IDS_OK;
  });
}

int ids_price_of_anarchy(const ids_game* game, const double* x_ne, const double* x_so,
                         double* rho_out) {
  return guarded([&] {
    require(game && x_ne && x_so && rho_out, "null pointer argument");
    const std::size_t n = game->spec.player_count();
    *rho_out = ids::price_of_anarchy(game->spec, to_vec(x_ne, n), to_vec(x_so, n));
    return IDS_OK;
  });
}

int ids_total_effort_closed_form(const ids_game* game, double* x_ne_out,
                                 double* x_so_out, double* rho_out) {
  return guarded([&] {
    require(game, "null pointer argument");
    ids::Vec ne, so;
    double rho = 0.0;
    if (!ids::total_effort_closed_forms(game->spec, &ne, &so, &rho)) {
      return fail(IDS_ERR_UNSUPPORTED,
                  "closed forms apply to the total-effort family only");
    }
    if (x_ne_out) std::memcpy(x_ne_out, ne.data(), ne.size() * sizeof(double));
    if (x_so_out) std::memcpy(x_so_out, so.data(), so.size() * sizeof(double));
    if (rho_out) *rho_out = rho;
    return static_cast<int>(IDS_OK);
  });
}

int ids_outcome(int32_t n, const double* prices, const double* proposals,
                double* xhat_out, double* taxes_out, double* price_term_out,
                double* own_penalty_out, double* balance_penalty_out,
                int32_t* x_feasible_out) {
  return guarded([&] {
    require(prices && proposals, "null pointer argument");
    require(n >= 1, "n: must be >= 1");
    const auto un = static_cast<std::size_t>(n);
    const ids::MechanismOutcome out = ids::outcome(to_profile(un, prices, proposals));
    if (xhat_out) std::memcpy(xhat_out, out.x.data(), un * sizeof(double));
    if (taxes_out) std::memcpy(taxes_out, out.taxes.data(), un * sizeof(double));
    if (price_term_out) {
      std::memcpy(price_term_out, out.price_term.data(), un * sizeof(double));
    }
    if (own_penalty_out) {
      std::memcpy(own_penalty_out, out.own_penalty.data(), un * sizeof(double));
    }
    if (balance_penalty_out) {
      std::memcpy(balance_penalty_out, out.balance_penalty.data(), un * sizeof(double));
    }
    if (x_feasible_out) *x_feasible_out = out.x_feasible ? 1 : 0;
    return IDS_OK;
  });
}

int ids_lindahl_prices(const ids_game* game, const double* x_star,
                       const ids_solver_config* cfg, double* prices_out,
                       double* multipliers_out) {
  return guarded([&] {
    require(game && x_star && prices_out, "null pointer argument");
    const std::size_t n = game->spec.player_count();
    const ids::LindahlSystem sys =
        ids::lindahl_prices(game->spec, to_vec(x_star, n), to_config(cfg));
    for (std::size_t i = 0; i < n; ++i) {
      std::memcpy(prices_out + i * n, sys.prices[i].data(), n * sizeof(double));
      if (multipliers_out) {
        std::memcpy(multipliers_out + i * n, sys.multipliers[i].data(),
                    n * sizeof(double));
      }
    }
    return IDS_OK;
  });
}

int ids_construct_equilibrium(const ids_game* game, const double* x_star,
                              const double* lindahl_prices, double* prices_out,
                              double* proposals_out, double* price_seed_out) {
  return guarded([&] {
    require(game && x_star && lindahl_prices && prices_out && proposals_out,
            "null pointer argument");
    const std::size_t n = game->spec.player_count();
    ids::LindahlSystem sys;
    sys.prices.resize(n);
    for (std::size_t i = 0; i < n; ++i) sys.prices[i] = to_vec(lindahl_prices + i * n, n);
    double seed = 0.0;
    const ids::MessageProfile m = ids::construct_equilibrium_messages(
        game->spec, to_vec(x_star, n), sys, &seed);
    flatten_profile(m, prices_out, proposals_out);
    if (price_seed_out) *price_seed_out = seed;
    return IDS_OK;
  });
}

int ids_verify_mechanism(const ids_game* game, const double* prices,
                         const double* proposals, const ids_solver_config* cfg,
                         double* max_gain_out) {
  return guarded([&] {
    require(game && prices && proposals && max_gain_out, "null pointer argument");
    const std::size_t n = game->spec.player_count();
    *max_gain_out = ids::verify_mechanism_ne(
        game->spec, to_profile(n, prices, proposals), to_config(cfg));
    return IDS_OK;
  });
}

int ids_externality_check(const ids_game* game, const double* xhat,
                          const double* lindahl_prices, int32_t* verdicts_out,
                          int32_t* all_hold_out) {
  return guarded([&] {
    require(game && xhat && lindahl_prices, "null pointer argument");
    const std::size_t n = game->spec.player_count();
    ids::LindahlSystem sys;
    sys.prices.resize(n);
    for (std::size_t i = 0; i < n; ++i) sys.prices[i] = to_vec(lindahl_prices + i * n, n);
    const ids::ExternalityReport rep =
        ids::externality_sign_check(game->spec, to_vec(xhat, n), sys);
    if (verdicts_out) {
      for (std::size_t k = 0; k < n * n; ++k) verdicts_out[k] = -1;
      for (const ids::PairVerdict& v : rep.pairs) {
        verdicts_out[v.payer * n + v.investor] = v.vacuous ? -1 : (v.holds ? 1 : 0);
      }
    }
    if (all_hold_out) *all_hold_out = rep.all_hold ? 1 : 0;
    return IDS_OK;
  });
}

int ids_run_dynamics(const ids_game* game, const double* prices0,
                     const double* proposals0, const ids_solver_config* cfg,
                     ids_dynamics_observer observer, void* user,
                     double* prices_final, double* proposals_final,
                     ids_dynamics_report* report) {
  return guarded([&] {
    require(game && prices0 && proposals0, "null pointer argument");
    const std::size_t n = game->spec.player_count();
    ids::DynamicsObserver obs;
    if (observer) {
      obs = [&](std::int64_t round, const ids::MessageProfile& m,
                const ids::MechanismOutcome& out, double social, double change) {
        std::vector<double> flat_prices(n * n), flat_proposals(n * n);
        flatten_profile(m, flat_prices.data(), flat_proposals.data());
        return observer(round, static_cast<int32_t>(n), flat_prices.data(),
                        flat_proposals.data(), out.x.data(), out.taxes.data(), social,
                        change, user) != 0;
      };
    }
    const ids::DynamicsReport rep = ids::run_dynamics(
        game->spec, to_profile(n, prices0, proposals0), to_config(cfg), obs);
    flatten_profile(rep.terminal, prices_final, proposals_final);
    if (report) {
      report->converged = rep.converged;
      report->rounds = rep.rounds;
      report->terminal_deviation = rep.terminal_deviation;
      report->terminal_certified = rep.terminal_certified;
    }
    return IDS_OK;
  });
}

int ids_seed_profile(const ids_game* game, uint64_t seed, double* prices_out,
                     double* proposals_out) {
  return guarded([&] {
    require(game && prices_out && proposals_out, "null pointer argument");
    const ids::MessageProfile m =
        ids::seeded_profile(game->spec, seed, ids::SolverConfig{}.bound_slack);
    flatten_profile(m, prices_out, proposals_out);
    return IDS_OK;
  });
}

int ids_ir_sequential(const ids_game* game, ids_ir_outcome* out) {
  return guarded([&] {
    require(game && out, "null pointer argument");
    fill_ir(ids::sequential_equilibrium(game->spec), out);
    return IDS_OK;
  });
}

int ids_ir_gap_formula(int32_t n, double c1, double* out) {
  return guarded([&] {
    require(out, "null pointer argument");
    require(n >= 2, "n: must be >= 2");
    *out = ids::ir_gap_formula(static_cast<std::size_t>(n), c1);
    return IDS_OK;
  });
}

int ids_ir_gap_numeric(const ids_game* game, const ids_solver_config* cfg,
                       ids_ir_outcome* out) {
  return guarded([&] {
    require(game && out, "null pointer argument");
    fill_ir(ids::ir_gap_numeric(game->spec, to_config(cfg)), out);
    return IDS_OK;
  });
}

}  // extern "C"
