/* Interdependent-security game toolkit: C interface of libids.
 *
 * Conventions
 *   - Every fallible call returns an ids_status; IDS_OK is 0. On failure,
 *     ids_last_error() returns a thread-local message describing what was
 *     rejected; the pointer stays valid until the next libids call on the
 *     same thread.
 *   - Games are opaque handles created by the ids_game_* constructors and
 *     released with ids_game_destroy.
 *   - Investment profiles are length-n double arrays. Message profiles are
 *     two player-major n*n arrays: prices[i*n + k] and proposals[i*n + k]
 *     hold player i's price/proposal for coordinate k.
 */
#ifndef IDS_H
#define IDS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IDS_API __declspec(dllexport)
#else
#define IDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ids_status {
  IDS_OK = 0,
  IDS_ERR_INVALID_ARGUMENT = 1, /* malformed document, bad parameter, bad profile */
  IDS_ERR_NO_CONVERGENCE = 2,   /* iteration cap hit before the tolerance */
  IDS_ERR_NOT_CERTIFIED = 3,    /* reserved for callers mapping failed certifications */
  IDS_ERR_UNSUPPORTED = 4,      /* operation needs a different risk family */
  IDS_ERR_INTERNAL = 5
} ids_status;

IDS_API const char* ids_status_name(int status);
IDS_API const char* ids_last_error(void);
IDS_API const char* ids_version(void);

typedef struct ids_game ids_game;

/* Solver knobs. Always initialize with ids_solver_config_init, then override
 * individual fields. */
typedef struct ids_solver_config {
  double gradient_tol;
  int64_t max_iterations;
  double backtrack_shrink;
  double armijo;
  double sweep_tol;
  int32_t deviation_samples;
  uint64_t seed;
  double bound_slack;
  double lindahl_kkt_tol;
  double dynamics_step;
  int64_t dynamics_round_cap;
} ids_solver_config;

IDS_API void ids_solver_config_init(ids_solver_config* cfg);

/* ---- game construction -------------------------------------------------- */

/* Common loss alpha*exp(-beta*sum_j x_j). costs has n entries, all > 0. */
IDS_API int ids_game_create_total_effort(int32_t n, const double* costs,
                                         double alpha, double beta,
                                         ids_game** out);

/* Per-player loss alphas[i]*exp(-sum_j weights[i*n+j]*x_j); weights row-major,
 * all entries > 0. */
IDS_API int ids_game_create_weighted(int32_t n, const double* costs,
                                     const double* alphas, const double* weights,
                                     ids_game** out);

/* Builds a game from the JSON game document (see README for the schema).
 * config (nullable) receives the defaults overridden by the document's
 * "solver" object and "seed". seed_present (nullable) is set to 1 when the
 * document carried a seed. */
IDS_API int ids_game_from_json(const char* text, ids_game** out,
                               ids_solver_config* config, int32_t* seed_present);

IDS_API void ids_game_destroy(ids_game* game);
IDS_API int32_t ids_game_player_count(const ids_game* game);
IDS_API int ids_game_costs(const ids_game* game, double* costs_out);
/* Writes the family tag ("total_effort_exp"/"weighted_effort_exp"). */
IDS_API int ids_game_family(const ids_game* game, char* buf, size_t bufsize);
IDS_API int ids_game_has_cost_ties(const ids_game* game, int32_t* out);

/* ---- evaluation --------------------------------------------------------- */

IDS_API int ids_risk(const ids_game* game, int32_t player, const double* x,
                     double* out);
IDS_API int ids_cost(const ids_game* game, int32_t player, const double* x,
                     double* out);
IDS_API int ids_utility(const ids_game* game, int32_t player, const double* x,
                        double tax, double* out);
IDS_API int ids_social_cost(const ids_game* game, const double* x, double* out);
IDS_API int ids_cost_gradient(const ids_game* game, int32_t player,
                              const double* x, double* grad_out);
IDS_API int ids_strategy_bound(const ids_game* game, double slack, double* out);

/* ---- equilibrium solvers ------------------------------------------------ */

typedef struct ids_solve_report {
  int32_t converged;
  int64_t iterations;     /* gradient iterations or best-response sweeps */
  double kkt_residual;    /* social optimum only */
  double max_deviation;   /* equilibrium only: best unilateral improvement */
  int32_t non_unique;     /* optimum/equilibrium known not to be unique */
  double closed_form_gap; /* NaN unless the total-effort closed form applies */
} ids_solve_report;

IDS_API int ids_solve_social_optimum(const ids_game* game,
                                     const ids_solver_config* cfg, double* x_out,
                                     ids_solve_report* report);
IDS_API int ids_solve_nash(const ids_game* game, const ids_solver_config* cfg,
                           double* x_out, ids_solve_report* report,
                           int8_t* active_out /* nullable, n entries */);
/* x[player] is ignored; the rest are the opponents' efforts. */
IDS_API int ids_best_response(const ids_game* game, int32_t player,
                              const double* x, const ids_solver_config* cfg,
                              double* out);
IDS_API int ids_verify_nash(const ids_game* game, const double* x,
                            const ids_solver_config* cfg, double* max_gain_out);
IDS_API int ids_price_of_anarchy(const ids_game* game, const double* x_ne,
                                 const double* x_so, double* rho_out);
/* IDS_ERR_UNSUPPORTED unless the game uses the total-effort family. Any
 * output may be null. */
IDS_API int ids_total_effort_closed_form(const ids_game* game, double* x_ne_out,
                                         double* x_so_out, double* rho_out);

/* ---- mechanism ---------------------------------------------------------- */

/* Averages proposals and assesses the cyclic discrepancy taxes. Works on any
 * n >= 3 message profile; no game handle is needed. The three tax components
 * (price term, own penalty, balancing penalty; taxes = price + own - balance)
 * are written when the pointers are non-null. x_feasible_out (nullable) is 0
 * when the averaged allocation has a negative coordinate. */
IDS_API int ids_outcome(int32_t n, const double* prices, const double* proposals,
                        double* xhat_out, double* taxes_out, double* price_term_out,
                        double* own_penalty_out, double* balance_penalty_out,
                        int32_t* x_feasible_out);

/* Personalized prices (n*n, player-major) supporting the social optimum
 * x_star, and the matching multipliers (nullable). Rejects x_star whose
 * projected-KKT residual exceeds cfg->lindahl_kkt_tol. */
IDS_API int ids_lindahl_prices(const ids_game* game, const double* x_star,
                               const ids_solver_config* cfg, double* prices_out,
                               double* multipliers_out);

/* Equilibrium messages for x_star given its personalized prices: every
 * proposal equals x_star and the price vectors solve the cyclic difference
 * system. price_seed_out (nullable) receives the recursion's seed value. */
IDS_API int ids_construct_equilibrium(const ids_game* game, const double* x_star,
                                      const double* lindahl_prices,
                                      double* prices_out, double* proposals_out,
                                      double* price_seed_out);

/* Best utility improvement any single player can reach by changing its own
 * message (analytic deviation family plus cfg->deviation_samples random
 * draws). <= tolerance certifies the profile. */
IDS_API int ids_verify_mechanism(const ids_game* game, const double* prices,
                                 const double* proposals,
                                 const ids_solver_config* cfg,
                                 double* max_gain_out);

/* Compensation-direction check at an allocation: active investors that lower
 * a payer's cost must carry a positive personalized price. verdicts
 * (nullable, n*n player-major) receives 1 = holds, 0 = violated, -1 = vacuous
 * (diagonal, inactive investor, or nonnegative slope). */
IDS_API int ids_externality_check(const ids_game* game, const double* xhat,
                                  const double* lindahl_prices,
                                  int32_t* verdicts_out, int32_t* all_hold_out);

/* Observation hook for the message dynamics; return 0 to stop the run. */
typedef int (*ids_dynamics_observer)(int64_t round, int32_t n,
                                     const double* prices, const double* proposals,
                                     const double* xhat, const double* taxes,
                                     double social_cost, double max_change,
                                     void* user);

typedef struct ids_dynamics_report {
  int32_t converged;
  int64_t rounds;
  double terminal_deviation;
  int32_t terminal_certified;
} ids_dynamics_report;

/* Damped heuristic message exchange (no convergence guarantee); initial
 * proposals must be nonnegative. Terminal messages are written to the
 * nullable prices_final/proposals_final buffers. */
IDS_API int ids_run_dynamics(const ids_game* game, const double* prices0,
                             const double* proposals0, const ids_solver_config* cfg,
                             ids_dynamics_observer observer, void* user,
                             double* prices_final, double* proposals_final,
                             ids_dynamics_report* report);

/* Deterministic seeded starting profile for the dynamics. */
IDS_API int ids_seed_profile(const ids_game* game, uint64_t seed,
                             double* prices_out, double* proposals_out);

/* ---- individual rationality (unit total-effort family) ------------------ */

typedef enum ids_ir_regime {
  IDS_IR_FREE_RIDE = 0,
  IDS_IR_ALL_EFFORT = 1,
  IDS_IR_MIXED_CORNER = 2
} ids_ir_regime;

typedef struct ids_ir_outcome {
  double loner_effort;
  double partner_effort;
  int32_t regime;
  double u_in;  /* NaN from ids_ir_sequential; filled by ids_ir_gap_numeric */
  double u_out;
  double gap;   /* u_in - u_out */
} ids_ir_outcome;

IDS_API int ids_ir_sequential(const ids_game* game, ids_ir_outcome* out);
IDS_API int ids_ir_gap_formula(int32_t n, double c1, double* out);
IDS_API int ids_ir_gap_numeric(const ids_game* game, const ids_solver_config* cfg,
                               ids_ir_outcome* out);

#ifdef __cplusplus
}
#endif

#endif /* IDS_H */
