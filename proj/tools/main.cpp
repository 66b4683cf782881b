// Command-line front end for libids: reads a JSON game document, dispatches
// the solvers / mechanism / opt-out analyses through the C API, and emits a
// machine-readable JSON report (plus optional CSV for trajectories and
// per-player effort tables).
//
// Exit codes: 0 ok and all requested certifications passed, 2 validation
// error, 3 solver non-convergence, 4 certification failure.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ids/ids.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitNotCertified = 4;

constexpr double kNashCertTol = 1e-8;
constexpr double kMechanismCertTol = 1e-6;
constexpr double kBudgetTol = 1e-9;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& msg) {
  throw CliError{code, msg};
}

int exit_code_for(int status) {
  switch (status) {
    case IDS_ERR_NO_CONVERGENCE: return kExitNoConvergence;
    case IDS_ERR_NOT_CERTIFIED: return kExitNotCertified;
    default: return kExitValidation;
  }
}

void check(int status, const std::string& context) {
  if (status != IDS_OK) {
    fail(exit_code_for(status), context + ": " + ids_last_error());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitValidation, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitValidation, "cannot write " + path);
  out << text;
}

std::string fnv1a_hex(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 1469598103934665603ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016" PRIx64, h);
  return buf;
}

std::string fnv1a_hex(const std::string& s) { return fnv1a_hex(s.data(), s.size()); }

// Reports carry 9 significant digits; the round-trip through text pins the
// emitted bytes so that equal runs produce equal documents.
double round9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

std::string hexfloat(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

bool g_emit_raw = false;

void set_num(ordered_json& obj, const std::string& key, double v) {
  obj[key] = round9(v);
  if (g_emit_raw) obj[key + "_raw"] = hexfloat(v);
}

void set_vec(ordered_json& obj, const std::string& key, const std::vector<double>& v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(round9(x));
  obj[key] = std::move(arr);
  if (g_emit_raw) {
    ordered_json raw = ordered_json::array();
    for (double x : v) raw.push_back(hexfloat(x));
    obj[key + "_raw"] = std::move(raw);
  }
}

void set_matrix(ordered_json& obj, const std::string& key, const std::vector<double>& m,
                size_t n) {
  ordered_json rows = ordered_json::array();
  for (size_t i = 0; i < n; ++i) {
    ordered_json row = ordered_json::array();
    for (size_t k = 0; k < n; ++k) row.push_back(round9(m[i * n + k]));
    rows.push_back(std::move(row));
  }
  obj[key] = std::move(rows);
}

struct Game {
  ids_game* handle = nullptr;
  ids_solver_config config{};
  int32_t n = 0;
  std::string family;
  std::vector<double> costs;
  std::string input_digest;

  ~Game() { ids_game_destroy(handle); }
};

Game load_game(const std::string& spec_path, bool seed_set, uint64_t seed_override) {
  Game g;
  const std::string text = read_file(spec_path);
  g.input_digest = fnv1a_hex(text);
  int32_t seed_present = 0;
  check(ids_game_from_json(text.c_str(), &g.handle, &g.config, &seed_present),
        spec_path);
  if (seed_set) g.config.seed = seed_override;
  g.n = ids_game_player_count(g.handle);
  g.costs.resize(g.n);
  check(ids_game_costs(g.handle, g.costs.data()), "costs");
  char family[32];
  check(ids_game_family(g.handle, family, sizeof family), "family");
  g.family = family;
  return g;
}

ordered_json config_echo(const Game& g) {
  const ids_solver_config& c = g.config;
  ordered_json j;
  j["gradient_tol"] = c.gradient_tol;
  j["max_iterations"] = c.max_iterations;
  j["backtrack_shrink"] = c.backtrack_shrink;
  j["armijo"] = c.armijo;
  j["sweep_tol"] = c.sweep_tol;
  j["deviation_samples"] = c.deviation_samples;
  j["seed"] = c.seed;
  j["bound_slack"] = c.bound_slack;
  j["lindahl_kkt_tol"] = c.lindahl_kkt_tol;
  j["dynamics_step"] = c.dynamics_step;
  j["dynamics_round_cap"] = c.dynamics_round_cap;
  return j;
}

ordered_json report_skeleton(const char* command, const Game& g) {
  ordered_json rep;
  rep["command"] = command;
  rep["input_digest"] = g.input_digest;
  rep["n"] = g.n;
  rep["family"] = g.family;
  int32_t ties = 0;
  check(ids_game_has_cost_ties(g.handle, &ties), "cost ties");
  rep["cost_ties"] = ties != 0;
  rep["config"] = config_echo(g);
  return rep;
}

// Emitted profiles must re-validate as investment profiles.
void require_valid_efforts(const std::vector<double>& x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v) || v < 0.0) {
      fail(1, std::string(what) + ": produced an invalid effort " + std::to_string(v));
    }
  }
}

// Digest over everything except the volatile timing block, then emit.
int finish_report(ordered_json& rep, const std::string& out_path, bool all_certified,
                  std::chrono::steady_clock::time_point start) {
  const auto elapsed = std::chrono::duration<double, std::milli>(
      std::chrono::steady_clock::now() - start);
  ordered_json for_digest = rep;
  for_digest.erase("timing");
  rep["digest"] = fnv1a_hex(for_digest.dump());
  rep["timing"]["wall_clock_ms"] = elapsed.count();
  const std::string text = rep.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
  return all_certified ? 0 : kExitNotCertified;
}

bool all_true(const ordered_json& certs) {
  for (const auto& [key, value] : certs.items()) {
    (void)key;
    if (value.is_boolean() && !value.get<bool>()) return false;
  }
  return true;
}

// ---- profile files -------------------------------------------------------

struct FlatProfile {
  std::vector<double> prices;     // n*n player-major
  std::vector<double> proposals;  // n*n player-major
};

FlatProfile parse_profile_file(const std::string& path, int32_t n) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(kExitValidation, path + ": not valid JSON (" + e.what() + ")");
  }
  if (!doc.is_object() || !doc.contains("players") || !doc["players"].is_array()) {
    fail(kExitValidation, path + ": expected {\"players\": [...]}");
  }
  const auto& players = doc["players"];
  if (players.size() != static_cast<size_t>(n)) {
    fail(kExitValidation, path + ": expected " + std::to_string(n) + " players, got " +
                              std::to_string(players.size()));
  }
  FlatProfile fp;
  fp.prices.resize(static_cast<size_t>(n) * n);
  fp.proposals.resize(static_cast<size_t>(n) * n);
  for (size_t i = 0; i < players.size(); ++i) {
    const auto& pl = players[i];
    const std::string where = path + ": players[" + std::to_string(i) + "]";
    if (!pl.is_object() || !pl.contains("prices") || !pl.contains("proposal")) {
      fail(kExitValidation, where + ": expected {\"prices\": [...], \"proposal\": [...]}");
    }
    for (const char* key : {"prices", "proposal"}) {
      const auto& arr = pl[key];
      if (!arr.is_array() || arr.size() != static_cast<size_t>(n)) {
        fail(kExitValidation, where + "." + key + ": expected " + std::to_string(n) +
                                  " numbers");
      }
      for (size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) {
          fail(kExitValidation,
               where + "." + key + "[" + std::to_string(k) + "]: must be a number");
        }
        const double v = arr[k].get<double>();
        (key[2] == 'i' ? fp.prices : fp.proposals)[i * n + k] = v;
      }
    }
  }
  return fp;
}

std::string profile_to_json(int32_t n, const FlatProfile& fp) {
  ordered_json doc;
  doc["n"] = n;
  ordered_json players = ordered_json::array();
  for (int32_t i = 0; i < n; ++i) {
    ordered_json pl;
    ordered_json prices = ordered_json::array();
    ordered_json proposal = ordered_json::array();
    for (int32_t k = 0; k < n; ++k) {
      prices.push_back(round9(fp.prices[i * n + k]));
      proposal.push_back(round9(fp.proposals[i * n + k]));
    }
    pl["prices"] = std::move(prices);
    pl["proposal"] = std::move(proposal);
    players.push_back(std::move(pl));
  }
  doc["players"] = std::move(players);
  return doc.dump(2) + "\n";
}

// ---- solve ---------------------------------------------------------------

struct SolveOptions {
  std::string spec_path;
  std::string mode;
  std::string out_path;
  std::string csv_path;
  bool seed_set = false;
  uint64_t seed = 0;
};

void write_effort_csv(const std::string& path, int32_t n, const double* x_ne,
                      const double* x_so) {
  std::ostringstream csv;
  csv << "player";
  if (x_ne) csv << ",x_ne";
  if (x_so) csv << ",x_social";
  csv << "\n";
  for (int32_t i = 0; i < n; ++i) {
    csv << (i + 1);
    char buf[64];
    if (x_ne) {
      std::snprintf(buf, sizeof buf, ",%.9g", x_ne[i]);
      csv << buf;
    }
    if (x_so) {
      std::snprintf(buf, sizeof buf, ",%.9g", x_so[i]);
      csv << buf;
    }
    csv << "\n";
  }
  write_file(path, csv.str());
}

int run_solve(const SolveOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Game g = load_game(opt.spec_path, opt.seed_set, opt.seed);
  ordered_json rep = report_skeleton("solve", g);
  rep["mode"] = opt.mode;
  ordered_json outputs;
  ordered_json certs = ordered_json::object();
  int worst_status = IDS_OK;

  std::vector<double> x_so(g.n), x_ne(g.n);
  ids_solve_report so_rep{}, ne_rep{};
  std::vector<int8_t> active(g.n, 0);

  const bool want_so = opt.mode == "social" || opt.mode == "poa";
  const bool want_ne = opt.mode == "ne" || opt.mode == "poa";

  if (want_so) {
    const int st = ids_solve_social_optimum(g.handle, &g.config, x_so.data(), &so_rep);
    if (st != IDS_OK && st != IDS_ERR_NO_CONVERGENCE) check(st, "social optimum");
    if (st == IDS_ERR_NO_CONVERGENCE) worst_status = st;
    require_valid_efforts(x_so, "social optimum");
    ordered_json so;
    set_vec(so, "x", x_so);
    so["converged"] = so_rep.converged != 0;
    so["iterations"] = so_rep.iterations;
    set_num(so, "kkt_residual", so_rep.kkt_residual);
    so["non_unique"] = so_rep.non_unique != 0;
    double sc = 0.0;
    check(ids_social_cost(g.handle, x_so.data(), &sc), "social cost");
    set_num(so, "social_cost", sc);
    if (!std::isnan(so_rep.closed_form_gap)) {
      set_num(so, "closed_form_gap", so_rep.closed_form_gap);
    }
    outputs["social_optimum"] = std::move(so);
    certs["social_kkt"] = so_rep.converged != 0;
  }
  if (want_ne) {
    const int st = ids_solve_nash(g.handle, &g.config, x_ne.data(), &ne_rep, active.data());
    if (st != IDS_OK && st != IDS_ERR_NO_CONVERGENCE) check(st, "equilibrium");
    if (st == IDS_ERR_NO_CONVERGENCE) worst_status = st;
    require_valid_efforts(x_ne, "equilibrium");
    ordered_json ne;
    set_vec(ne, "x", x_ne);
    ne["converged"] = ne_rep.converged != 0;
    ne["sweeps"] = ne_rep.iterations;
    set_num(ne, "max_profitable_deviation", ne_rep.max_deviation);
    ordered_json act = ordered_json::array();
    for (int32_t i = 0; i < g.n; ++i) act.push_back(active[i] != 0);
    ne["active"] = std::move(act);
    ne["non_unique"] = ne_rep.non_unique != 0;
    double sc = 0.0;
    check(ids_social_cost(g.handle, x_ne.data(), &sc), "social cost");
    set_num(ne, "social_cost", sc);
    outputs["equilibrium"] = std::move(ne);
    certs["nash_certificate"] =
        ne_rep.converged != 0 && ne_rep.max_deviation <= kNashCertTol;
  }
  if (opt.mode == "poa") {
    double rho = 0.0;
    check(ids_price_of_anarchy(g.handle, x_ne.data(), x_so.data(), &rho),
          "price of anarchy");
    ordered_json poa;
    set_num(poa, "rho", rho);
    double cf_rho = 0.0;
    if (ids_total_effort_closed_form(g.handle, nullptr, nullptr, &cf_rho) == IDS_OK) {
      set_num(poa, "rho_closed_form", cf_rho);
      set_num(poa, "rho_closed_form_gap", std::abs(rho - cf_rho));
    }
    ordered_json table = ordered_json::array();
    for (int32_t i = 0; i < g.n; ++i) {
      ordered_json row;
      row["player"] = i + 1;
      row["x_ne"] = round9(x_ne[i]);
      row["x_social"] = round9(x_so[i]);
      table.push_back(std::move(row));
    }
    poa["efforts"] = std::move(table);
    outputs["price_of_anarchy"] = std::move(poa);
    certs["poa_at_least_one"] = rho >= 1.0 - 1e-9;
  }

  if (!opt.csv_path.empty()) {
    write_effort_csv(opt.csv_path, g.n, want_ne ? x_ne.data() : nullptr,
                     want_so ? x_so.data() : nullptr);
    rep["csv"] = opt.csv_path;
  }

  rep["outputs"] = std::move(outputs);
  rep["certifications"] = certs;
  const int rc = finish_report(rep, opt.out_path, all_true(certs), start);
  if (worst_status == IDS_ERR_NO_CONVERGENCE) return kExitNoConvergence;
  return rc;
}

// ---- mechanism -----------------------------------------------------------

struct MechanismOptions {
  std::string spec_path;
  std::string action;
  std::string profile_path;
  std::string profile_out_path;
  std::string out_path;
  std::string csv_path;
  bool seed_set = false;
  uint64_t seed = 0;
  bool rounds_set = false;
  int64_t rounds = 0;
  bool step_set = false;
  double step = 0.0;
};

ordered_json profile_json(int32_t n, const FlatProfile& fp) {
  ordered_json players = ordered_json::array();
  for (int32_t i = 0; i < n; ++i) {
    ordered_json pl;
    std::vector<double> pr(fp.prices.begin() + i * n, fp.prices.begin() + (i + 1) * n);
    std::vector<double> xp(fp.proposals.begin() + i * n,
                           fp.proposals.begin() + (i + 1) * n);
    set_vec(pl, "prices", pr);
    set_vec(pl, "proposal", xp);
    players.push_back(std::move(pl));
  }
  return players;
}

ordered_json outcome_json(const Game& g, const FlatProfile& fp, double* budget_out) {
  std::vector<double> xhat(g.n), taxes(g.n), price_term(g.n), own(g.n), bal(g.n);
  int32_t feasible = 0;
  check(ids_outcome(g.n, fp.prices.data(), fp.proposals.data(), xhat.data(),
                    taxes.data(), price_term.data(), own.data(), bal.data(), &feasible),
        "outcome");
  double budget = 0.0;
  for (double t : taxes) budget += t;
  if (budget_out) *budget_out = budget;
  ordered_json out;
  set_vec(out, "x", xhat);
  set_vec(out, "taxes", taxes);
  set_vec(out, "price_term", price_term);
  set_vec(out, "own_penalty", own);
  set_vec(out, "balance_penalty", bal);
  set_num(out, "budget_residual", budget);
  out["x_feasible"] = feasible != 0;
  if (feasible == 0) {
    out["note"] = "averaged proposal has negative coordinates; not a valid "
                  "investment profile";
  }
  return out;
}

int run_mechanism(const MechanismOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Game g = load_game(opt.spec_path, opt.seed_set, opt.seed);
  if (g.n < 3) {
    fail(kExitValidation, "mechanism: at least 3 players required, got " +
                              std::to_string(g.n));
  }
  if (opt.rounds_set) g.config.dynamics_round_cap = opt.rounds;
  if (opt.step_set) g.config.dynamics_step = opt.step;
  ordered_json rep = report_skeleton("mechanism", g);
  rep["action"] = opt.action;
  ordered_json outputs;
  ordered_json certs = ordered_json::object();
  const size_t nn = static_cast<size_t>(g.n) * g.n;

  if (opt.action == "construct") {
    std::vector<double> x_so(g.n);
    ids_solve_report so_rep{};
    check(ids_solve_social_optimum(g.handle, &g.config, x_so.data(), &so_rep),
          "social optimum");
    std::vector<double> lindahl(nn), multipliers(nn);
    check(ids_lindahl_prices(g.handle, x_so.data(), &g.config, lindahl.data(),
                             multipliers.data()),
          "personalized prices");

    FlatProfile fp;
    fp.prices.resize(nn);
    fp.proposals.resize(nn);
    double price_seed = 0.0;
    check(ids_construct_equilibrium(g.handle, x_so.data(), lindahl.data(),
                                    fp.prices.data(), fp.proposals.data(), &price_seed),
          "equilibrium construction");

    double budget = 0.0;
    ordered_json out = outcome_json(g, fp, &budget);
    double max_gain = 0.0;
    check(ids_verify_mechanism(g.handle, fp.prices.data(), fp.proposals.data(),
                               &g.config, &max_gain),
          "verification");
    int32_t ext_ok = 0;
    check(ids_externality_check(g.handle, x_so.data(), lindahl.data(), nullptr, &ext_ok),
          "externality check");

    // price-difference residual of the cyclic system
    double recursion_residual = 0.0;
    double lindahl_sum = 0.0;
    for (int32_t k = 0; k < g.n; ++k) {
      double s = 0.0;
      for (int32_t i = 0; i < g.n; ++i) s += lindahl[i * g.n + k];
      lindahl_sum = std::max(lindahl_sum, std::abs(s));
    }
    for (int32_t i = 0; i < g.n; ++i) {
      const int32_t s1 = (i + 1) % g.n, s2 = (i + 2) % g.n;
      for (int32_t k = 0; k < g.n; ++k) {
        const double d =
            fp.prices[s1 * g.n + k] - fp.prices[s2 * g.n + k] - lindahl[i * g.n + k];
        recursion_residual = std::max(recursion_residual, std::abs(d));
      }
    }

    set_vec(outputs, "x_social", x_so);
    set_matrix(outputs, "lindahl_prices", lindahl, g.n);
    set_matrix(outputs, "multipliers", multipliers, g.n);
    set_num(outputs, "price_seed", price_seed);
    outputs["messages"] = profile_json(g.n, fp);
    outputs["outcome"] = std::move(out);
    set_num(outputs, "max_profitable_deviation", max_gain);
    set_num(outputs, "lindahl_sum_residual", lindahl_sum);
    set_num(outputs, "price_difference_residual", recursion_residual);

    certs["equilibrium_certified"] = max_gain <= kMechanismCertTol;
    certs["budget_balanced"] = std::abs(budget) <= kBudgetTol;
    certs["lindahl_prices_sum_to_zero"] = lindahl_sum <= 1e-12;
    certs["price_difference_system"] = recursion_residual <= 1e-12;
    certs["externality_signs"] = ext_ok != 0;

    if (!opt.profile_out_path.empty()) {
      write_file(opt.profile_out_path, profile_to_json(g.n, fp));
      rep["profile_out"] = opt.profile_out_path;
    }
  } else if (opt.action == "verify") {
    if (opt.profile_path.empty()) {
      fail(kExitValidation, "mechanism verify requires --profile <file>");
    }
    FlatProfile fp = parse_profile_file(opt.profile_path, g.n);
    double budget = 0.0;
    ordered_json out = outcome_json(g, fp, &budget);
    const bool feasible = out["x_feasible"].get<bool>();
    outputs["outcome"] = std::move(out);
    if (feasible) {
      double max_gain = 0.0;
      check(ids_verify_mechanism(g.handle, fp.prices.data(), fp.proposals.data(),
                                 &g.config, &max_gain),
            "verification");
      set_num(outputs, "max_profitable_deviation", max_gain);
      certs["equilibrium_certified"] = max_gain <= kMechanismCertTol;
    } else {
      outputs["verification_note"] =
          "allocation leaves the feasible cone; utilities and hence deviation "
          "gains are undefined";
      certs["equilibrium_certified"] = false;
    }
    certs["budget_balanced"] = std::abs(budget) <= kBudgetTol;
  } else {  // dynamics
    FlatProfile fp;
    fp.prices.resize(nn);
    fp.proposals.resize(nn);
    if (!opt.profile_path.empty()) {
      fp = parse_profile_file(opt.profile_path, g.n);
      rep["initial_profile"] = opt.profile_path;
    } else {
      check(ids_seed_profile(g.handle, g.config.seed, fp.prices.data(),
                             fp.proposals.data()),
            "seed profile");
      rep["initial_profile"] = "seeded";
    }

    struct TrajectoryState {
      std::ostringstream csv;
      bool want_csv = false;
      double worst_budget = 0.0;
      int32_t n = 0;
    } traj;
    traj.want_csv = !opt.csv_path.empty();
    traj.n = g.n;
    if (traj.want_csv) {
      traj.csv << "round,max_change,social_cost,budget_residual,message_digest";
      for (int32_t k = 1; k <= g.n; ++k) traj.csv << ",xhat_" << k;
      for (int32_t k = 1; k <= g.n; ++k) traj.csv << ",tax_" << k;
      traj.csv << "\n";
    }

    auto observer = [](int64_t round, int32_t n, const double* prices,
                       const double* proposals, const double* xhat, const double* taxes,
                       double social, double change, void* user) -> int {
      auto* st = static_cast<TrajectoryState*>(user);
      double budget = 0.0;
      for (int32_t k = 0; k < n; ++k) budget += taxes[k];
      st->worst_budget = std::max(st->worst_budget, std::abs(budget));
      if (st->want_csv) {
        char buf[64];
        st->csv << round;
        std::snprintf(buf, sizeof buf, ",%.9g", change);
        st->csv << buf;
        std::snprintf(buf, sizeof buf, ",%.9g", social);
        st->csv << buf;
        std::snprintf(buf, sizeof buf, ",%.3g", budget);
        st->csv << buf;
        const size_t bytes = static_cast<size_t>(n) * n * sizeof(double);
        std::string digest = fnv1a_hex(prices, bytes);
        digest += "/";
        digest += fnv1a_hex(proposals, bytes);
        st->csv << "," << digest;
        for (int32_t k = 0; k < n; ++k) {
          std::snprintf(buf, sizeof buf, ",%.9g", xhat[k]);
          st->csv << buf;
        }
        for (int32_t k = 0; k < n; ++k) {
          std::snprintf(buf, sizeof buf, ",%.9g", taxes[k]);
          st->csv << buf;
        }
        st->csv << "\n";
      }
      return 1;
    };

    FlatProfile terminal;
    terminal.prices.resize(nn);
    terminal.proposals.resize(nn);
    ids_dynamics_report dyn{};
    check(ids_run_dynamics(g.handle, fp.prices.data(), fp.proposals.data(), &g.config,
                           observer, &traj, terminal.prices.data(),
                           terminal.proposals.data(), &dyn),
          "dynamics");

    if (traj.want_csv) {
      write_file(opt.csv_path, traj.csv.str());
      rep["csv"] = opt.csv_path;
    }

    double budget = 0.0;
    ordered_json out = outcome_json(g, terminal, &budget);
    double terminal_social = 0.0;
    {
      std::vector<double> xhat(g.n);
      check(ids_outcome(g.n, terminal.prices.data(), terminal.proposals.data(),
                        xhat.data(), nullptr, nullptr, nullptr, nullptr, nullptr),
            "outcome");
      check(ids_social_cost(g.handle, xhat.data(), &terminal_social), "social cost");
    }
    outputs["rounds"] = dyn.rounds;
    outputs["converged"] = dyn.converged != 0;
    outputs["heuristic"] = "damped projected best-direction updates; no convergence "
                           "guarantee is claimed";
    set_num(outputs, "terminal_social_cost", terminal_social);
    set_num(outputs, "max_budget_residual", traj.worst_budget);
    set_num(outputs, "terminal_deviation", dyn.terminal_deviation);
    outputs["terminal_certified"] = dyn.terminal_certified != 0;
    outputs["terminal_outcome"] = std::move(out);
    outputs["terminal_messages"] = profile_json(g.n, terminal);
    certs["budget_balanced_along_trajectory"] = traj.worst_budget <= kBudgetTol;
  }

  rep["outputs"] = std::move(outputs);
  rep["certifications"] = certs;
  return finish_report(rep, opt.out_path, all_true(certs), start);
}

// ---- ir ------------------------------------------------------------------

struct IrOptions {
  std::string spec_path;
  std::string out_path;
  bool seed_set = false;
  uint64_t seed = 0;
};

int run_ir(const IrOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Game g = load_game(opt.spec_path, opt.seed_set, opt.seed);
  ordered_json rep = report_skeleton("ir", g);
  ordered_json outputs;
  ordered_json certs = ordered_json::object();

  ids_ir_outcome ir{};
  check(ids_ir_gap_numeric(g.handle, &g.config, &ir), "opt-out analysis");

  const char* regime = ir.regime == IDS_IR_FREE_RIDE     ? "free-ride"
                       : ir.regime == IDS_IR_ALL_EFFORT  ? "all-effort"
                                                         : "mixed-corner";
  outputs["regime"] = regime;
  set_num(outputs, "loner_effort", ir.loner_effort);
  set_num(outputs, "partner_effort", ir.partner_effort);
  set_num(outputs, "u_in", ir.u_in);
  set_num(outputs, "u_out", ir.u_out);
  set_num(outputs, "gap", ir.gap);
  outputs["individually_rational"] = ir.gap >= 0.0;

  double formula = 0.0;
  check(ids_ir_gap_formula(g.n, g.costs[0], &formula), "gap formula");
  set_num(outputs, "gap_formula_literal", formula);
  const bool formula_valid = ir.regime == IDS_IR_ALL_EFFORT && g.costs[0] < 1.0;
  outputs["gap_formula_validity"] =
      formula_valid ? "valid: loner carries all effort and c1 < 1"
                    : "outside clamped-validity regime; literal value kept for "
                      "reference";
  if (formula_valid) {
    set_num(outputs, "gap_formula_agreement", std::abs(formula - ir.gap));
    certs["formula_matches_numeric"] = std::abs(formula - ir.gap) <= 1e-9;
  }

  rep["outputs"] = std::move(outputs);
  rep["certifications"] = certs;
  return finish_report(rep, opt.out_path, all_true(certs), start);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interdependent-security investment games: equilibria, regulated "
               "mechanism, and opt-out analysis"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand(
      "solve", "socially optimal and equilibrium investments, price of anarchy");
  solve->add_option("--spec", solve_opt.spec_path, "game document (JSON)")->required();
  solve->add_option("--mode", solve_opt.mode, "social | ne | poa")
      ->required()
      ->check(CLI::IsMember({"social", "ne", "poa"}));
  solve->add_option("--out", solve_opt.out_path, "report path (default: stdout)");
  solve->add_option("--csv", solve_opt.csv_path, "per-player effort table (CSV)");
  auto* solve_seed = solve->add_option("--seed", solve_opt.seed, "override the document seed");
  solve->add_flag("--raw", g_emit_raw, "include hexfloat values in the report");

  MechanismOptions mech_opt;
  CLI::App* mech = app.add_subcommand(
      "mechanism", "regulated game: construct, verify, or iterate message profiles");
  mech->add_option("--spec", mech_opt.spec_path, "game document (JSON)")->required();
  mech->add_option("--action", mech_opt.action, "construct | verify | dynamics")
      ->required()
      ->check(CLI::IsMember({"construct", "verify", "dynamics"}));
  mech->add_option("--profile", mech_opt.profile_path,
                   "message profile (JSON); required for verify, optional initial "
                   "state for dynamics");
  mech->add_option("--profile-out", mech_opt.profile_out_path,
                   "write the constructed message profile here");
  mech->add_option("--out", mech_opt.out_path, "report path (default: stdout)");
  mech->add_option("--csv", mech_opt.csv_path, "dynamics trajectory (CSV)");
  auto* mech_rounds = mech->add_option("--rounds", mech_opt.rounds, "dynamics round cap");
  auto* mech_step = mech->add_option("--step", mech_opt.step, "dynamics damping step");
  auto* mech_seed = mech->add_option("--seed", mech_opt.seed, "override the document seed");
  mech->add_flag("--raw", g_emit_raw, "include hexfloat values in the report");

  IrOptions ir_opt;
  CLI::App* ir = app.add_subcommand(
      "ir", "participation gap of the lowest-cost player (total-effort games)");
  ir->add_option("--spec", ir_opt.spec_path, "game document (JSON)")->required();
  ir->add_option("--out", ir_opt.out_path, "report path (default: stdout)");
  auto* ir_seed = ir->add_option("--seed", ir_opt.seed, "override the document seed");
  ir->add_flag("--raw", g_emit_raw, "include hexfloat values in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      solve_opt.seed_set = solve_seed->count() > 0;
      return run_solve(solve_opt);
    }
    if (mech->parsed()) {
      mech_opt.seed_set = mech_seed->count() > 0;
      mech_opt.rounds_set = mech_rounds->count() > 0;
      mech_opt.step_set = mech_step->count() > 0;
      return run_mechanism(mech_opt);
    }
    ir_opt.seed_set = ir_seed->count() > 0;
    return run_ir(ir_opt);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
