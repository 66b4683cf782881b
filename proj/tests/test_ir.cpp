#include <doctest.h>

#include <cmath>

#include "ir.hpp"
#include "oracles.hpp"

using ids::GameSpec;
using ids::IrRegime;
using ids::TotalEffortExp;
using ids::Vec;

namespace {

// Loner's piecewise cost: the coordinated group tops the aggregate effort up
// to its threshold, then the loner is on its own.
double loner_cost(double x1, double c1, double threshold) {
  return std::exp(-x1 - std::max(threshold - x1, 0.0)) + c1 * x1;
}

}  // namespace

TEST_CASE("opt-out: expensive group member makes the cheap player free-ride") {
  const auto out = ids::sequential_equilibrium(oracles::five_player_example());
  CHECK(out.regime == IrRegime::kFreeRide);
  CHECK(out.loner_effort == 0.0);
  CHECK(out.partner_effort == doctest::Approx(1.609437912).epsilon(1e-9));
  CHECK(out.u_out == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("opt-out: very cheap loner carries everything") {
  const auto out = ids::sequential_equilibrium(oracles::cheap_loner_example());
  CHECK(out.regime == IrRegime::kAllEffort);
  CHECK(out.loner_effort == doctest::Approx(1.609437912).epsilon(1e-9));
  CHECK(out.partner_effort == 0.0);
  CHECK(out.u_out == doctest::Approx(-0.521887582).epsilon(1e-8));
}

TEST_CASE("opt-out: group never invests once its threshold is non-positive") {
  // c2 >= n-1 makes the coordinated side worthless; the loner plays solo
  GameSpec solo_game({0.5, 2.5}, TotalEffortExp{1.0, 1.0});
  const auto out = ids::sequential_equilibrium(solo_game);
  CHECK(out.regime == IrRegime::kAllEffort);
  CHECK(out.loner_effort == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(out.partner_effort == 0.0);
  CHECK(out.u_out == doctest::Approx(-0.846573590).epsilon(1e-8));

  // and with an expensive loner on top, nobody moves at all
  GameSpec frozen({1.5, 9.0}, TotalEffortExp{1.0, 1.0});
  const auto none = ids::sequential_equilibrium(frozen);
  CHECK(none.regime == IrRegime::kMixedCorner);
  CHECK(none.loner_effort == 0.0);
  CHECK(none.partner_effort == 0.0);
  CHECK(none.u_out == doctest::Approx(-1.0));
}

TEST_CASE("opt-out matches a brute-force scan of the loner's cost") {
  ids::Rng rng(2002);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.next() % 6;
    Vec costs(n);
    costs[0] = rng.uniform(0.05, 2.5);
    for (std::size_t i = 1; i < n; ++i) {
      costs[i] = costs[i - 1] + rng.uniform(0.01, 1.5);
    }
    GameSpec g(costs, TotalEffortExp{1.0, 1.0});
    const auto out = ids::sequential_equilibrium(g);

    const double threshold =
        std::max(0.0, std::log(static_cast<double>(n - 1) / costs[1]));
    double best_cost = 0.0;
    oracles::grid_min([&](double t) { return loner_cost(t, costs[0], threshold); }, 0.0,
                      5.0, 1e-4, &best_cost);
    CHECK(std::abs(-out.u_out - best_cost) <= 1e-3);
  }
}

TEST_CASE("the coordinated group routes all effort through its cheapest member") {
  ids::Rng rng(2005);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + rng.next() % 5;
    ids::Vec costs(n);
    costs[0] = rng.uniform(0.05, 1.5);
    for (std::size_t i = 1; i < n; ++i) {
      costs[i] = costs[i - 1] + rng.uniform(0.01, 1.0);
    }
    GameSpec g(costs, TotalEffortExp{1.0, 1.0});
    const auto out = ids::sequential_equilibrium(g);
    // at the solution every carried member faces a nonnegative marginal group
    // cost, so idleness is optimal for them, not an assumption
    const double marginal_risk =
        static_cast<double>(n - 1) *
        std::exp(-(out.loner_effort + out.partner_effort));
    for (std::size_t j = 1; j < n; ++j) {
      CHECK(costs[j] - marginal_risk >= -1e-12);
    }
  }
}

TEST_CASE("opt-out utility never falls below the do-nothing fallback") {
  ids::Rng rng(2003);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.next() % 6;
    Vec costs(n);
    costs[0] = rng.uniform(0.05, 2.5);
    for (std::size_t i = 1; i < n; ++i) {
      costs[i] = costs[i - 1] + rng.uniform(0.01, 1.5);
    }
    GameSpec g(costs, TotalEffortExp{1.0, 1.0});
    const auto out = ids::sequential_equilibrium(g);
    const double fallback =
        std::min(1.0, costs[1] / static_cast<double>(n - 1));
    CHECK(out.u_out >= -fallback - 1e-12);
  }
}

TEST_CASE("literal gap formula: worked values and its root") {
  CHECK(ids::ir_gap_formula(5, std::exp(1.0)) ==
        doctest::Approx(-0.874981166).epsilon(1e-8));
  CHECK(ids::ir_gap_formula(5, 0.2) == doctest::Approx(0.353132549).epsilon(1e-8));
  const double root = std::exp(1.0 - std::log(5.0) / 4.0);
  CHECK(std::abs(ids::ir_gap_formula(5, root)) <= 1e-12);
  CHECK_THROWS_AS((void)ids::ir_gap_formula(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)ids::ir_gap_formula(5, 0.0), std::invalid_argument);
}

TEST_CASE("participation gap: worked five-player cases") {
  const auto cheap = ids::ir_gap_numeric(oracles::cheap_loner_example(), {});
  CHECK(cheap.regime == IrRegime::kAllEffort);
  CHECK(cheap.u_in == doctest::Approx(-0.168755033).epsilon(1e-7));
  CHECK(cheap.u_out == doctest::Approx(-0.521887582).epsilon(1e-7));
  CHECK(cheap.gap == doctest::Approx(0.353132549).epsilon(1e-7));
  CHECK(std::abs(cheap.gap - ids::ir_gap_formula(5, 0.2)) <= 1e-9);

  const auto standard = ids::ir_gap_numeric(oracles::five_player_example(), {});
  CHECK(standard.regime == IrRegime::kFreeRide);
  CHECK(standard.u_in == doctest::Approx(-0.330258509).epsilon(1e-7));
  CHECK(standard.u_out == doctest::Approx(-0.2).epsilon(1e-9));
  // staying out beats participating here even though effort is cheap
  CHECK(standard.gap == doctest::Approx(-0.130258509).epsilon(1e-7));
  CHECK(standard.gap < 0.0);
}

TEST_CASE("participation gap: two-player solo corner") {
  const auto out = ids::ir_gap_numeric(GameSpec({0.5, 2.5}, TotalEffortExp{1, 1}), {});
  CHECK(out.u_in == doctest::Approx(-0.596573590).epsilon(1e-8));
  CHECK(out.gap == doctest::Approx(0.25).epsilon(1e-7));
  CHECK(std::abs(out.gap - ids::ir_gap_formula(2, 0.5)) <= 1e-9);
}

TEST_CASE("formula and clamped computation agree across the valid regime") {
  ids::Rng rng(2004);
  int seen = 0;
  for (int rep = 0; rep < 200 && seen < 40; ++rep) {
    const std::size_t n = 3 + rng.next() % 5;
    Vec costs(n);
    costs[0] = rng.uniform(0.05, 0.95);
    for (std::size_t i = 1; i < n; ++i) {
      costs[i] = costs[i - 1] + rng.uniform(0.2, 2.0);
    }
    GameSpec g(costs, TotalEffortExp{1.0, 1.0});
    const auto out = ids::ir_gap_numeric(g, {});
    if (out.regime != IrRegime::kAllEffort) continue;
    ++seen;
    CHECK(std::abs(out.gap - ids::ir_gap_formula(n, costs[0])) <= 1e-9);
    // the uncoordinated aftermath secures less than the optimum did
    const double x_star_1 = std::log(static_cast<double>(n) / costs[0]);
    CHECK(out.loner_effort + out.partner_effort <= x_star_1 + 1e-12);
  }
  CHECK(seen >= 20);
}

TEST_CASE("opt-out analysis rejects unsupported inputs") {
  ids::WeightedEffortExp we;
  we.alphas = {1.0, 1.0};
  we.weights = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS((void)ids::sequential_equilibrium(GameSpec({0.5, 1.0}, we)),
                  ids::unsupported_family);
  CHECK_THROWS_AS(
      (void)ids::sequential_equilibrium(GameSpec({0.5, 1.0}, TotalEffortExp{2.0, 1.0})),
      ids::unsupported_family);
  CHECK_THROWS_AS(
      (void)ids::sequential_equilibrium(GameSpec({1.0, 0.5}, TotalEffortExp{1.0, 1.0})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)ids::sequential_equilibrium(GameSpec({1.0}, TotalEffortExp{1.0, 1.0})),
      std::invalid_argument);
}
