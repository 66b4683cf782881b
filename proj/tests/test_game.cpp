#include <doctest.h>

#include <cmath>

#include "game.hpp"
#include "oracles.hpp"

using ids::GameSpec;
using ids::TotalEffortExp;
using ids::Vec;
using ids::WeightedEffortExp;

namespace {

GameSpec weighted_pair() {
  WeightedEffortExp we;
  we.alphas = {2.0, 1.0};
  we.weights = {{1.0, 3.0}, {0.5, 1.0}};
  return GameSpec({1.0, 1.0}, std::move(we));
}

}  // namespace

TEST_CASE("risk: total-effort closed values") {
  GameSpec g({1.0, 1.0, 1.0}, TotalEffortExp{1.0, 1.0});
  CHECK(ids::risk(g, 0, {0.0, 0.0, 0.0}) == doctest::Approx(1.0));
  const double l2 = std::log(2.0);
  CHECK(ids::risk(g, 2, {l2 / 3, l2 / 3, l2 / 3}) == doctest::Approx(0.5));
}

TEST_CASE("risk: weighted family evaluates its own exponent") {
  GameSpec g = weighted_pair();
  CHECK(ids::risk(g, 0, {1.0, 0.0}) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(ids::risk(g, 0, {1.0, 0.0}) == doctest::Approx(0.735758882).epsilon(1e-8));
  CHECK(ids::risk(g, 1, {1.0, 0.0}) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("risk: rejects bad indices and negative efforts") {
  GameSpec g = oracles::five_player_example();
  CHECK_THROWS_AS((void)ids::risk(g, 7, Vec(5, 0.0)), std::out_of_range);
  CHECK_THROWS_AS((void)ids::risk(g, 0, Vec{1.0, -0.1, 0.0, 0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ids::risk(g, 0, Vec(4, 0.0)), std::invalid_argument);
}

TEST_CASE("cost: zero effort and single-investor profiles") {
  GameSpec g = oracles::five_player_example();
  const double l10 = std::log(10.0);
  CHECK(ids::cost(g, 0, Vec(5, 0.0)) == doctest::Approx(1.0));
  CHECK(ids::cost(g, 0, {l10, 0, 0, 0, 0}) ==
        doctest::Approx(0.1 + 0.5 * l10).epsilon(1e-12));
  CHECK(ids::cost(g, 0, {l10, 0, 0, 0, 0}) == doctest::Approx(1.251292546).epsilon(1e-9));
  // an idle player pays nothing, only bears the (shared) risk
  CHECK(ids::cost(g, 1, {l10, 0, 0, 0, 0}) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("utility: transfer enters additively") {
  GameSpec g = oracles::five_player_example();
  const double l10 = std::log(10.0);
  const Vec x{l10, 0, 0, 0, 0};
  CHECK(ids::utility(g, 2, x, 0.0) == doctest::Approx(-ids::cost(g, 2, x)).epsilon(1e-15));
  // the rewarded investor and a paying beneficiary end up equally well off
  CHECK(ids::utility(g, 0, x, -0.921034037) == doctest::Approx(-0.330258509).epsilon(1e-8));
  CHECK(ids::utility(g, 1, x, 0.230258509) == doctest::Approx(-0.330258509).epsilon(1e-8));
}

TEST_CASE("social cost: worked profiles and the single-player corner") {
  GameSpec g = oracles::five_player_example();
  CHECK(ids::social_cost(g, {std::log(2.0), 0, 0, 0, 0}) ==
        doctest::Approx(2.846573590).epsilon(1e-9));
  CHECK(ids::social_cost(g, {std::log(10.0), 0, 0, 0, 0}) ==
        doctest::Approx(1.651292546).epsilon(1e-9));
  GameSpec solo({2.0}, TotalEffortExp{1.0, 1.0});
  CHECK(ids::social_cost(solo, {0.0}) == doctest::Approx(1.0));
}

TEST_CASE("social cost equals the per-player sum in fixed order") {
  ids::Rng rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    GameSpec g = oracles::random_spec(rng);
    const Vec x = oracles::random_profile_vec(rng, g.player_count(), 2.0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.player_count(); ++i) s += ids::cost(g, i, x);
    CHECK(ids::social_cost(g, x) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("gradient: worked values and total-effort symmetry") {
  GameSpec g = oracles::five_player_example();
  const Vec grad = ids::cost_gradient(g, 0, {std::log(10.0), 0, 0, 0, 0});
  CHECK(grad[0] == doctest::Approx(0.4).epsilon(1e-12));
  for (std::size_t j = 1; j < 5; ++j) CHECK(grad[j] == doctest::Approx(-0.1).epsilon(1e-12));
  // the risk part of the gradient cannot distinguish coordinates
  const Vec g2 = ids::cost_gradient(g, 1, {0.3, 0.1, 0.0, 0.2, 0.0});
  CHECK(g2[0] == doctest::Approx(g2[2]).epsilon(1e-15));
  CHECK(g2[0] == doctest::Approx(g2[4]).epsilon(1e-15));
}

TEST_CASE("gradient matches central differences at random interior points") {
  ids::Rng rng(11);
  for (int family = 0; family < 2; ++family) {
    for (int rep = 0; rep < 100; ++rep) {
      GameSpec g = family == 0 ? oracles::random_total_effort(rng)
                               : oracles::random_weighted(rng);
      const Vec x = oracles::random_profile_vec(rng, g.player_count(), 2.0);
      const auto i = static_cast<std::size_t>(rng.next() % g.player_count());
      const Vec a = ids::cost_gradient(g, i, x);
      const Vec fd = oracles::fd_cost_gradient(g, i, x);
      for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(a[k] - fd[k]) / std::max(1.0, std::abs(a[k])) < 1e-6);
      }
    }
  }
}

TEST_CASE("risk decreases strictly when anyone invests more") {
  ids::Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    GameSpec g = oracles::random_spec(rng);
    const Vec x = oracles::random_profile_vec(rng, g.player_count(), 2.0);
    Vec more = x;
    const auto k = static_cast<std::size_t>(rng.next() % g.player_count());
    more[k] += rng.uniform(0.05, 1.0);
    for (std::size_t i = 0; i < g.player_count(); ++i) {
      CHECK(ids::risk(g, i, more) < ids::risk(g, i, x));
      CHECK(ids::risk(g, i, x) > 0.0);
    }
  }
}

TEST_CASE("strategy bound: worked values and the vanishing-risk limit") {
  GameSpec g = oracles::five_player_example();
  CHECK(ids::strategy_bound(g, 0.01) == doctest::Approx(2.02).epsilon(1e-12));
  GameSpec solo({2.0}, TotalEffortExp{1.0, 1.0});
  CHECK(ids::strategy_bound(solo, 1.0) == doctest::Approx(1.0));
  // as the base risk vanishes the bound is driven by the slack alone
  GameSpec faint({0.5, 1.0}, TotalEffortExp{1e-13, 1.0});
  CHECK(ids::strategy_bound(faint, 0.01) == doctest::Approx(0.01 / 0.5).epsilon(1e-9));
  CHECK_THROWS_AS((void)ids::strategy_bound(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)ids::strategy_bound(g, -1.0), std::invalid_argument);
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(GameSpec({}, TotalEffortExp{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec({0.5, -1.0}, TotalEffortExp{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec({0.5, 0.0}, TotalEffortExp{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec({1.0}, TotalEffortExp{0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GameSpec({1.0}, TotalEffortExp{1.0, -2.0}), std::invalid_argument);

  WeightedEffortExp bad_alpha;
  bad_alpha.alphas = {1.0, -1.0};
  bad_alpha.weights = {{1, 1}, {1, 1}};
  CHECK_THROWS_AS(GameSpec({1.0, 1.0}, bad_alpha), std::invalid_argument);

  WeightedEffortExp bad_weight;
  bad_weight.alphas = {1.0, 1.0};
  bad_weight.weights = {{1, 0}, {1, 1}};  // a zero weight breaks strict decrease
  CHECK_THROWS_AS(GameSpec({1.0, 1.0}, bad_weight), std::invalid_argument);

  WeightedEffortExp bad_shape;
  bad_shape.alphas = {1.0, 1.0};
  bad_shape.weights = {{1, 1}};
  CHECK_THROWS_AS(GameSpec({1.0, 1.0}, bad_shape), std::invalid_argument);
}

TEST_CASE("cost ties are flagged on the spec") {
  CHECK_FALSE(oracles::five_player_example().has_cost_ties());
  GameSpec tied({0.5, 0.5, 0.9}, TotalEffortExp{1, 1});
  CHECK(tied.has_cost_ties());
}
