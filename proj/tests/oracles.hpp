// Test-only reference implementations, kept independent of the library's
// solution paths: finite differences for gradients, grid scans for
// minimizers, and hand-expanded closed forms for the total-effort family.
#pragma once

#include <cmath>
#include <functional>

#include "game.hpp"
#include "numeric.hpp"

namespace oracles {

// Central finite-difference gradient of player i's cost.
inline ids::Vec fd_cost_gradient(const ids::GameSpec& spec, std::size_t i,
                                 const ids::Vec& x, double h = 1e-5) {
  ids::Vec g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    ids::Vec hi = x, lo = x;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (ids::cost(spec, i, hi) - ids::cost(spec, i, lo)) / (2.0 * h);
  }
  return g;
}

// Brute-force scalar minimization on [lo, hi] with the given step.
inline double grid_min(const std::function<double(double)>& f, double lo, double hi,
                       double step, double* fbest = nullptr) {
  double best_x = lo;
  double best_f = f(lo);
  for (double t = lo + step; t <= hi + 0.5 * step; t += step) {
    const double ft = f(t);
    if (ft < best_f) {
      best_f = ft;
      best_x = t;
    }
  }
  if (fbest) *fbest = best_f;
  return best_x;
}

// Total-effort fixtures. Costs (0.5, 0.8, 1.0, 1.2, 1.5) with unit
// parameters reproduce every worked example: equilibrium effort ln 2,
// optimal effort ln 10, efficiency ratio ~1.7238.
inline ids::GameSpec five_player_example() {
  return ids::GameSpec({0.5, 0.8, 1.0, 1.2, 1.5}, ids::TotalEffortExp{1.0, 1.0});
}

// Cheap loner, expensive group: the loner prefers carrying all the effort.
inline ids::GameSpec cheap_loner_example() {
  return ids::GameSpec({0.2, 3.0, 3.5, 4.0, 4.5}, ids::TotalEffortExp{1.0, 1.0});
}

// Independently expanded total-effort solutions: a single investor at the
// lowest cost, effort solving alpha*beta*m*exp(-beta*s) = c.
inline ids::Vec total_effort_ne(std::size_t n, const ids::Vec& costs, double alpha,
                                double beta) {
  std::size_t lead = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (costs[i] < costs[lead]) lead = i;
  ids::Vec x(n, 0.0);
  x[lead] = std::max(0.0, std::log(alpha * beta / costs[lead]) / beta);
  return x;
}

inline ids::Vec total_effort_so(std::size_t n, const ids::Vec& costs, double alpha,
                                double beta) {
  std::size_t lead = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (costs[i] < costs[lead]) lead = i;
  ids::Vec x(n, 0.0);
  x[lead] =
      std::max(0.0, std::log(static_cast<double>(n) * alpha * beta / costs[lead]) / beta);
  return x;
}

// Random game generators (both families), deterministic under the seed.
inline ids::GameSpec random_total_effort(ids::Rng& rng, std::size_t n_lo = 2,
                                         std::size_t n_hi = 8) {
  const auto n = static_cast<std::size_t>(
      n_lo + rng.next() % (n_hi - n_lo + 1));
  ids::Vec costs(n);
  for (double& c : costs) c = rng.uniform(0.1, 3.0);
  // nudge exact ties apart; tie handling is tested separately
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (costs[i] == costs[j]) costs[j] += 1e-3;
  return ids::GameSpec(std::move(costs),
                       ids::TotalEffortExp{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
}

inline ids::GameSpec random_weighted(ids::Rng& rng, std::size_t n_lo = 2,
                                     std::size_t n_hi = 8) {
  const auto n = static_cast<std::size_t>(
      n_lo + rng.next() % (n_hi - n_lo + 1));
  ids::Vec costs(n), alphas(n);
  std::vector<ids::Vec> weights(n, ids::Vec(n));
  for (double& c : costs) c = rng.uniform(0.2, 3.0);
  for (double& a : alphas) a = rng.uniform(0.5, 2.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) weights[i][j] = rng.uniform(0.1, 1.5);
    weights[i][i] = rng.uniform(0.5, 2.0);
  }
  ids::WeightedEffortExp we;
  we.alphas = std::move(alphas);
  we.weights = std::move(weights);
  return ids::GameSpec(std::move(costs), std::move(we));
}

inline ids::GameSpec random_spec(ids::Rng& rng, std::size_t n_lo = 2,
                                 std::size_t n_hi = 8) {
  return (rng.next() % 2 == 0) ? random_total_effort(rng, n_lo, n_hi)
                               : random_weighted(rng, n_lo, n_hi);
}

inline ids::Vec random_profile_vec(ids::Rng& rng, std::size_t n, double hi) {
  ids::Vec x(n);
  for (double& v : x) v = rng.uniform(0.0, hi);
  return x;
}

}  // namespace oracles
