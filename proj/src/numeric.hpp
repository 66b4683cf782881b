#pragma once

#include <cstdint>
#include <random>

#include "game.hpp"

namespace ids {

/// Deterministic uniform generator. std::mt19937_64 output is pinned by the
/// standard; the [0,1) mapping below avoids std::uniform_real_distribution,
/// whose output is implementation-defined, so seeded runs reproduce across
/// compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
/// Returns the argmin; fval receives the minimum when non-null.
template <typename F>
double minimize_scalar(F&& f, double lo, double hi, double xtol,
                       double* fval = nullptr) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  if (fval) *fval = f(xm);
  return xm;
}

}  // namespace ids
