#pragma once

#include <cstdint>
#include <string>

#include "solvers.hpp"

namespace ids {

/// Parsed game document: the game itself, solver overrides, and an optional
/// run seed.
struct SpecDocument {
  GameSpec game;
  SolverConfig config;
  std::uint64_t seed = 0;
  bool seed_present = false;
};

/// Parses the JSON game document:
///
///   {
///     "version": 1,
///     "n": 5,
///     "costs": [0.5, 0.8, 1.0, 1.2, 1.5],
///     "risk_model": {"family": "total_effort_exp",
///                    "params": {"alpha": 1.0, "beta": 1.0}},
///     "solver": {"gradient_tol": 1e-10, ...},   // optional overrides
///     "seed": 42                                 // optional
///   }
///
/// The weighted family is "weighted_effort_exp" with params {"alpha": [..n..],
/// "weights": [[..n..] x n]}. Malformed documents throw std::invalid_argument
/// naming the offending field.
SpecDocument parse_spec_document(const std::string& text);

}  // namespace ids
