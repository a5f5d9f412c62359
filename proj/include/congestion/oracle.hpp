#pragma once
#include <cstdint>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/smoothness.hpp"

namespace congestion {

// Exhaustive ground truth on small instances. Every function refuses games
// with more than 1e7 profiles.
constexpr long long kEnumerationCap = 10000000;

std::vector<StrategyProfile> enumerate_equilibria(const CongestionGame& g, double alpha,
                                                  const ModifiedCostTable* mod = nullptr);

// max over alpha-equilibria (under eq_mod costs) of phi(s)/min_s phi(s),
// potentials under pot_mod costs.
double exact_stretch(const CongestionGame& g, double alpha,
                     const ModifiedCostTable* eq_mod, const ModifiedCostTable* pot_mod);

// max equilibrium social cost / optimum social cost; equilibria under taxed
// costs when given, social cost always under original f.
double exact_poa(const CongestionGame& g, const ModifiedCostTable* taxed = nullptr);

// Grid search over f' tables subject to exhaustively checked smoothness
// rows; upper-bounds the LP optimum within one grid step. N <= 4.
double bruteforce_lambda(const CostFunction& f, int N, Objective family, int grid_steps);

// Seeded generators used by the CLI batch commands and the test harness.
CongestionGame random_singleton_game(int players, int resources, int degree,
                                     std::uint64_t seed);
CongestionGame random_subset_game(int players, int resources, int degree,
                                  int strategies_per_player, int max_subset,
                                  std::uint64_t seed);

}  // namespace congestion
