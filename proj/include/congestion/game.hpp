#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "congestion/cost_function.hpp"

namespace congestion {

// Strategies are explicit resource-index sets; best response is full
// enumeration. Strategy sets are validated non-empty on construction.
struct CongestionGame {
    std::vector<CostFunction> resources;
    // players[u] = list of strategies, each a sorted list of resource indices
    std::vector<std::vector<std::vector<int>>> players;

    int num_players() const { return static_cast<int>(players.size()); }
    int num_resources() const { return static_cast<int>(resources.size()); }
    void validate() const;  // throws std::invalid_argument on bad shape
    long long profile_space() const;  // product of |S_u|, saturating
};

struct StrategyProfile {
    std::vector<int> choices;  // strategy index per player
    std::vector<int> loads;    // derived n_e(s)
};

// Per-resource modified cost tables f'_e, index [e][load-1]. Loads beyond
// the stored table are an error here; materialization (smoothness module)
// always builds tables long enough for the game at hand.
struct ModifiedCostTable {
    std::vector<std::vector<double>> fprime;
    double eval(int e, int load) const;
};

using PlayerSubset = std::vector<std::uint8_t>;  // 0/1 per player

StrategyProfile make_profile(const CongestionGame& g, std::vector<int> choices);
void recompute_loads(const CongestionGame& g, StrategyProfile& s);
void apply_move(const CongestionGame& g, StrategyProfile& s, int player, int new_choice);

double resource_cost(const CongestionGame& g, int e, int load, const ModifiedCostTable* mod);

double player_cost(const CongestionGame& g, const StrategyProfile& s, int player,
                   const ModifiedCostTable* mod = nullptr);

double deviation_cost(const CongestionGame& g, const StrategyProfile& s, int player,
                      int alt_strategy, const ModifiedCostTable* mod = nullptr);

double rosenthal_potential(const CongestionGame& g, const StrategyProfile& s,
                           const ModifiedCostTable* mod = nullptr);

double subgame_potential(const CongestionGame& g, const StrategyProfile& s,
                         const PlayerSubset& subset, const ModifiedCostTable* mod = nullptr);

struct BestResponse {
    int strategy;
    double cost;
};
// Ties broken by lowest strategy index.
BestResponse best_response(const CongestionGame& g, const StrategyProfile& s, int player,
                           const ModifiedCostTable* mod = nullptr);

// c_u(BR_u(0)): cheapest strategy against the empty profile.
double optimistic_cost(const CongestionGame& g, int player);

struct EquilibriumCheck {
    bool holds;
    int worst_player = -1;
    int worst_strategy = -1;
    double worst_ratio = 1.0;  // max over deviations of c_u(s) / c_u(s'_u, s_-u)
};
// alpha-approximate equilibrium test: alpha * c_u(s'_u, s_-u) >= c_u(s) for
// every player u and alternative s'_u. Ratio conventions: 0/0 -> 1, x/0 -> inf.
EquilibriumCheck verify_alpha_equilibrium(const CongestionGame& g, const StrategyProfile& s,
                                          double alpha, const ModifiedCostTable* mod = nullptr);

double social_cost(const CongestionGame& g, const StrategyProfile& s);

}  // namespace congestion
