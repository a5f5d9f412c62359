#include "congestion/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace congestion {

static constexpr double kMoveTol = 1e-9;

void CongestionGame::validate() const {
    if (players.empty()) throw std::invalid_argument("game has no players");
    for (const auto& strategies : players) {
        if (strategies.empty()) throw std::invalid_argument("player with no strategies");
        for (const auto& st : strategies) {
            if (st.empty()) throw std::invalid_argument("empty strategy");
            for (int e : st)
                if (e < 0 || e >= num_resources())
                    throw std::invalid_argument("strategy references unknown resource");
        }
    }
    for (const auto& f : resources)
        if (f.kind == CostFunction::Kind::Table && f.n_max < num_players())
            throw std::invalid_argument("cost table shorter than the player count");
}

long long CongestionGame::profile_space() const {
    long long total = 1;
    for (const auto& strategies : players) {
        long long k = static_cast<long long>(strategies.size());
        if (total >= (1LL << 60) / k) return (1LL << 60);
        total *= k;
    }
    return total;
}

double ModifiedCostTable::eval(int e, int load) const {
    if (load <= 0) return 0.0;
    const auto& t = fprime.at(static_cast<size_t>(e));
    if (load > static_cast<int>(t.size()))
        throw std::out_of_range("modified cost table too short for load");
    return t[static_cast<size_t>(load) - 1];
}

StrategyProfile make_profile(const CongestionGame& g, std::vector<int> choices) {
    if (static_cast<int>(choices.size()) != g.num_players())
        throw std::invalid_argument("choice vector size mismatch");
    StrategyProfile s;
    s.choices = std::move(choices);
    recompute_loads(g, s);
    return s;
}

void recompute_loads(const CongestionGame& g, StrategyProfile& s) {
    s.loads.assign(g.num_resources(), 0);
    for (int u = 0; u < g.num_players(); ++u) {
        int c = s.choices[u];
        if (c < 0 || c >= static_cast<int>(g.players[u].size()))
            throw std::invalid_argument("strategy index out of range");
        for (int e : g.players[u][c]) s.loads[e]++;
    }
}

void apply_move(const CongestionGame& g, StrategyProfile& s, int player, int new_choice) {
    if (new_choice < 0 || new_choice >= static_cast<int>(g.players[player].size()))
        throw std::invalid_argument("strategy index out of range");
    for (int e : g.players[player][s.choices[player]]) s.loads[e]--;
    for (int e : g.players[player][new_choice]) s.loads[e]++;
    s.choices[player] = new_choice;
}

double resource_cost(const CongestionGame& g, int e, int load, const ModifiedCostTable* mod) {
    if (mod) return mod->eval(e, load);
    const CostFunction& f = g.resources[e];
    if (f.kind == CostFunction::Kind::Table && load > f.n_max)
        throw std::out_of_range("load exceeds cost table range");
    return f.eval(load);
}

double player_cost(const CongestionGame& g, const StrategyProfile& s, int player,
                   const ModifiedCostTable* mod) {
    double acc = 0.0;
    for (int e : g.players[player][s.choices[player]])
        acc += resource_cost(g, e, s.loads[e], mod);
    return acc;
}

double deviation_cost(const CongestionGame& g, const StrategyProfile& s, int player,
                      int alt_strategy, const ModifiedCostTable* mod) {
    const auto& cur = g.players[player][s.choices[player]];
    const auto& alt = g.players[player].at(static_cast<size_t>(alt_strategy));
    double acc = 0.0;
    for (int e : alt) {
        int load = s.loads[e];
        // the mover leaves its current resources; shared ones keep their load
        if (!std::binary_search(cur.begin(), cur.end(), e)) load += 1;
        acc += resource_cost(g, e, load, mod);
    }
    return acc;
}

double rosenthal_potential(const CongestionGame& g, const StrategyProfile& s,
                           const ModifiedCostTable* mod) {
    double acc = 0.0;
    for (int e = 0; e < g.num_resources(); ++e)
        for (int i = 1; i <= s.loads[e]; ++i) acc += resource_cost(g, e, i, mod);
    return acc;
}

double subgame_potential(const CongestionGame& g, const StrategyProfile& s,
                         const PlayerSubset& subset, const ModifiedCostTable* mod) {
    std::vector<int> in_load(g.num_resources(), 0);
    for (int u = 0; u < g.num_players(); ++u) {
        if (!subset[u]) continue;
        for (int e : g.players[u][s.choices[u]]) in_load[e]++;
    }
    double acc = 0.0;
    for (int e = 0; e < g.num_resources(); ++e) {
        int frozen = s.loads[e] - in_load[e];
        for (int i = 1; i <= in_load[e]; ++i) acc += resource_cost(g, e, i + frozen, mod);
    }
    return acc;
}

BestResponse best_response(const CongestionGame& g, const StrategyProfile& s, int player,
                           const ModifiedCostTable* mod) {
    BestResponse best{0, deviation_cost(g, s, player, 0, mod)};
    for (int k = 1; k < static_cast<int>(g.players[player].size()); ++k) {
        double c = deviation_cost(g, s, player, k, mod);
        if (c < best.cost - kMoveTol) best = {k, c};
    }
    return best;
}

double optimistic_cost(const CongestionGame& g, int player) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& st : g.players[player]) {
        double c = 0.0;
        for (int e : st) c += resource_cost(g, e, 1, nullptr);
        best = std::min(best, c);
    }
    return best;
}

EquilibriumCheck verify_alpha_equilibrium(const CongestionGame& g, const StrategyProfile& s,
                                          double alpha, const ModifiedCostTable* mod) {
    EquilibriumCheck out{true, -1, -1, 1.0};
    for (int u = 0; u < g.num_players(); ++u) {
        double cur = player_cost(g, s, u, mod);
        for (int k = 0; k < static_cast<int>(g.players[u].size()); ++k) {
            if (k == s.choices[u]) continue;
            double dev = deviation_cost(g, s, u, k, mod);
            double ratio;
            if (dev <= 0.0)
                ratio = cur <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
            else
                ratio = cur / dev;
            if (ratio > out.worst_ratio) {
                out.worst_ratio = ratio;
                out.worst_player = u;
                out.worst_strategy = k;
            }
            if (alpha * dev < cur - kMoveTol * std::max(1.0, cur)) out.holds = false;
        }
    }
    return out;
}

double social_cost(const CongestionGame& g, const StrategyProfile& s) {
    double acc = 0.0;
    for (int u = 0; u < g.num_players(); ++u) acc += player_cost(g, s, u, nullptr);
    return acc;
}

}  // namespace congestion
