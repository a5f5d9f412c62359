#include "congestion/taxes.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace congestion {

namespace {

constexpr long long kEnumerationCap = 10000000;

int worker_count(long long work) {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 4 : static_cast<int>(std::min(hw, 16u));
    if (work < 50000) return 1;
    return n;
}

int optimistic_choice(const CongestionGame& g, int player) {
    const auto& strategies = g.players[player];
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(strategies.size()); ++k) {
        double cost = 0.0;
        for (int e : strategies[k]) cost += resource_cost(g, e, 1, nullptr);
        if (cost < best_cost) {
            best_cost = cost;
            best = k;
        }
    }
    return best;
}

struct SweepAcc {
    double min_cost = std::numeric_limits<double>::infinity();
    double worst_eq = 0.0;
    long long equilibria = 0;
};

// True when no unilateral f'-deviation improves by more than a relative hair.
bool is_taxed_pne(const CongestionGame& g, const ModifiedCostTable& mod,
                  const StrategyProfile& s) {
    int N = static_cast<int>(g.players.size());
    for (int u = 0; u < N; ++u) {
        double cur = player_cost(g, s, u, &mod);
        int ns = static_cast<int>(g.players[u].size());
        for (int k = 0; k < ns; ++k) {
            if (k == s.choices[u]) continue;
            double dev = deviation_cost(g, s, u, k, &mod);
            if (dev < cur - 1e-9 * (1.0 + std::abs(cur))) return false;
        }
    }
    return true;
}

SweepAcc sweep_range(const CongestionGame& g, const ModifiedCostTable& mod,
                     long long begin, long long end) {
    int N = static_cast<int>(g.players.size());
    SweepAcc acc;
    std::vector<int> choices(N, 0);
    StrategyProfile s;
    for (long long idx = begin; idx < end; ++idx) {
        long long rem = idx;
        for (int u = 0; u < N; ++u) {
            int ns = static_cast<int>(g.players[u].size());
            choices[u] = static_cast<int>(rem % ns);
            rem /= ns;
        }
        s.choices = choices;
        recompute_loads(g, s);
        double cost = social_cost(g, s);
        acc.min_cost = std::min(acc.min_cost, cost);
        if (is_taxed_pne(g, mod, s)) {
            ++acc.equilibria;
            acc.worst_eq = std::max(acc.worst_eq, cost);
        }
    }
    return acc;
}

}  // namespace

TaxTable taxes_from_certificate(const CongestionGame& g,
                                const std::vector<SmoothnessCertificate>& certs) {
    if (certs.empty()) throw std::invalid_argument("no certificates given");
    for (const auto& c : certs)
        if (c.objective != Objective::SocialCost)
            throw std::invalid_argument("taxes need a social-cost certificate");

    ModifiedCostTable mod = materialize_modified(g, certs);
    TaxTable t;
    t.taxes.resize(g.resources.size());
    for (size_t e = 0; e < g.resources.size(); ++e) {
        t.taxes[e].resize(mod.fprime[e].size());
        for (size_t i = 0; i < mod.fprime[e].size(); ++i)
            t.taxes[e][i] = mod.fprime[e][i] - g.resources[e](static_cast<int>(i) + 1);
    }
    t.lambda = 1.0;
    for (const auto& c : certs) t.lambda = std::max(t.lambda, c.lambda);
    return t;
}

ModifiedCostTable taxed_costs(const CongestionGame& g, const TaxTable& taxes) {
    if (taxes.taxes.size() != g.resources.size())
        throw std::invalid_argument("tax table count does not match resources");
    ModifiedCostTable mod;
    mod.fprime.resize(taxes.taxes.size());
    for (size_t e = 0; e < taxes.taxes.size(); ++e) {
        mod.fprime[e].resize(taxes.taxes[e].size());
        for (size_t i = 0; i < taxes.taxes[e].size(); ++i)
            mod.fprime[e][i] = g.resources[e](static_cast<int>(i) + 1) + taxes.taxes[e][i];
    }
    return mod;
}

double zeta_sc(const CongestionGame& g, const ModifiedCostTable& mod,
               const StrategyProfile& s) {
    double total = 0.0;
    for (size_t e = 0; e < g.resources.size(); ++e)
        for (int i = 1; i <= s.loads[e]; ++i) total += mod.eval(static_cast<int>(e), i);
    return total;
}

LocalSearchResult epsilon_local_search(const CongestionGame& g, const ModifiedCostTable& mod,
                                       double epsilon,
                                       std::optional<StrategyProfile> start,
                                       long long move_cap) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    int N = static_cast<int>(g.players.size());
    if (N < 1) throw std::invalid_argument("game has no players");
    double threshold = 1.0 + epsilon / (2.0 * N);

    LocalSearchResult res;
    if (start) {
        res.profile = *start;
        recompute_loads(g, res.profile);
    } else {
        std::vector<int> choices(N);
        for (int u = 0; u < N; ++u) choices[u] = optimistic_choice(g, u);
        res.profile = make_profile(g, choices);
    }

    bool moved = true;
    while (moved) {
        moved = false;
        for (int u = 0; u < N; ++u) {
            if (res.moves >= move_cap) {
                res.hit_cap = true;
                moved = false;
                break;
            }
            double cur = player_cost(g, res.profile, u, &mod);
            if (!(cur > 0.0)) continue;
            BestResponse br = best_response(g, res.profile, u, &mod);
            if (cur > threshold * br.cost * (1.0 + 1e-12)) {
                apply_move(g, res.profile, u, br.strategy);
                ++res.moves;
                moved = true;
            }
        }
        if (res.hit_cap) break;
    }

    EquilibriumCheck chk = verify_alpha_equilibrium(g, res.profile, threshold, &mod);
    res.local_alpha = chk.worst_ratio;
    return res;
}

PoAReport poa_under_taxes(const CongestionGame& g, const ModifiedCostTable& mod) {
    long long total = g.profile_space();
    if (total > kEnumerationCap)
        throw std::runtime_error("profile space exceeds the enumeration cap");
    if (total <= 0) throw std::invalid_argument("game has an empty strategy set");

    int workers = worker_count(total);
    std::vector<SweepAcc> parts;
    if (workers == 1) {
        parts.push_back(sweep_range(g, mod, 0, total));
    } else {
        std::vector<std::future<SweepAcc>> futs;
        long long chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long long b = w * chunk, e = std::min(total, b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, [&g, &mod, b, e] {
                return sweep_range(g, mod, b, e);
            }));
        }
        for (auto& f : futs) parts.push_back(f.get());
    }

    PoAReport rep;
    rep.opt_cost = std::numeric_limits<double>::infinity();
    for (const auto& p : parts) {
        rep.opt_cost = std::min(rep.opt_cost, p.min_cost);
        rep.worst_eq_cost = std::max(rep.worst_eq_cost, p.worst_eq);
        rep.num_equilibria += p.equilibria;
    }
    if (rep.opt_cost > 0.0)
        rep.ratio = rep.worst_eq_cost / rep.opt_cost;
    else
        rep.ratio = rep.worst_eq_cost > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    return rep;
}

}  // namespace congestion
