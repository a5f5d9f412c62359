#include "congestion/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

namespace congestion {

namespace {

long long checked_space(const CongestionGame& g) {
    long long total = g.profile_space();
    if (total > kEnumerationCap)
        throw std::runtime_error("profile space exceeds the enumeration cap");
    if (total <= 0) throw std::invalid_argument("game has an empty strategy set");
    return total;
}

void decode(const CongestionGame& g, long long idx, std::vector<int>& choices) {
    for (size_t u = 0; u < g.players.size(); ++u) {
        int ns = static_cast<int>(g.players[u].size());
        choices[u] = static_cast<int>(idx % ns);
        idx /= ns;
    }
}

int worker_count(long long work) {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 4 : static_cast<int>(std::min(hw, 16u));
    if (work < 50000) return 1;
    return n;
}

struct ScanAcc {
    double min_pot = std::numeric_limits<double>::infinity();
    double max_eq_pot = -std::numeric_limits<double>::infinity();
    double min_cost = std::numeric_limits<double>::infinity();
    double max_eq_cost = -std::numeric_limits<double>::infinity();
    long long equilibria = 0;
};

ScanAcc scan_range(const CongestionGame& g, double alpha, const ModifiedCostTable* eq_mod,
                   const ModifiedCostTable* pot_mod, long long begin, long long end) {
    ScanAcc acc;
    StrategyProfile s;
    s.choices.resize(g.players.size());
    for (long long idx = begin; idx < end; ++idx) {
        decode(g, idx, s.choices);
        recompute_loads(g, s);
        double pot = rosenthal_potential(g, s, pot_mod);
        double cost = social_cost(g, s);
        acc.min_pot = std::min(acc.min_pot, pot);
        acc.min_cost = std::min(acc.min_cost, cost);
        if (verify_alpha_equilibrium(g, s, alpha, eq_mod).holds) {
            ++acc.equilibria;
            acc.max_eq_pot = std::max(acc.max_eq_pot, pot);
            acc.max_eq_cost = std::max(acc.max_eq_cost, cost);
        }
    }
    return acc;
}

ScanAcc full_scan(const CongestionGame& g, double alpha, const ModifiedCostTable* eq_mod,
                  const ModifiedCostTable* pot_mod) {
    long long total = checked_space(g);
    int workers = worker_count(total);
    std::vector<ScanAcc> parts;
    if (workers == 1) {
        parts.push_back(scan_range(g, alpha, eq_mod, pot_mod, 0, total));
    } else {
        std::vector<std::future<ScanAcc>> futs;
        long long chunk = (total + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long long b = w * chunk, e = std::min(total, b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, [&g, alpha, eq_mod, pot_mod, b, e] {
                return scan_range(g, alpha, eq_mod, pot_mod, b, e);
            }));
        }
        for (auto& f : futs) parts.push_back(f.get());
    }
    ScanAcc acc;
    for (const auto& p : parts) {
        acc.min_pot = std::min(acc.min_pot, p.min_pot);
        acc.min_cost = std::min(acc.min_cost, p.min_cost);
        acc.max_eq_pot = std::max(acc.max_eq_pot, p.max_eq_pot);
        acc.max_eq_cost = std::max(acc.max_eq_cost, p.max_eq_cost);
        acc.equilibria += p.equilibria;
    }
    return acc;
}

double safe_ratio(double num, double den) {
    if (den > 0.0) return num / den;
    return num > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

}  // namespace

std::vector<StrategyProfile> enumerate_equilibria(const CongestionGame& g, double alpha,
                                                  const ModifiedCostTable* mod) {
    long long total = checked_space(g);
    std::vector<StrategyProfile> out;
    StrategyProfile s;
    s.choices.resize(g.players.size());
    for (long long idx = 0; idx < total; ++idx) {
        decode(g, idx, s.choices);
        recompute_loads(g, s);
        if (verify_alpha_equilibrium(g, s, alpha, mod).holds) out.push_back(s);
    }
    return out;
}

double exact_stretch(const CongestionGame& g, double alpha, const ModifiedCostTable* eq_mod,
                     const ModifiedCostTable* pot_mod) {
    ScanAcc acc = full_scan(g, alpha, eq_mod, pot_mod);
    if (acc.equilibria == 0) return 0.0;
    return safe_ratio(acc.max_eq_pot, acc.min_pot);
}

double exact_poa(const CongestionGame& g, const ModifiedCostTable* taxed) {
    ScanAcc acc = full_scan(g, 1.0, taxed, nullptr);
    if (acc.equilibria == 0) return 0.0;
    return safe_ratio(acc.max_eq_cost, acc.min_cost);
}

double bruteforce_lambda(const CostFunction& f, int N, Objective family, int grid_steps) {
    if (N < 1 || N > 4) throw std::invalid_argument("bruteforce_lambda handles N in [1,4]");
    if (grid_steps < 1) throw std::invalid_argument("grid_steps must be positive");
    const int nv = N + 1;  // f'(1..N+1)
    double tables = std::pow(grid_steps + 1.0, nv);
    if (tables > 1e8) throw std::invalid_argument("grid too fine for exhaustive search");

    // Candidate rows as (coef_lambda, const + hi_coef*f'(hi) - lo_coef*f'(lo))
    // with the lambda coefficient from the chosen family. m = 0 rows have no
    // lambda term and act as feasibility filters on the table itself.
    struct Row {
        double coef;  // multiplies lambda
        double rhs0;  // constant part
        int hi, lo;   // 1-based f' indices, 0 when absent
        double hi_c, lo_c;
    };
    std::vector<Row> rows;
    std::vector<double> pref(2 * N + 2, 0.0);  // pref[k] = sum_{i<=k} f(i)
    for (int k = 1; k <= 2 * N + 1; ++k) pref[k] = pref[k - 1] + f(k);

    if (family == Objective::SocialCost) {
        for (int n = 0; n <= N; ++n) {
            double hn = n * f(n);
            for (int m = 0; m <= N; ++m) {
                Row r;
                r.coef = m * f(m);
                r.rhs0 = hn;
                r.hi = n + 1;
                r.hi_c = m;
                r.lo = n;
                r.lo_c = n;
                rows.push_back(r);
            }
        }
    } else {
        for (int z = 0; z <= N; ++z) {
            for (int n = 0; n + z <= N; ++n) {
                for (int m = 0; m <= N; ++m) {
                    Row r;
                    r.coef = pref[m + z] - pref[z];
                    r.rhs0 = pref[n + z] - pref[z];
                    r.hi = n + z + 1;
                    r.hi_c = m;
                    r.lo = n + z;
                    r.lo_c = n;
                    rows.push_back(r);
                }
            }
        }
    }

    // Search f'(j) over [0, 4 f(j)]: the m = 0 rows floor f'(1..N) near f,
    // but f'(N+1) has no floor and optimal tables do dip below f there.
    std::vector<double> scale(nv + 1, 0.0);
    double fmax = 1.0;
    for (int j = 1; j <= nv; ++j) fmax = std::max(fmax, f(j));
    for (int j = 1; j <= nv; ++j) scale[j] = 4.0 * (f(j) > 0.0 ? f(j) : fmax) / grid_steps;
    std::vector<int> ticks(nv, 0);
    std::vector<double> fp(nv + 1, 0.0);
    double best = std::numeric_limits<double>::infinity();
    long long total = 1;
    for (int j = 0; j < nv; ++j) total *= grid_steps + 1;
    for (long long idx = 0; idx < total; ++idx) {
        long long rem = idx;
        for (int j = 0; j < nv; ++j) {
            ticks[j] = static_cast<int>(rem % (grid_steps + 1));
            rem /= grid_steps + 1;
        }
        for (int j = 1; j <= nv; ++j) fp[j] = ticks[j - 1] * scale[j];
        double need = 1.0;
        bool feasible = true;
        for (const Row& r : rows) {
            double rhs = r.rhs0;
            if (r.hi > 0) rhs += r.hi_c * fp[r.hi];
            if (r.lo > 0) rhs -= r.lo_c * fp[r.lo];
            if (r.coef > 0.0) {
                need = std::max(need, rhs / r.coef);
            } else if (rhs > 1e-12) {
                feasible = false;
                break;
            }
        }
        if (feasible) best = std::min(best, need);
    }
    return best;
}

CongestionGame random_singleton_game(int players, int resources, int degree,
                                     std::uint64_t seed) {
    if (players < 1 || resources < 1) throw std::invalid_argument("empty game requested");
    if (degree < 0 || degree > 5) throw std::invalid_argument("degree out of range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lead(0.5, 3.0);
    std::uniform_real_distribution<double> base(0.0, 2.0);
    std::bernoulli_distribution with_const(0.5);

    CongestionGame g;
    for (int e = 0; e < resources; ++e) {
        std::vector<double> coeffs(degree + 1, 0.0);
        coeffs[degree] = lead(rng);
        if (degree > 0 && with_const(rng)) coeffs[0] = base(rng);
        g.resources.push_back(CostFunction::polynomial(coeffs));
    }
    g.players.resize(players);
    for (auto& strategies : g.players)
        for (int e = 0; e < resources; ++e) strategies.push_back({e});
    g.validate();
    return g;
}

CongestionGame random_subset_game(int players, int resources, int degree,
                                  int strategies_per_player, int max_subset,
                                  std::uint64_t seed) {
    if (players < 1 || resources < 1) throw std::invalid_argument("empty game requested");
    if (degree < 0 || degree > 5) throw std::invalid_argument("degree out of range");
    if (strategies_per_player < 1) throw std::invalid_argument("need at least one strategy");
    if (max_subset < 1 || max_subset > resources)
        throw std::invalid_argument("subset size out of range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lead(0.5, 3.0);
    std::uniform_real_distribution<double> base(0.0, 2.0);
    std::bernoulli_distribution with_const(0.5);
    std::uniform_int_distribution<int> size_dist(1, max_subset);

    CongestionGame g;
    for (int e = 0; e < resources; ++e) {
        std::vector<double> coeffs(degree + 1, 0.0);
        coeffs[degree] = lead(rng);
        if (degree > 0 && with_const(rng)) coeffs[0] = base(rng);
        g.resources.push_back(CostFunction::polynomial(coeffs));
    }
    std::vector<int> pool(resources);
    for (int e = 0; e < resources; ++e) pool[e] = e;
    g.players.resize(players);
    for (auto& strategies : g.players) {
        std::set<std::vector<int>> seen;
        int guard = 0;
        while (static_cast<int>(strategies.size()) < strategies_per_player) {
            std::shuffle(pool.begin(), pool.end(), rng);
            std::vector<int> st(pool.begin(), pool.begin() + size_dist(rng));
            std::sort(st.begin(), st.end());
            if (seen.insert(st).second || ++guard > 16) strategies.push_back(std::move(st));
        }
    }
    g.validate();
    return g;
}

}  // namespace congestion
