#include "congestion/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "congestion/smoothness.hpp"

namespace congestion {
namespace {

double hpow(int n, int dplus1) {
    double v = 1.0;
    for (int i = 0; i < dplus1; ++i) v *= n;
    return v;
}

long long ipow_ll(long long n, int dplus1) {
    long long v = 1;
    for (int i = 0; i < dplus1; ++i) v *= n;
    return v;
}

// Exact nonnegative rationals for the ladder and the rounding step.
struct Frac {
    long long p = 0;
    long long q = 1;
};

Frac reduce(__int128 p, __int128 q) {
    if (q == 0) throw std::logic_error("rational with zero denominator");
    if (q < 0) {
        p = -p;
        q = -q;
    }
    __int128 a = p < 0 ? -p : p, b = q;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    p /= a;
    q /= a;
    const __int128 lim = std::numeric_limits<long long>::max();
    if (p > lim || -p > lim || q > lim) throw std::overflow_error("rational overflow");
    return Frac{static_cast<long long>(p), static_cast<long long>(q)};
}

Frac fmul(Frac a, Frac b) { return reduce(static_cast<__int128>(a.p) * b.p, static_cast<__int128>(a.q) * b.q); }
Frac fadd(Frac a, Frac b) {
    return reduce(static_cast<__int128>(a.p) * b.q + static_cast<__int128>(b.p) * a.q,
                  static_cast<__int128>(a.q) * b.q);
}

[[noreturn]] void throw_cap(long long denom_cap) {
    throw std::runtime_error("rounding needs a denominator beyond the cap " +
                             std::to_string(denom_cap) + "; retry with a larger epsilon");
}

// Smallest-denominator rational in [lo, hi], 0 <= lo <= hi. Standard
// continued-fraction walk; coefficients past the cap cannot produce an
// admissible denominator, so they abort early.
Frac simplest_in(double lo, double hi, long long denom_cap, int depth = 0) {
    if (lo <= 0.0) return Frac{0, 1};
    double cl = std::ceil(lo);
    if (cl <= hi) return Frac{static_cast<long long>(cl), 1};
    if (depth > 64) throw_cap(denom_cap);
    double af = std::floor(lo);
    if (af > 4e18) throw_cap(denom_cap);
    long long a = static_cast<long long>(af);
    double flo = 1.0 / (hi - af);
    double fhi = 1.0 / (lo - af);
    Frac inner = simplest_in(flo, fhi, denom_cap, depth + 1);
    return reduce(static_cast<__int128>(a) * inner.p + inner.q, inner.p);
}

// Feasibility of the box program min lambda over f'(1..N+1) at a fixed
// lambda, by the forward chain recursion: every row (n,m) with m >= 1 caps
// f'(n+1) given f'(n), the m = 0 rows are the floors f'(n) >= h(n)/n, and
// taking each f'(n) as large as permitted only loosens later caps.
bool sc_box_feasible(int degree, int N, double lambda) {
    const int dp1 = degree + 1;
    double cap = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= N; ++m) cap = std::min(cap, lambda * hpow(m, dp1) / m);
    double cur = cap;  // f'(1)
    for (int n = 1; n <= N; ++n) {
        double floor_n = hpow(n, degree);
        if (cur < floor_n - 1e-9 * (1.0 + floor_n)) return false;
        cur = std::max(cur, floor_n);
        double hn = hpow(n, dp1);
        double next = std::numeric_limits<double>::infinity();
        for (int m = 1; m <= N; ++m) {
            next = std::min(next, (n * cur + lambda * hpow(m, dp1) - hn) / m);
        }
        cur = next;  // f'(n+1)
    }
    return cur >= -1e-12;
}

struct LadderRow {
    int m = 0;
    double mass = 0.0;
};

}  // namespace

LinearProgram build_lpd(const std::vector<double>& h, int N) {
    if (N < 0) throw std::invalid_argument("build_lpd: N must be nonnegative");
    if (static_cast<int>(h.size()) != N + 1)
        throw std::invalid_argument("build_lpd: h must have entries h(0..N)");
    if (h[0] != 0.0) throw std::invalid_argument("build_lpd: h(0) must be 0");
    for (int i = 1; i <= N; ++i) {
        if (h[i] < h[i - 1]) throw std::invalid_argument("build_lpd: h must be non-decreasing");
    }
    const int W = N + 1;
    auto idx = [W](int n, int m) { return n * W + m; };

    LinearProgram lp;
    lp.num_vars = W * W;
    lp.objective.assign(lp.num_vars, 0.0);
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) lp.objective[idx(n, m)] = -h[n];
    }
    std::vector<std::pair<int, double>> norm;
    for (int n = 0; n <= N; ++n) {
        for (int m = 1; m <= N; ++m) {
            if (h[m] != 0.0) norm.emplace_back(idx(n, m), h[m]);
        }
    }
    lp.add_row(std::move(norm), 'L', 1.0);
    for (int t = 1; t <= N; ++t) {
        std::vector<std::pair<int, double>> row;
        for (int m = 0; m <= N; ++m) row.emplace_back(idx(t, m), static_cast<double>(t));
        for (int m = 1; m <= N; ++m) row.emplace_back(idx(t - 1, m), -static_cast<double>(m));
        lp.add_row(std::move(row), 'L', 0.0);
    }
    return lp;
}

DualSolution solve_lpd(int degree, int N) {
    if (degree < 0) throw std::invalid_argument("solve_lpd: degree must be nonnegative");
    if (N < 1) throw std::invalid_argument("solve_lpd: N must be positive");
    const int dp1 = degree + 1;
    const int W = N + 1;
    auto idx = [W](int n, int m) { return n * W + m; };

    std::vector<double> h(W);
    for (int n = 0; n <= N; ++n) h[n] = hpow(n, dp1);

    // Column-scaled variant of build_lpd: x = y * s. The raw program mixes
    // coefficients across many orders of magnitude and the simplex stalls on
    // it at N = 60.
    std::vector<double> s(W * W);
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) {
            s[idx(n, m)] = std::max({h[m], static_cast<double>(n), static_cast<double>(m), 1.0});
        }
    }
    LinearProgram lp;
    lp.num_vars = W * W;
    lp.objective.assign(lp.num_vars, 0.0);
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) {
            int j = idx(n, m);
            lp.objective[j] = -h[n] / s[j];
        }
    }
    std::vector<std::pair<int, double>> norm;
    for (int n = 0; n <= N; ++n) {
        for (int m = 1; m <= N; ++m) {
            int j = idx(n, m);
            if (h[m] != 0.0) norm.emplace_back(j, h[m] / s[j]);
        }
    }
    lp.add_row(std::move(norm), 'L', 1.0);
    for (int t = 1; t <= N; ++t) {
        std::vector<std::pair<int, double>> row;
        for (int m = 0; m <= N; ++m) {
            int j = idx(t, m);
            row.emplace_back(j, t / s[j]);
        }
        for (int m = 1; m <= N; ++m) {
            int j = idx(t - 1, m);
            row.emplace_back(j, -m / s[j]);
        }
        lp.add_row(std::move(row), 'L', 0.0);
    }

    LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal)
        throw std::runtime_error(std::string("solve_lpd: ") + to_string(r.status));

    DualSolution out;
    out.N = N;
    out.degree = degree;
    out.y.assign(W, std::vector<double>(W, 0.0));
    double obj = 0.0;
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) {
            int j = idx(n, m);
            double v = r.x[j] / s[j];
            if (v < 0.0) v = 0.0;
            out.y[n][m] = v;
            obj += h[n] * v;
        }
    }
    out.objective = obj;
    return out;
}

double lpd_value(int degree, int N) {
    if (N <= 60) return solve_lpd(degree, N).objective;
    // Strong duality: LPD(N) equals the box program optimum, and the box
    // program at fixed lambda is a forward chain.
    double hi = 1.0;
    int grow = 0;
    while (!sc_box_feasible(degree, N, hi)) {
        hi *= 2.0;
        if (++grow > 200) throw std::runtime_error("lpd_value: no feasible lambda found");
    }
    double lo = hi > 1.0 ? hi / 2.0 : 0.0;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (sc_box_feasible(degree, N, mid))
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return hi;
}

DualityCheck lp_duality_check(int degree, int N, double rel_tol) {
    DualityCheck out;
    out.primal = solve_lambda_table(CostFunction::monomial(degree), N, Objective::SocialCost).lambda;
    out.dual = solve_lpd(degree, N).objective;
    out.ok = std::abs(out.primal - out.dual) <= rel_tol * std::max(1.0, std::abs(out.primal));
    return out;
}

DualSolution ladder_dual(int degree, long long denom_cap) {
    if (denom_cap < 2) throw std::invalid_argument("ladder_dual: denom_cap too small");
    DualSolution sol = solve_lpd(degree, 60);
    const int dp1 = degree + 1;

    // Support of the vertex, one slot count per consecutive row. A row with
    // its mass on m = 0 carries no flow forward and ends the ladder.
    std::vector<LadderRow> rows;
    for (int n = 0; n <= sol.N; ++n) {
        int best_m = -1;
        double best = 1e-7;
        for (int m = 0; m <= sol.N; ++m) {
            if (sol.y[n][m] > best) {
                best = sol.y[n][m];
                best_m = m;
            }
        }
        if (best_m <= 0) break;
        rows.push_back(LadderRow{best_m, best});
    }
    if (rows.empty()) throw std::runtime_error("ladder_dual: empty dual support");
    while (rows.size() > 1 && rows.back().mass < 1e-4 * rows.front().mass) rows.pop_back();

    // Longest prefix whose exact tight ladder stays within the cap. The
    // unnormalized weights follow c_0 = 1, c_{n+1} = m_n c_n / (n+1), and the
    // normalization is made tight, y_n = c_n / W with W = sum h(m_n) c_n.
    for (int L = static_cast<int>(rows.size()); L >= 1; --L) {
        std::vector<Frac> c(L);
        c[0] = Frac{1, 1};
        for (int i = 1; i < L; ++i) c[i] = fmul(c[i - 1], Frac{rows[i - 1].m, i});
        Frac W{0, 1};
        for (int i = 0; i < L; ++i) W = fadd(W, fmul(Frac{ipow_ll(rows[i].m, dp1), 1}, c[i]));
        std::vector<Frac> ys(L);
        bool ok = true;
        long long M = 1;
        for (int i = 0; i < L && ok; ++i) {
            ys[i] = fmul(c[i], Frac{W.q, W.p});
            if (ys[i].q > denom_cap) {
                ok = false;
                break;
            }
            long long g = std::gcd(M, ys[i].q);
            __int128 lcm = static_cast<__int128>(M) / g * ys[i].q;
            if (lcm > denom_cap) {
                ok = false;
                break;
            }
            M = static_cast<long long>(lcm);
        }
        if (!ok) continue;

        DualSolution out;
        out.N = L - 1;
        out.degree = degree;
        int width = std::max(L, rows[L - 1].m + 1);
        for (int i = 0; i < L; ++i) width = std::max(width, rows[i].m + 1);
        out.y.assign(L, std::vector<double>(width, 0.0));
        double obj = 0.0;
        for (int i = 0; i < L; ++i) {
            double v = static_cast<double>(ys[i].p) / static_cast<double>(ys[i].q);
            out.y[i][rows[i].m] = v;
            obj += hpow(i, dp1) * v;
        }
        out.objective = obj;
        return out;
    }
    throw std::runtime_error("ladder_dual: every prefix exceeds the denominator cap");
}

SchedulingInstance construct_instance(const DualSolution& dual, double epsilon,
                                      long long denom_cap) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("construct_instance: epsilon must be positive");
    if (denom_cap < 2) throw std::invalid_argument("construct_instance: denom_cap too small");
    const int dp1 = dual.degree + 1;
    const double lambda = std::max(dual.objective, 1.0);
    const double shrink = std::max(0.0, 1.0 - epsilon / lambda);

    struct Pool {
        int n, m;
        long long count;
        Frac y;
    };
    std::vector<Pool> pools;
    long long M = 1;
    for (int n = 0; n < static_cast<int>(dual.y.size()); ++n) {
        for (int m = 0; m < static_cast<int>(dual.y[n].size()); ++m) {
            double v = dual.y[n][m];
            if (v <= 1e-9) continue;
            double hi = v * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
            if (hi < 1.0 / static_cast<double>(denom_cap)) continue;  // absorbed into epsilon
            Frac f = simplest_in(shrink * v, hi, denom_cap);
            if (f.p == 0) continue;
            if (f.q > denom_cap) throw_cap(denom_cap);
            long long g = std::gcd(M, f.q);
            __int128 lcm = static_cast<__int128>(M) / g * f.q;
            if (lcm > denom_cap) throw_cap(denom_cap);
            M = static_cast<long long>(lcm);
            pools.push_back(Pool{n, m, 0, f});
        }
    }
    for (Pool& p : pools) p.count = p.y.p * (M / p.y.q);

    // Flow repair: rounding may leave a row with more players than the row
    // below has slots; removing a machine from the smallest-m pool of the
    // upper row restores n * sum_m a_{n,m} <= sum_m m * a_{n-1,m}.
    int max_n = 0;
    for (const Pool& p : pools) max_n = std::max(max_n, p.n);
    auto row_players = [&](int n) {
        long long c = 0;
        for (const Pool& p : pools)
            if (p.n == n) c += p.count;
        return c * n;
    };
    auto row_slots = [&](int n) {
        long long s = 0;
        for (const Pool& p : pools)
            if (p.n == n) s += p.count * p.m;
        return s;
    };
    for (int n = 0; n < max_n; ++n) {
        while (row_players(n + 1) > row_slots(n)) {
            Pool* victim = nullptr;
            for (Pool& p : pools) {
                if (p.n == n + 1 && p.count > 0 && (!victim || p.m < victim->m)) victim = &p;
            }
            if (!victim) break;
            --victim->count;
        }
    }
    pools.erase(std::remove_if(pools.begin(), pools.end(),
                               [](const Pool& p) { return p.count == 0; }),
                pools.end());

    SchedulingInstance inst;
    inst.degree = dual.degree;
    inst.M = M;
    inst.epsilon = epsilon;
    for (const Pool& p : pools) {
        inst.pools.push_back({static_cast<long long>(p.n), static_cast<long long>(p.m), p.count});
        inst.total_machines += p.count;
        inst.total_players += static_cast<long long>(p.n) * p.count;
        inst.dual_objective +=
            hpow(p.n, dp1) * static_cast<double>(p.count) / static_cast<double>(M);
    }

    // Machines are resources, pool order. Group N_n holds n players per
    // row-n machine; their optimal machines are the row n-1 slots, filled
    // round-robin one slot per machine per pass.
    std::vector<int> pool_base(pools.size(), 0);
    int next_res = 0;
    for (size_t i = 0; i < pools.size(); ++i) {
        pool_base[i] = next_res;
        next_res += static_cast<int>(pools[i].count);
    }
    inst.game.resources.assign(next_res, CostFunction::monomial(dual.degree));

    struct Slot {
        int machine;
        int cap;
        int used = 0;
    };
    std::vector<int> eq_choice, opt_choice;
    for (int n = 1; n <= max_n; ++n) {
        std::vector<Slot> slots;  // row n-1 machines
        for (size_t i = 0; i < pools.size(); ++i) {
            if (pools[i].n != n - 1 || pools[i].m == 0) continue;
            for (long long k = 0; k < pools[i].count; ++k)
                slots.push_back(Slot{pool_base[i] + static_cast<int>(k), pools[i].m});
        }
        size_t cursor = 0;
        auto next_slot = [&]() {
            for (size_t step = 0; step < slots.size(); ++step) {
                Slot& s = slots[cursor];
                cursor = (cursor + 1) % slots.size();
                if (s.used < s.cap) {
                    ++s.used;
                    return s.machine;
                }
            }
            throw std::logic_error("construct_instance: ran out of optimal slots");
        };
        for (size_t i = 0; i < pools.size(); ++i) {
            if (pools[i].n != n) continue;
            for (long long k = 0; k < pools[i].count; ++k) {
                int eq_machine = pool_base[i] + static_cast<int>(k);
                for (int u = 0; u < n; ++u) {
                    if (slots.empty()) throw std::logic_error("construct_instance: ran out of optimal slots");
                    int opt_machine = next_slot();
                    inst.game.players.push_back({{eq_machine}, {opt_machine}});
                    eq_choice.push_back(0);
                    opt_choice.push_back(1);
                }
            }
        }
    }
    if (static_cast<long long>(eq_choice.size()) != inst.total_players)
        throw std::logic_error("construct_instance: player count mismatch");
    if (inst.total_players > 0) {
        inst.game.validate();
        inst.equilibrium = make_profile(inst.game, eq_choice);
        inst.optimum = make_profile(inst.game, opt_choice);
    }
    return inst;
}

GapReport verify_gap(const SchedulingInstance& inst) {
    GapReport rep;
    if (inst.pools.empty() || inst.total_machines == 0 || inst.total_players == 0) {
        rep.degenerate = true;
        return rep;
    }
    const int dp1 = inst.degree + 1;
    const auto& eq = inst.equilibrium.loads;
    const auto& opt = inst.optimum.loads;

    rep.structural_ok = true;
    int res = 0;
    for (const auto& pool : inst.pools) {
        for (long long k = 0; k < pool[2]; ++k, ++res) {
            if (eq[res] != pool[0]) rep.structural_ok = false;
            if (opt[res] > pool[1]) rep.structural_ok = false;
        }
    }
    if (res != inst.game.num_resources()) rep.structural_ok = false;

    rep.eq_is_pne = true;
    for (int u = 0; u < inst.game.num_players(); ++u) {
        int cur = inst.game.players[u][inst.equilibrium.choices[u]][0];
        int alt = inst.game.players[u][1 - inst.equilibrium.choices[u]][0];
        if (eq[alt] + 1 < eq[cur]) rep.eq_is_pne = false;
    }

    long long num = 0, den = 0;
    for (int e = 0; e < inst.game.num_resources(); ++e) {
        num += ipow_ll(eq[e], dp1);
        den += ipow_ll(opt[e], dp1);
    }
    if (den == 0)
        rep.ratio = num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    else
        rep.ratio = static_cast<double>(num) / static_cast<double>(den);
    return rep;
}

}  // namespace congestion
