#include "congestion/smoothness.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <stdexcept>
#include <thread>

namespace congestion {

const char* to_string(Objective o) {
    return o == Objective::Potential ? "potential" : "social_cost";
}

namespace {

double powi(double x, int e) {
    double acc = 1.0;
    for (int i = 0; i < e; ++i) acc *= x;
    return acc;
}

int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : static_cast<int>(std::min(hw, 16u));
}

// h_e for the social-cost family
double h_of(const CostFunction& f, int n) { return n <= 0 ? 0.0 : n * f(n); }

double fp_at(const std::vector<double>& fprime, int i) {
    if (i <= 0) return 0.0;
    if (i > static_cast<int>(fprime.size())) throw std::out_of_range("f' index out of range");
    return fprime[static_cast<size_t>(i) - 1];
}

}  // namespace

double eval_sc_constraint(const CostFunction& f, const std::vector<double>& fprime,
                          int n, int m, double lambda) {
    if (n < 0 || m < 0) throw std::out_of_range("negative index");
    double fp1 = m > 0 ? fp_at(fprime, n + 1) : 0.0;
    double fp0 = n > 0 ? fp_at(fprime, n) : 0.0;
    return lambda * h_of(f, m) - m * fp1 + n * fp0 - h_of(f, n);
}

double eval_phi_constraint(const CostFunction& f, const std::vector<double>& fprime,
                           int n, int z, int m, double lambda) {
    if (n < 0 || z < 0 || m < 0) throw std::out_of_range("negative index");
    double sum_m = 0.0, sum_n = 0.0;
    for (int i = z + 1; i <= m + z; ++i) sum_m += f(i);
    for (int i = z + 1; i <= n + z; ++i) sum_n += f(i);
    double fp1 = m > 0 ? fp_at(fprime, n + z + 1) : 0.0;
    double fp0 = n > 0 ? fp_at(fprime, n + z) : 0.0;
    return lambda * sum_m - m * fp1 + n * fp0 - sum_n;
}

// variable layout of the small-N programs: 0 = lambda, j = f'(j) for j >= 1
LinearProgram build_lp_phi(const CostFunction& f, int N) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    LinearProgram lp;
    lp.num_vars = N + 2;
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[0] = 1.0;
    // m+z reaches 2N, so the prefix sums run past N (tables extend constantly)
    std::vector<double> S(2 * static_cast<size_t>(N) + 1, 0.0);
    for (int t = 1; t <= 2 * N; ++t) S[t] = S[t - 1] + f(t);
    for (int z = 0; z <= N; ++z) {
        for (int n = 0; n + z <= N; ++n) {
            for (int m = 0; m <= N; ++m) {
                std::vector<std::pair<int, double>> terms;
                double lam_coeff = S[m + z] - S[z];
                if (lam_coeff != 0.0) terms.push_back({0, lam_coeff});
                if (m > 0) terms.push_back({n + z + 1, -double(m)});
                if (n > 0) terms.push_back({n + z, double(n)});
                lp.add_row(std::move(terms), 'G', S[n + z] - S[z]);
            }
        }
    }
    return lp;
}

LinearProgram build_lp_sc(const CostFunction& f, int N) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    LinearProgram lp;
    lp.num_vars = N + 2;
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[0] = 1.0;
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) {
            std::vector<std::pair<int, double>> terms;
            if (m > 0) {
                terms.push_back({0, h_of(f, m)});
                terms.push_back({n + 1, -double(m)});
            }
            if (n > 0) terms.push_back({n, double(n)});
            lp.add_row(std::move(terms), 'G', h_of(f, n));
        }
    }
    return lp;
}

namespace {

// most violated rows of a fully materialized family at a candidate point;
// generic over f, full scan in m (cheap at small N)
std::vector<LinearProgram::Row> scan_family(const LinearProgram& family,
                                            const std::vector<double>& x, int top) {
    std::vector<std::pair<double, size_t>> viol;
    for (size_t r = 0; r < family.rows.size(); ++r) {
        const auto& row = family.rows[r];
        double lhs = 0.0, mag = std::fabs(row.rhs);
        for (auto [j, a] : row.terms) {
            lhs += a * x[j];
            mag += std::fabs(a * x[j]);
        }
        // threshold sits above solve_lazy's violation_tol so returned cuts
        // always pass its satisfied-cut assertion
        double v = (row.rhs - lhs) / (1.0 + mag);
        if (v > 1e-7) viol.push_back({v, r});
    }
    std::sort(viol.begin(), viol.end(), [](auto& a, auto& b) { return a.first > b.first; });
    std::vector<LinearProgram::Row> out;
    for (size_t i = 0; i < viol.size() && i < static_cast<size_t>(top); ++i)
        out.push_back(family.rows[viol[i].second]);
    return out;
}

}  // namespace

LazyFamily lazy_lp_phi(const CostFunction& f, int N) {
    auto family = std::make_shared<LinearProgram>(build_lp_phi(f, N));
    LazyFamily out;
    out.core.num_vars = family->num_vars;
    out.core.objective = family->objective;
    // core holds only family rows: floors (the m=0 rows, folded into lower
    // bounds) plus the (0, j-1, 1) rows f'(j) <= lambda f(j)
    out.core.lower.assign(out.core.num_vars, 0.0);
    for (int j = 1; j <= N; ++j) out.core.lower[j] = f(j);
    for (int j = 1; j <= N + 1; ++j) out.core.add_row({{0, f(j)}, {j, -1.0}}, 'G', 0.0);
    out.oracle = [family](const std::vector<double>& x) { return scan_family(*family, x, 16); };
    return out;
}

LazyFamily lazy_lp_sc(const CostFunction& f, int N) {
    auto family = std::make_shared<LinearProgram>(build_lp_sc(f, N));
    LazyFamily out;
    out.core.num_vars = family->num_vars;
    out.core.objective = family->objective;
    // floors are the m=0 rows divided by n; the only family upper row in
    // closed form is (0, 1): f'(1) <= lambda h(1)
    out.core.lower.assign(out.core.num_vars, 0.0);
    for (int j = 1; j <= N; ++j) out.core.lower[j] = f(j);
    out.core.add_row({{0, h_of(f, 1)}, {1, -1.0}}, 'G', 0.0);
    out.oracle = [family](const std::vector<double>& x) { return scan_family(*family, x, 16); };
    return out;
}

namespace {

// Shared machinery of the K-truncated monomial programs. Variables are
// u_j = f'(j) / j^d for j in [1, K-1]; f'(0) = 0 and f'(K) is pinned to
// nu_hat * K^d, which makes the program depend on lambda_hat (resolved by
// the outer bisection in the solve_*_monomial drivers).
struct TruncCtx {
    Objective objective;
    int d = 1;
    int K = 150;
    long long m_cut_all = 0;
    std::vector<double> S;    // potential family: S[t] = sum_{i<=t} i^d
    std::vector<double> hm;   // social family: hm[m] = m^{d+1}
    std::vector<double> nd;   // nd[j] = j^d, j <= K

    TruncCtx(Objective obj, int d_, int K_) : objective(obj), d(d_), K(K_) {
        if (d < 1 || d > 5) throw std::invalid_argument("degree out of range");
        if (K < 3) throw std::invalid_argument("K too small");
        if (objective == Objective::Potential) {
            m_cut_all = static_cast<long long>(K + 1) * (K + 1) * (d + 1);
            S.resize(static_cast<size_t>(m_cut_all) + K + 2, 0.0);
            for (size_t t = 1; t < S.size(); ++t) S[t] = S[t - 1] + powi(double(t), d);
        } else {
            m_cut_all = static_cast<long long>(K + 1) * (K + 1);
            hm.resize(static_cast<size_t>(m_cut_all) + 2, 0.0);
            for (size_t m = 1; m < hm.size(); ++m) hm[m] = powi(double(m), d + 1);
        }
        nd.resize(static_cast<size_t>(K) + 1, 0.0);
        for (int j = 0; j <= K; ++j) nd[j] = powi(double(j), d);
    }

    double nu_hat(double lam) const {
        return objective == Objective::Potential ? std::pow(lam, 1.0 / (d + 1))
                                                 : std::pow((d + 1) * lam, 1.0 / (d + 1));
    }

    long long cutoff(int n, int z) const {
        long long c = objective == Objective::Potential
                          ? static_cast<long long>(n + z + 1) * (n + z + 1) * (d + 1)
                          : static_cast<long long>(n + 1) * (n + 1);
        return std::min(c, m_cut_all);
    }

    // row identity packs (n, z, m); z = 0 for the social family
    static long long key(int n, int z, long long m) {
        return (static_cast<long long>(n) * 2048 + z) * 8388608 + m;
    }

    LinearProgram::Row make_row(double lam, int n, int z, long long m) const {
        double pin = nu_hat(lam) * nd[K];
        LinearProgram::Row row;
        row.rel = 'G';
        row.tag = key(n, z, m);
        int ti = n + z + 1;  // index of the f' the mover pays
        int si = n + z;      // index of the f' the mover leaves
        double lam_term, rhs_base;
        if (objective == Objective::Potential) {
            lam_term = lam * (S[m + z] - S[z]);
            rhs_base = S[si] - S[z];
        } else {
            lam_term = lam * hm[m];
            rhs_base = hm[si];
        }
        double rhs = rhs_base - lam_term;
        if (m > 0) {
            if (ti == K) rhs += double(m) * pin;
            else row.terms.push_back({ti - 1, -double(m) * nd[ti]});
        }
        if (n > 0) row.terms.push_back({si - 1, double(n) * nd[si]});
        row.rhs = rhs;
        return row;
    }

    // exact concave maximization of the violation in m for one (n, z):
    // the slope -lam*f(m+z+1) + f'(ti) is non-increasing, so binary search
    double fprime_at(const std::vector<double>& u, double lam, int j) const {
        if (j <= 0) return 0.0;
        if (j == K) return nu_hat(lam) * nd[K];
        return u[static_cast<size_t>(j) - 1] * nd[j];
    }

    double slack_at(double lam, const std::vector<double>& fp_full, int n, int z,
                    long long m) const {
        int ti = n + z + 1, si = n + z;
        double fp1 = m > 0 ? fp_full[ti] : 0.0;
        double fp0 = n > 0 ? fp_full[si] : 0.0;
        if (objective == Objective::Potential)
            return lam * (S[m + z] - S[z]) - m * fp1 + n * fp0 - (S[si] - S[z]);
        return lam * hm[m] - m * fp1 + n * fp0 - hm[si];
    }

    double slack_scale(double lam, const std::vector<double>& fp_full, int n, int z,
                       long long m) const {
        int ti = n + z + 1, si = n + z;
        double fp1 = m > 0 ? fp_full[ti] : 0.0;
        double fp0 = n > 0 ? fp_full[si] : 0.0;
        double lam_term = objective == Objective::Potential ? lam * (S[m + z] - S[z])
                                                            : lam * hm[m];
        double rhs = objective == Objective::Potential ? S[si] - S[z] : hm[si];
        return 1.0 + std::fabs(lam_term) + std::fabs(double(m) * fp1) +
               std::fabs(double(n) * fp0) + std::fabs(rhs);
    }

    // returns violated (n, z, m) triples, most violated first
    std::vector<std::array<long long, 3>> separate(double lam, const std::vector<double>& u,
                                                   bool stride_sweep) const {
        std::vector<double> fp_full(static_cast<size_t>(K) + 1, 0.0);
        for (int j = 1; j <= K; ++j) fp_full[j] = fprime_at(u, lam, j);

        struct Hit { double v; int n, z; long long m; };
        std::vector<Hit> hits;
        auto consider = [&](int n, int z, long long m) {
            if (m < 1 || m > cutoff(n, z)) return;
            double sl = slack_at(lam, fp_full, n, z, m);
            double v = -sl / slack_scale(lam, fp_full, n, z, m);
            if (v > 1e-9) hits.push_back({v, n, z, m});
        };
        auto scan_pair = [&](int n, int z) {
            int ti = n + z + 1;
            double fp1 = fp_full[ti];
            long long lo = 1, hi = cutoff(n, z);
            // largest m whose forward slope is still nonnegative
            while (lo < hi) {
                long long mid = (lo + hi + 1) / 2;
                double df = objective == Objective::Potential
                                ? lam * (S[mid + z] - S[mid - 1 + z])
                                : lam * (hm[mid] - hm[mid - 1]);
                if (df <= fp1) lo = mid;
                else hi = mid - 1;
            }
            for (long long m = std::max(1LL, lo - 2); m <= std::min(cutoff(n, z), lo + 2); ++m)
                consider(n, z, m);
            consider(n, z, 1);
            consider(n, z, cutoff(n, z));
            if (stride_sweep) {
                long long step = std::max<long long>(1, cutoff(n, z) / 48);
                for (long long m = 1; m <= cutoff(n, z); m += step) consider(n, z, m);
            }
        };
        if (objective == Objective::Potential) {
            for (int z = 0; z <= K - 1; ++z)
                for (int n = 0; n + z <= K - 1; ++n) scan_pair(n, z);
        } else {
            for (int n = 0; n <= K - 1; ++n) scan_pair(n, 0);
        }
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.v > b.v; });
        // enough cuts per round that every chain link can move at once;
        // starving the loop here stretches Kelley into hundreds of rounds
        size_t cap = std::max<size_t>(48, 2 * static_cast<size_t>(K));
        std::vector<std::array<long long, 3>> out;
        for (size_t i = 0; i < hits.size() && i < cap; ++i)
            out.push_back({hits[i].n, hits[i].z, hits[i].m});
        return out;
    }

    std::vector<std::array<long long, 3>> seed_rows() const {
        std::vector<std::array<long long, 3>> seeds;
        if (objective == Objective::Potential) {
            for (int z = 0; z <= K - 2; ++z) seeds.push_back({0, z, 1});
            for (int t = 1; t <= K - 1; ++t) {
                seeds.push_back({t, 0, std::max<long long>(1, t / 2)});
                // the diagonal keeps the seed-chain envelope from growing
                // geometrically (homogeneous factor below one)
                seeds.push_back({t, 0, t + 1});
            }
        } else {
            for (int n = 0; n <= K - 1; ++n) {
                seeds.push_back({n, 0, std::max<long long>(1, (n + 1) / 2)});
                seeds.push_back({n, 0, n + 1});
                seeds.push_back({n, 0, 1});
            }
        }
        return seeds;
    }

    LinearProgram pool_lp(double lam, const std::vector<std::array<long long, 3>>& pool) const {
        LinearProgram lp;
        lp.num_vars = K - 1;
        lp.objective.assign(lp.num_vars, -1.0);  // push to the upper envelope
        lp.lower.assign(lp.num_vars, 1.0);       // floors f'(j) >= j^d
        for (const auto& r : pool)
            lp.rows.push_back(make_row(lam, int(r[0]), int(r[1]), r[2]));
        return lp;
    }

    struct ChainOut {
        bool feasible = true;
        std::vector<double> u;
    };

    // Every family row couples only the consecutive pair (u_t, u_{t+1}) and
    // the u_t coefficient is nonnegative, so at fixed lambda the pool is a
    // monotone chain system: its componentwise maximum (which is also the
    // sum-u maximizer the Kelley loop wants) comes from one forward pass,
    // and the pool is feasible iff that pass clears every floor.
    ChainOut chain_solve(double lam, const std::vector<std::array<long long, 3>>& pool) const {
        int nv = K - 1;
        std::vector<double> floors(nv, 1.0);
        struct Up {
            int prev;
            double a_prev, a_self, rhs;  // a_self < 0 on the bounded variable
        };
        std::vector<std::vector<Up>> ups(nv);
        ChainOut out;
        for (const auto& r : pool) {
            LinearProgram::Row row = make_row(lam, int(r[0]), int(r[1]), r[2]);
            int neg = -1, pos = -1;
            double an = 0.0, ap = 0.0;
            for (auto [j, a] : row.terms) {
                if (a < 0.0) { neg = j; an = a; }
                else if (a > 0.0) { pos = j; ap = a; }
            }
            if (neg >= 0) {
                if (pos >= neg) throw std::logic_error("pool row is not chain-ordered");
                ups[neg].push_back({pos, ap, an, row.rhs});
            } else if (pos >= 0) {
                floors[pos] = std::max(floors[pos], row.rhs / ap);
            } else if (row.rhs > 1e-12) {
                out.feasible = false;  // constant row already violated
                return out;
            }
        }
        out.u.assign(nv, 0.0);
        for (int j = 0; j < nv; ++j) {
            double cap = 1e250;  // finite stand-in for "no cap yet"
            for (const auto& up : ups[j]) {
                double carry = up.prev >= 0 ? up.a_prev * out.u[up.prev] : 0.0;
                cap = std::min(cap, (up.rhs - carry) / up.a_self);
            }
            if (cap < floors[j] - 1e-10 * (1.0 + std::fabs(floors[j]))) {
                out.feasible = false;
                return out;
            }
            out.u[j] = std::max(cap, floors[j]);
        }
        return out;
    }
};

struct ProbeResult {
    bool feasible = false;
    // a solve at tolerance edge (near-critical lambda) counts as infeasible
    // for the bisection; only clean Optimal-and-silent probes count feasible
    bool solver_trouble = false;
    std::vector<double> u;
    int iterations = 0;
    int rounds = 0;
};

// Kelley loop at fixed lambda_hat over a persistent pool. Pool infeasibility
// is conclusive (the pool is a relaxation); a silent oracle certifies the
// whole family at the found point.
ProbeResult probe_lambda(const TruncCtx& ctx, double lam,
                         std::vector<std::array<long long, 3>>& pool) {
    ProbeResult out;
    std::map<long long, size_t> have;
    for (size_t i = 0; i < pool.size(); ++i)
        have[TruncCtx::key(int(pool[i][0]), int(pool[i][1]), pool[i][2])] = i;
    for (int round = 1; round <= 400; ++round) {
        TruncCtx::ChainOut cs = ctx.chain_solve(lam, pool);
        out.iterations += static_cast<int>(pool.size());
        out.rounds = round;
        if (!cs.feasible) return out;  // conclusively infeasible
        auto cuts = ctx.separate(lam, cs.u, round % 5 == 0);
        if (cuts.empty()) {
            out.feasible = true;
            out.u = cs.u;
            return out;
        }
        bool added = false;
        for (const auto& c : cuts) {
            long long k = TruncCtx::key(int(c[0]), int(c[1]), c[2]);
            if (have.count(k)) continue;
            have[k] = pool.size();
            pool.push_back(c);
            added = true;
        }
        if (!added) {
            // every violated row is already pooled: the solve is at tolerance
            out.feasible = true;
            out.u = cs.u;
            return out;
        }
    }
    if (std::getenv("CONGESTION_DEBUG"))
        std::fprintf(stderr, "probe lam=%.9f exhausted rounds, pool=%zu\n", lam, pool.size());
    out.solver_trouble = true;
    return out;
}

// cuts for the exposed lazy view; refiltered with solve_lazy's own violation
// measure so none of them trips its satisfied-cut assertion
std::vector<LinearProgram::Row> oracle_rows(const TruncCtx& ctx, double lam,
                                            const std::vector<double>& u) {
    std::vector<LinearProgram::Row> rows;
    for (const auto& c : ctx.separate(lam, u, false)) {
        LinearProgram::Row row = ctx.make_row(lam, int(c[0]), int(c[1]), c[2]);
        double lhs = 0.0, mag = std::fabs(row.rhs);
        for (auto [j, a] : row.terms) {
            lhs += a * u[j];
            mag += std::fabs(a * u[j]);
        }
        if (row.rhs - lhs > 1e-7 * (1.0 + mag)) rows.push_back(std::move(row));
    }
    return rows;
}

SmoothnessCertificate solve_monomial_bisect(Objective obj, int degree, int K) {
    TruncCtx ctx(obj, degree, K);
    std::vector<std::array<long long, 3>> pool = ctx.seed_rows();
    size_t nseeds = pool.size();  // seeds carry the bounding rows, never pruned

    double lo = 1.0, hi = powi(4.0, degree + 1);
    ProbeResult best;
    double best_lam = 0.0;
    {
        auto r = probe_lambda(ctx, hi, pool);
        int grow = 0, attempts = 0;
        while (!r.feasible && attempts < 10) {
            // grow only on a conclusive verdict; an exhausted probe retries at
            // the same lambda, continuing on the pool it already built
            if (!r.solver_trouble) {
                if (++grow > 4) break;
                lo = hi;
                hi *= 4.0;
            }
            ++attempts;
            r = probe_lambda(ctx, hi, pool);
        }
        if (!r.feasible) throw std::runtime_error("no feasible lambda bracket");
        best = r;
        best_lam = hi;
    }
    int total_iters = best.iterations, total_rounds = best.rounds;
    for (int step = 0; step < 30; ++step) {
        double mid = 0.5 * (lo + hi);
        auto r = probe_lambda(ctx, mid, pool);
        if (!r.feasible && r.solver_trouble) r = probe_lambda(ctx, mid, pool);
        total_iters += r.iterations;
        total_rounds += r.rounds;
        if (r.feasible) {
            hi = mid;
            best = r;
            best_lam = mid;
        } else {
            lo = mid;
        }
        // keep the pool lean: seeds always stay, other rows only while
        // near-binding at the current incumbent
        if (pool.size() > nseeds + 16 * static_cast<size_t>(K)) {
            std::vector<std::array<long long, 3>> kept(pool.begin(), pool.begin() + nseeds);
            std::vector<double> fp_full(static_cast<size_t>(K) + 1, 0.0);
            for (int j = 1; j <= K; ++j) fp_full[j] = ctx.fprime_at(best.u, best_lam, j);
            for (size_t i = nseeds; i < pool.size(); ++i) {
                const auto& row = pool[i];
                double sl = ctx.slack_at(best_lam, fp_full, int(row[0]), int(row[1]), row[2]);
                if (sl <= 1e-5 * ctx.slack_scale(best_lam, fp_full, int(row[0]), int(row[1]), row[2]))
                    kept.push_back(row);
            }
            pool = std::move(kept);
        }
    }

    SmoothnessCertificate cert;
    cert.objective = obj;
    cert.scope = obj == Objective::Potential ? CertScope::Strong : CertScope::Plain;
    cert.lambda = best_lam;
    cert.nu = ctx.nu_hat(best_lam);
    cert.K = K;
    cert.degree = degree;
    cert.fprime.assign(1, std::vector<double>(static_cast<size_t>(K), 0.0));
    for (int j = 1; j <= K; ++j) cert.fprime[0][j - 1] = ctx.fprime_at(best.u, best_lam, j);
    cert.lp_iterations = total_iters;
    cert.lp_rounds = total_rounds;

    // the exhaustive sweep is the authority on the certified table
    auto scan = verify_certificate({CostFunction::monomial(degree)}, cert, true);
    if (!scan.valid) {
        // one repair pass: pool the witness, re-probe at the incumbent
        pool.push_back({scan.n, std::max(scan.z, 0), scan.m});
        auto r = probe_lambda(ctx, best_lam, pool);
        if (r.feasible) {
            for (int j = 1; j <= K; ++j) cert.fprime[0][j - 1] = ctx.fprime_at(r.u, best_lam, j);
            scan = verify_certificate({CostFunction::monomial(degree)}, cert, true);
        }
        if (!scan.valid) throw std::runtime_error("certificate failed the exhaustive sweep");
    }
    return cert;
}

}  // namespace

TruncatedFamily build_lp_phi_truncated(int degree, int K, double lambda_hat) {
    auto ctx = std::make_shared<TruncCtx>(Objective::Potential, degree, K);
    TruncatedFamily out;
    out.objective = Objective::Potential;
    out.degree = degree;
    out.K = K;
    out.lambda_hat = lambda_hat;
    out.nu_hat = ctx->nu_hat(lambda_hat);
    out.scale.assign(ctx->nd.begin() + 1, ctx->nd.begin() + K);
    out.core = ctx->pool_lp(lambda_hat, ctx->seed_rows());
    out.oracle = [ctx, lambda_hat](const std::vector<double>& u) {
        return oracle_rows(*ctx, lambda_hat, u);
    };
    return out;
}

TruncatedFamily build_lp_sc_truncated(int degree, int K, double lambda_hat) {
    auto ctx = std::make_shared<TruncCtx>(Objective::SocialCost, degree, K);
    TruncatedFamily out;
    out.objective = Objective::SocialCost;
    out.degree = degree;
    out.K = K;
    out.lambda_hat = lambda_hat;
    out.nu_hat = ctx->nu_hat(lambda_hat);
    out.scale.assign(ctx->nd.begin() + 1, ctx->nd.begin() + K);
    out.core = ctx->pool_lp(lambda_hat, ctx->seed_rows());
    out.oracle = [ctx, lambda_hat](const std::vector<double>& u) {
        return oracle_rows(*ctx, lambda_hat, u);
    };
    return out;
}

SmoothnessCertificate solve_phi_monomial(int degree, int K) {
    return solve_monomial_bisect(Objective::Potential, degree, K);
}

SmoothnessCertificate solve_sc_monomial(int degree, int K) {
    return solve_monomial_bisect(Objective::SocialCost, degree, K);
}

SmoothnessCertificate solve_lambda_table(const CostFunction& f, int N, Objective obj) {
    if (N < 1 || N > 100) throw std::invalid_argument("N out of range for the exact solve");
    LinearProgram lp = obj == Objective::Potential ? build_lp_phi(f, N) : build_lp_sc(f, N);
    LpResult res = lp_solve(lp);
    if (res.status != LpStatus::Optimal)
        throw std::runtime_error(std::string("LP solve failed: ") + to_string(res.status));
    SmoothnessCertificate cert;
    cert.objective = obj;
    cert.scope = obj == Objective::Potential ? CertScope::Strong : CertScope::Plain;
    cert.lambda = res.x[0];
    cert.K = N + 1;
    cert.fprime.assign(1, std::vector<double>(static_cast<size_t>(N) + 1, 0.0));
    for (int j = 1; j <= N + 1; ++j) cert.fprime[0][j - 1] = res.x[j];
    cert.lp_iterations = res.iterations;
    return cert;
}

SmoothnessCertificate solve_lambda_game(const CongestionGame& g, Objective obj) {
    g.validate();
    int N = g.num_players();
    SmoothnessCertificate cert;
    cert.objective = obj;
    cert.scope = obj == Objective::Potential ? CertScope::Strong : CertScope::Plain;
    cert.K = N + 1;
    cert.lambda = 1.0;
    // identical resources share one solve
    std::map<std::vector<double>, size_t> memo;
    for (const auto& f : g.resources) {
        std::vector<double> fkey;
        fkey.push_back(double(int(f.kind)));
        for (int i = 1; i <= N + 1; ++i) fkey.push_back(f(i));
        auto it = memo.find(fkey);
        if (it != memo.end()) {
            cert.fprime.push_back(cert.fprime[it->second]);
            continue;
        }
        auto one = solve_lambda_table(f, N, obj);
        memo[fkey] = cert.fprime.size();
        cert.fprime.push_back(one.fprime[0]);
        cert.lambda = std::max(cert.lambda, one.lambda);
        cert.lp_iterations += one.lp_iterations;
    }
    return cert;
}

namespace {

struct ScanAcc {
    double worst = std::numeric_limits<double>::infinity();
    int n = -1, z = -1;
    long long m = -1;
    void consider(double slack_norm, int nn, int zz, long long mm) {
        if (slack_norm < worst) {
            worst = slack_norm;
            n = nn;
            z = zz;
            m = mm;
        }
    }
};

}  // namespace

CertScan verify_certificate(const std::vector<CostFunction>& fs,
                            const SmoothnessCertificate& cert, bool exhaustive,
                            int n_limit, long long m_limit) {
    if (fs.size() != cert.fprime.size())
        throw std::invalid_argument("one cost function per certificate table required");
    CertScan out;
    out.valid = true;
    out.worst_slack = 0.0;
    bool monomial = cert.degree >= 0;
    for (size_t r = 0; r < fs.size(); ++r) {
        const CostFunction& f = fs[r];
        const std::vector<double>& fp = cert.fprime[r];
        int K = static_cast<int>(fp.size());
        int n_lim = n_limit >= 0 ? n_limit : K - 1;
        long long m_lim;
        if (m_limit >= 0) m_lim = m_limit;
        else if (monomial && cert.objective == Objective::Potential)
            m_lim = static_cast<long long>(K + 1) * (K + 1) * (cert.degree + 1);
        else if (monomial)
            m_lim = static_cast<long long>(K + 1) * (K + 1);
        else
            m_lim = n_lim;

        auto fp_ext = [&](int i) -> double {
            if (i <= 0) return 0.0;
            if (i <= K) return fp[static_cast<size_t>(i) - 1];
            if (cert.nu > 0.0 && cert.degree >= 0) return cert.nu * powi(double(i), cert.degree);
            throw std::out_of_range("certificate table too short");
        };

        double lam = cert.lambda;
        int T = worker_count();
        std::vector<std::future<ScanAcc>> futs;
        // shared caches must outlive the async workers below
        std::vector<double> h, S;

        if (cert.objective == Objective::SocialCost) {
            // cache h over the full m range once per resource
            h.resize(static_cast<size_t>(std::max<long long>(m_lim, n_lim)) + 1);
            for (long long i = 0; i < static_cast<long long>(h.size()); ++i)
                h[i] = i <= 0 ? 0.0 : double(i) * f(int(i));
            auto run = [&](int n0, int n1) {
                ScanAcc acc;
                for (int n = n0; n < n1; ++n) {
                    double fp1 = fp_ext(n + 1);
                    double fp0 = n > 0 ? fp_ext(n) : 0.0;
                    double cn = n * fp0 - h[n];
                    long long mtop = exhaustive ? m_lim : 0;
                    if (exhaustive) {
                        for (long long m = 0; m <= mtop; ++m) {
                            double lt = lam * h[m];
                            double sl = lt - m * fp1 + cn;
                            double sc = 1.0 + std::fabs(lt) + std::fabs(m * fp1) +
                                        std::fabs(n * fp0) + std::fabs(h[n]);
                            acc.consider(sl / sc, n, -1, m);
                        }
                    } else {
                        // slope flip search plus a strided guard
                        long long lo = 1, hi = m_lim;
                        while (lo < hi) {
                            long long mid = (lo + hi + 1) / 2;
                            if (lam * (h[mid] - h[mid - 1]) <= fp1) lo = mid;
                            else hi = mid - 1;
                        }
                        auto look = [&](long long m) {
                            if (m < 0 || m > m_lim) return;
                            double lt = lam * h[m];
                            double sl = lt - m * fp1 + cn;
                            double sc = 1.0 + std::fabs(lt) + std::fabs(m * fp1) +
                                        std::fabs(n * fp0) + std::fabs(h[n]);
                            acc.consider(sl / sc, n, -1, m);
                        };
                        for (long long m = lo - 2; m <= lo + 2; ++m) look(m);
                        look(0);
                        look(1);
                        look(m_lim);
                        long long step = std::max<long long>(1, m_lim / 64);
                        for (long long m = 0; m <= m_lim; m += step) look(m);
                    }
                }
                return acc;
            };
            int chunk = (n_lim + T) / T;
            for (int t = 0; t < T; ++t) {
                int a = t * chunk, b = std::min(n_lim + 1, (t + 1) * chunk);
                if (a >= b) break;
                futs.push_back(std::async(std::launch::async, run, a, b));
            }
        } else {
            // prefix sums of f over the full window range
            long long top = m_lim + n_lim + 2;
            S.assign(static_cast<size_t>(top) + 1, 0.0);
            for (long long t = 1; t <= top; ++t) S[t] = S[t - 1] + f(int(t));
            auto run = [&](int z0, int z1) {
                ScanAcc acc;
                for (int z = z0; z < z1; ++z) {
                    for (int n = 0; n + z <= n_lim; ++n) {
                        double fp1 = fp_ext(n + z + 1);
                        double fp0 = n > 0 ? fp_ext(n + z) : 0.0;
                        double rhs = S[n + z] - S[z];
                        double cn = n * fp0 - rhs;
                        if (exhaustive) {
                            for (long long m = 0; m <= m_lim; ++m) {
                                double lt = lam * (S[m + z] - S[z]);
                                double sl = lt - m * fp1 + cn;
                                double sc = 1.0 + std::fabs(lt) + std::fabs(m * fp1) +
                                            std::fabs(n * fp0) + std::fabs(rhs);
                                acc.consider(sl / sc, n, z, m);
                            }
                        } else {
                            long long lo = 1, hi = m_lim;
                            while (lo < hi) {
                                long long mid = (lo + hi + 1) / 2;
                                if (lam * (S[mid + z] - S[mid - 1 + z]) <= fp1) lo = mid;
                                else hi = mid - 1;
                            }
                            auto look = [&](long long m) {
                                if (m < 0 || m > m_lim) return;
                                double lt = lam * (S[m + z] - S[z]);
                                double sl = lt - m * fp1 + cn;
                                double sc = 1.0 + std::fabs(lt) + std::fabs(m * fp1) +
                                            std::fabs(n * fp0) + std::fabs(rhs);
                                acc.consider(sl / sc, n, z, m);
                            };
                            for (long long m = lo - 2; m <= lo + 2; ++m) look(m);
                            look(0);
                            look(1);
                            look(m_lim);
                            long long step = std::max<long long>(1, m_lim / 64);
                            for (long long m = 0; m <= m_lim; m += step) look(m);
                        }
                    }
                }
                return acc;
            };
            int chunk = (n_lim + T) / T;
            for (int t = 0; t < T; ++t) {
                int a = t * chunk, b = std::min(n_lim + 1, (t + 1) * chunk);
                if (a >= b) break;
                futs.push_back(std::async(std::launch::async, run, a, b));
            }
        }

        for (auto& fu : futs) {
            ScanAcc acc = fu.get();
            if (acc.worst < out.worst_slack) {
                out.worst_slack = acc.worst;
                out.resource = static_cast<int>(r);
                out.n = acc.n;
                out.z = acc.z;
                out.m = static_cast<int>(acc.m);
            }
        }
    }
    out.valid = out.worst_slack >= -1e-8;
    return out;
}

int verify_tail_lemma(int degree, double lambda_d, Objective family) {
    if (degree < 1 || degree > 5) throw std::invalid_argument("degree out of range");
    if (!(lambda_d > 1.0)) throw std::invalid_argument("lambda must exceed 1");
    int d = degree;
    int last_fail = 0;
    const int bound = 1000000;
    if (family == Objective::Potential) {
        double nu = std::pow(lambda_d, 1.0 / (d + 1));
        for (int x = 1; x <= bound; ++x) {
            double denom = powi(double(x), d + 1) - powi(double(x + 1), d) + powi(double(x), d);
            bool holds = denom > 0.0 && powi(double(x + 1), d + 1) / denom <= nu;
            if (!holds) last_fail = x;
        }
    } else {
        double rhs = std::pow((d + 1) * lambda_d, 1.0 / (d + 1)) - 1.0;
        for (int n = 1; n <= bound; ++n) {
            double lhs = powi(double(n + 1) / double(n), d + 1) * (1.0 - 1.0 / (d + 1));
            if (!(lhs <= rhs)) last_fail = n;
        }
    }
    if (last_fail >= bound) throw std::runtime_error("tail inequality never settles");
    return last_fail + 1;
}

ModifiedCostTable materialize_modified(const CongestionGame& g,
                                       const std::vector<SmoothnessCertificate>& certs) {
    if (certs.empty()) throw std::invalid_argument("no certificates supplied");
    int N = g.num_players();
    ModifiedCostTable out;

    bool game_cert = certs[0].degree < 0;
    if (game_cert) {
        if (certs.size() != 1) throw std::invalid_argument("expected a single game certificate");
        const auto& c = certs[0];
        if (static_cast<int>(c.fprime.size()) != g.num_resources())
            throw std::invalid_argument("certificate table count does not match the game");
        for (const auto& t : c.fprime) {
            if (static_cast<int>(t.size()) < N)
                throw std::invalid_argument("certificate table shorter than the player count");
            out.fprime.push_back(std::vector<double>(t.begin(), t.begin() + N));
        }
        return out;
    }

    std::map<int, const SmoothnessCertificate*> by_degree;
    for (const auto& c : certs) {
        if (c.degree < 0) throw std::invalid_argument("cannot mix game and monomial certificates");
        by_degree[c.degree] = &c;
    }
    auto monomial_fp = [&](int d, int x) -> double {
        if (d == 0) return 1.0;  // constants stay unmodified
        auto it = by_degree.find(d);
        if (it == by_degree.end())
            throw std::invalid_argument("no certificate for a degree used by the game");
        const auto& c = *it->second;
        if (x <= static_cast<int>(c.fprime[0].size())) return c.fprime[0][x - 1];
        return c.nu * powi(double(x), d);  // tail extension
    };
    for (const auto& f : g.resources) {
        if (!f.is_polynomial_kind())
            throw std::invalid_argument("monomial certificates apply to polynomial costs only");
        std::vector<double> t(static_cast<size_t>(N), 0.0);
        for (int x = 1; x <= N; ++x) {
            double acc = 0.0;
            if (f.kind == CostFunction::Kind::Monomial) {
                acc = monomial_fp(f.degree, x);
            } else {
                for (size_t i = 0; i < f.coeffs.size(); ++i)
                    if (f.coeffs[i] != 0.0) acc += f.coeffs[i] * monomial_fp(int(i), x);
            }
            t[static_cast<size_t>(x) - 1] = acc;
        }
        out.fprime.push_back(std::move(t));
    }
    return out;
}

}  // namespace congestion
