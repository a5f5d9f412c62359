#include "congestion/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace congestion {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::NumericalFailure: return "numerical_failure";
        case LpStatus::RoundLimit: return "round_limit";
    }
    return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRcTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;

struct Canonical {
    // scaled rows with rhs >= 0; sign[i] = -1 if the input row was negated,
    // scale[i] the divisor applied to it
    std::vector<LinearProgram::Row> rows;
    std::vector<double> scale;
    std::vector<double> sign;
    std::vector<double> shift;     // per-variable lower bound
    double obj_shift = 0.0;
};

Canonical canonicalize(const LinearProgram& lp) {
    Canonical c;
    c.shift.assign(lp.num_vars, 0.0);
    if (!lp.lower.empty()) {
        if (static_cast<int>(lp.lower.size()) != lp.num_vars)
            throw std::invalid_argument("lower bound vector size mismatch");
        c.shift = lp.lower;
    }
    for (int j = 0; j < lp.num_vars; ++j) c.obj_shift += lp.objective[j] * c.shift[j];

    c.rows.reserve(lp.rows.size());
    for (const auto& r : lp.rows) {
        double rhs = r.rhs;
        double mx = 0.0;
        for (auto [j, a] : r.terms) {
            if (!std::isfinite(a)) throw std::invalid_argument("non-finite coefficient");
            rhs -= a * c.shift[j];
            mx = std::max(mx, std::fabs(a));
        }
        if (mx == 0.0) {
            // empty row: keep it only to fail fast on inconsistency
            bool ok = r.rel == 'G' ? rhs <= 1e-12 : (r.rel == 'L' ? rhs >= -1e-12 : std::fabs(rhs) <= 1e-12);
            if (!ok) {
                // represent as an unsatisfiable marker row 0 >= 1
                c.rows.push_back(LinearProgram::Row{{}, 'G', 1.0, r.tag});
                c.scale.push_back(1.0);
                c.sign.push_back(1.0);
            }
            continue;
        }
        LinearProgram::Row s = r;
        s.rhs = rhs;
        double sg = 1.0;
        for (auto& [j, a] : s.terms) a /= mx;
        s.rhs /= mx;
        if (s.rhs < 0.0) {
            sg = -1.0;
            s.rhs = -s.rhs;
            for (auto& [j, a] : s.terms) a = -a;
            if (s.rel == 'G') s.rel = 'L';
            else if (s.rel == 'L') s.rel = 'G';
        }
        c.rows.push_back(std::move(s));
        c.scale.push_back(mx);
        c.sign.push_back(sg);
    }
    return c;
}

struct Simplex {
    int m = 0;                 // rows
    int nstruct = 0;           // structural variables
    std::vector<std::vector<std::pair<int, double>>> cols;
    std::vector<double> cost;      // phase-2 cost per column
    std::vector<char> artificial;  // barred from entering
    std::vector<double> b;
    std::vector<int> basis;
    std::vector<double> Binv;  // m*m row-major
    std::vector<double> xB;
    int iterations = 0;

    double& bi(int i, int k) { return Binv[static_cast<size_t>(i) * m + k]; }

    void build(const Canonical& c, const LinearProgram& lp) {
        m = static_cast<int>(c.rows.size());
        nstruct = lp.num_vars;
        cols.assign(nstruct, {});
        cost.assign(nstruct, 0.0);
        artificial.assign(nstruct, 0);
        for (int j = 0; j < nstruct; ++j) cost[j] = lp.objective[j];
        b.assign(m, 0.0);
        basis.assign(m, -1);
        for (int i = 0; i < m; ++i) {
            b[i] = c.rows[i].rhs;
            for (auto [j, a] : c.rows[i].terms) cols[j].push_back({i, a});
        }
        // slack / surplus / artificial columns; artificials start basic
        for (int i = 0; i < m; ++i) {
            char rel = c.rows[i].rel;
            if (rel == 'L') {
                cols.push_back({{i, 1.0}});
                cost.push_back(0.0);
                artificial.push_back(0);
                basis[i] = static_cast<int>(cols.size()) - 1;
            } else if (rel == 'G') {
                cols.push_back({{i, -1.0}});
                cost.push_back(0.0);
                artificial.push_back(0);
            }
        }
        for (int i = 0; i < m; ++i) {
            if (basis[i] >= 0) continue;
            cols.push_back({{i, 1.0}});
            cost.push_back(0.0);
            artificial.push_back(1);
            basis[i] = static_cast<int>(cols.size()) - 1;
        }
        Binv.assign(static_cast<size_t>(m) * m, 0.0);
        for (int i = 0; i < m; ++i) bi(i, i) = 1.0;
        xB = b;
    }

    std::vector<double> dual_y(const std::vector<double>& cvec) const {
        std::vector<double> y(m, 0.0);
        for (int i = 0; i < m; ++i) {
            double cb = cvec[basis[i]];
            if (cb == 0.0) continue;
            const double* row = &Binv[static_cast<size_t>(i) * m];
            for (int k = 0; k < m; ++k) y[k] += cb * row[k];
        }
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& y, const std::vector<double>& cvec) const {
        double rc = cvec[j];
        for (auto [i, a] : cols[j]) rc -= y[i] * a;
        return rc;
    }

    // returns final status of the phase: Optimal or Unbounded/NumericalFailure
    LpStatus run(const std::vector<double>& cvec, bool allow_artificial_entering, long iter_cap) {
        std::vector<char> in_basis(cols.size(), 0);
        for (int i = 0; i < m; ++i) in_basis[basis[i]] = 1;
        int degen_streak = 0;
        bool bland = false;
        double cmax = 1.0;
        for (double cj : cvec) cmax = std::max(cmax, std::fabs(cj));
        while (true) {
            if (++iterations > iter_cap) return LpStatus::NumericalFailure;
            std::vector<double> y = dual_y(cvec);
            int enter = -1;
            double best = -kRcTol * cmax;
            for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
                if (in_basis[j]) continue;
                if (artificial[j] && !allow_artificial_entering) continue;
                double rc = reduced_cost(j, y, cvec);
                if (bland) {
                    if (rc < -kRcTol * cmax) { enter = j; break; }
                } else if (rc < best) {
                    best = rc;
                    enter = j;
                }
            }
            if (enter < 0) return LpStatus::Optimal;
            // direction d = Binv * A_enter
            std::vector<double> d(m, 0.0);
            for (auto [i, a] : cols[enter])
                for (int k = 0; k < m; ++k) d[k] += bi(k, i) * a;
            int leave = -1;
            double theta = std::numeric_limits<double>::infinity();
            if (!allow_artificial_entering) {
                // a basic artificial must never move off zero; evict it first
                for (int i = 0; i < m; ++i) {
                    if (artificial[basis[i]] && std::fabs(d[i]) > kPivotTol && xB[i] <= 1e-9) {
                        leave = i;
                        theta = 0.0;
                        break;
                    }
                }
            }
            if (leave < 0) {
                for (int i = 0; i < m; ++i) {
                    if (d[i] > kPivotTol) {
                        double t = xB[i] / d[i];
                        if (t < theta - 1e-12 ||
                            (t < theta + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                            theta = t;
                            leave = i;
                        }
                    }
                }
            }
            if (leave < 0) return LpStatus::Unbounded;
            if (theta <= 1e-12) {
                if (++degen_streak > 64) bland = true;
            } else {
                degen_streak = 0;
                bland = false;
            }
            // pivot
            double dr = d[leave];
            double* rowr = &Binv[static_cast<size_t>(leave) * m];
            for (int k = 0; k < m; ++k) rowr[k] /= dr;
            for (int i = 0; i < m; ++i) {
                if (i == leave || d[i] == 0.0) continue;
                double* rowi = &Binv[static_cast<size_t>(i) * m];
                double f = d[i];
                for (int k = 0; k < m; ++k) rowi[k] -= f * rowr[k];
            }
            for (int i = 0; i < m; ++i) {
                if (i == leave) continue;
                xB[i] -= d[i] * theta;
                if (xB[i] < 0.0 && xB[i] > -1e-9) xB[i] = 0.0;
            }
            xB[leave] = theta;
            in_basis[basis[leave]] = 0;
            in_basis[enter] = 1;
            basis[leave] = enter;
        }
    }

    void refresh_xB() {
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            const double* row = &Binv[static_cast<size_t>(i) * m];
            for (int k = 0; k < m; ++k) acc += row[k] * b[k];
            xB[i] = acc < 0.0 && acc > -1e-9 ? 0.0 : acc;
        }
    }
};

}  // namespace

namespace {

// Direct revised simplex on the canonicalized rows. On Optimal fills
// x_hat (canonical variables) and y_canon (one dual per canonical row).
LpStatus solve_direct(const Canonical& c, const LinearProgram& lp, std::vector<double>& x_hat,
                      std::vector<double>& y_canon, int& iterations) {
    Simplex sx;
    sx.build(c, lp);
    long iter_cap = 20000 + 40L * (sx.m + static_cast<long>(sx.cols.size()));

    // phase 1: drive artificials to zero
    bool need_phase1 = false;
    std::vector<double> c1(sx.cols.size(), 0.0);
    for (size_t j = 0; j < sx.cols.size(); ++j)
        if (sx.artificial[j]) { c1[j] = 1.0; need_phase1 = true; }
    if (need_phase1) {
        LpStatus st = sx.run(c1, true, iter_cap);
        iterations = sx.iterations;
        if (st != LpStatus::Optimal) return LpStatus::NumericalFailure;
        double infeas = 0.0;
        for (int i = 0; i < sx.m; ++i)
            if (sx.artificial[sx.basis[i]]) infeas += sx.xB[i];
        if (infeas > kPhase1Tol) return LpStatus::Infeasible;
        sx.refresh_xB();
    }

    std::vector<double> c2(sx.cols.size(), 0.0);
    for (int j = 0; j < static_cast<int>(sx.cols.size()); ++j) c2[j] = sx.cost[j];
    LpStatus st = sx.run(c2, false, iter_cap);
    iterations = sx.iterations;
    if (st != LpStatus::Optimal)
        return st == LpStatus::Unbounded ? LpStatus::Unbounded : LpStatus::NumericalFailure;
    sx.refresh_xB();

    x_hat.assign(lp.num_vars, 0.0);
    for (int i = 0; i < sx.m; ++i)
        if (sx.basis[i] < sx.nstruct) x_hat[sx.basis[i]] = sx.xB[i];
    y_canon = sx.dual_y(c2);
    return LpStatus::Optimal;
}

// Tall problems (rows >> variables) are solved through their dual, whose
// basis has only num_vars rows. The dual's duals recover the primal point.
LpStatus solve_via_dual(const Canonical& c, const LinearProgram& lp, std::vector<double>& x_hat,
                        std::vector<double>& y_canon, int& iterations, int& rounds) {
    int m = static_cast<int>(c.rows.size());
    LinearProgram dual;
    // dual variable layout: per canonical row, one var ('G' -> u >= 0 with
    // column +a, 'L' -> t >= 0 with column -a, 'E' -> pair w+, w-)
    std::vector<int> var_of(m), var2_of(m, -1);
    int nv = 0;
    for (int i = 0; i < m; ++i) {
        var_of[i] = nv++;
        if (c.rows[i].rel == 'E') var2_of[i] = nv++;
    }
    dual.num_vars = nv;
    dual.objective.assign(nv, 0.0);
    std::vector<std::vector<std::pair<int, double>>> dual_rows(lp.num_vars);
    for (int i = 0; i < m; ++i) {
        const auto& r = c.rows[i];
        double s = r.rel == 'L' ? -1.0 : 1.0;
        dual.objective[var_of[i]] = -s * r.rhs;
        if (var2_of[i] >= 0) dual.objective[var2_of[i]] = r.rhs;
        for (auto [j, a] : r.terms) {
            dual_rows[j].push_back({var_of[i], s * a});
            if (var2_of[i] >= 0) dual_rows[j].push_back({var2_of[i], -a});
        }
    }
    for (int j = 0; j < lp.num_vars; ++j)
        dual.add_row(std::move(dual_rows[j]), 'L', lp.objective[j]);

    LpResult dres = lp_solve(dual);
    iterations = dres.iterations;
    rounds = 0;
    if (dres.status == LpStatus::Infeasible) return LpStatus::Unbounded;
    if (dres.status == LpStatus::Unbounded) return LpStatus::Infeasible;
    if (dres.status != LpStatus::Optimal) return dres.status;

    x_hat.assign(lp.num_vars, 0.0);
    for (int j = 0; j < lp.num_vars; ++j) {
        double v = -dres.duals[j];
        x_hat[j] = v > 0.0 ? v : 0.0;
    }
    y_canon.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double s = c.rows[i].rel == 'L' ? -1.0 : 1.0;
        y_canon[i] = s * dres.x[var_of[i]];
        if (var2_of[i] >= 0) y_canon[i] = dres.x[var_of[i]] - dres.x[var2_of[i]];
    }
    return LpStatus::Optimal;
}

}  // namespace

LpResult lp_solve(const LinearProgram& lp) {
    LpResult out;
    if (static_cast<int>(lp.objective.size()) != lp.num_vars)
        throw std::invalid_argument("objective size mismatch");
    Canonical c = canonicalize(lp);

    std::vector<double> x_hat, y_canon;
    bool tall = static_cast<long>(c.rows.size()) > std::max(2000L, 4L * lp.num_vars);
    LpStatus st;
    if (tall) {
        st = solve_via_dual(c, lp, x_hat, y_canon, out.iterations, out.rounds);
        if (st == LpStatus::NumericalFailure && c.rows.size() <= 6000)
            st = solve_direct(c, lp, x_hat, y_canon, out.iterations);
    } else {
        st = solve_direct(c, lp, x_hat, y_canon, out.iterations);
    }
    if (st != LpStatus::Optimal) {
        out.status = st;
        return out;
    }

    // map to input coordinates
    out.x = x_hat;
    for (int j = 0; j < lp.num_vars; ++j) out.x[j] += c.shift[j];
    out.objective = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) out.objective += lp.objective[j] * out.x[j];

    // duals in input row order and orientation
    const std::vector<double>& y = y_canon;
    out.duals.assign(lp.rows.size(), 0.0);
    {
        size_t ci = 0;
        for (size_t r = 0; r < lp.rows.size(); ++r) {
            // canonicalize() may drop trivially-satisfied empty rows
            bool kept = false;
            double mx = 0.0;
            for (auto [j, a] : lp.rows[r].terms) mx = std::max(mx, std::fabs(a));
            if (mx > 0.0) kept = true;
            else {
                double rhs = lp.rows[r].rhs;
                for (auto [j, a] : lp.rows[r].terms) rhs -= a * c.shift[j];
                char rel = lp.rows[r].rel;
                bool ok = rel == 'G' ? rhs <= 1e-12 : (rel == 'L' ? rhs >= -1e-12 : std::fabs(rhs) <= 1e-12);
                kept = !ok;
            }
            if (!kept) continue;
            out.duals[r] = y[ci] * c.sign[ci] / c.scale[ci];
            ++ci;
        }
    }

    // post-solve verification against the input rows
    double worst = 0.0;
    for (const auto& r : lp.rows) {
        double lhs = 0.0, mag = std::fabs(r.rhs);
        for (auto [j, a] : r.terms) {
            lhs += a * out.x[j];
            mag += std::fabs(a * out.x[j]);
        }
        double viol = 0.0;
        if (r.rel == 'G') viol = r.rhs - lhs;
        else if (r.rel == 'L') viol = lhs - r.rhs;
        else viol = std::fabs(lhs - r.rhs);
        worst = std::max(worst, viol / (1.0 + mag));
    }
    for (int j = 0; j < lp.num_vars; ++j) {
        double lb = c.shift[j];
        worst = std::max(worst, (lb - out.x[j]) / (1.0 + std::fabs(lb)));
    }
    out.max_violation = worst;
    out.status = worst <= 1e-8 ? LpStatus::Optimal : LpStatus::NumericalFailure;
    return out;
}

LpResult solve_lazy(const LinearProgram& core, const SeparationOracle& oracle,
                    const LazyOptions& opt) {
    LinearProgram pool = core;
    size_t ncore = core.rows.size();
    std::vector<int> added_round(pool.rows.size(), 0);
    std::vector<int> last_tight(pool.rows.size(), 0);
    LpResult res;
    for (int round = 1; round <= opt.max_rounds; ++round) {
        res = lp_solve(pool);
        res.rounds = round;
        if (res.status != LpStatus::Optimal) return res;
        auto cuts = oracle(res.x);
        if (cuts.empty()) return res;
        for (const auto& cut : cuts) {
            double lhs = 0.0, mag = std::fabs(cut.rhs);
            for (auto [j, a] : cut.terms) {
                lhs += a * res.x[j];
                mag += std::fabs(a * res.x[j]);
            }
            double viol = cut.rel == 'G' ? cut.rhs - lhs : lhs - cut.rhs;
            if (viol <= opt.violation_tol * (1.0 + mag))
                throw std::logic_error("separation oracle returned a satisfied constraint");
            pool.rows.push_back(cut);
            added_round.push_back(round);
            last_tight.push_back(round);
        }
        // mark tightness and drop stale slack cuts (never core rows)
        for (size_t r = ncore; r < pool.rows.size(); ++r) {
            const auto& row = pool.rows[r];
            double lhs = 0.0, mag = std::fabs(row.rhs);
            for (auto [j, a] : row.terms) {
                lhs += a * res.x[j];
                mag += std::fabs(a * res.x[j]);
            }
            double slack = row.rel == 'G' ? lhs - row.rhs : row.rhs - lhs;
            if (slack <= 1e-7 * (1.0 + mag)) last_tight[r] = round;
        }
        if (static_cast<int>(pool.rows.size()) > opt.max_pool) {
            LinearProgram next = pool;
            next.rows.assign(pool.rows.begin(), pool.rows.begin() + ncore);
            std::vector<int> ar, lt;
            ar.assign(added_round.begin(), added_round.begin() + ncore);
            lt.assign(last_tight.begin(), last_tight.begin() + ncore);
            for (size_t r = ncore; r < pool.rows.size(); ++r) {
                if (round - last_tight[r] <= 2 || round - added_round[r] <= 2) {
                    next.rows.push_back(pool.rows[r]);
                    ar.push_back(added_round[r]);
                    lt.push_back(last_tight[r]);
                }
            }
            pool = std::move(next);
            added_round = std::move(ar);
            last_tight = std::move(lt);
        }
    }
    res.status = LpStatus::RoundLimit;
    return res;
}

}  // namespace congestion
