#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace congestion {

// Minimization LP over x with per-variable lower bounds (default 0) and
// sparse rows. Senses: 'L' (<=), 'G' (>=), 'E' (=).
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> objective;
    struct Row {
        std::vector<std::pair<int, double>> terms;
        char rel = 'G';
        double rhs = 0.0;
        long long tag = -1;  // caller bookkeeping (cut identity)
    };
    std::vector<Row> rows;
    std::vector<double> lower;  // empty means all zeros

    void add_row(std::vector<std::pair<int, double>> terms, char rel, double rhs,
                 long long tag = -1) {
        rows.push_back(Row{std::move(terms), rel, rhs, tag});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure, RoundLimit };

const char* to_string(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> x;
    // One dual per row of the solved program, for the rows as written:
    // y >= 0 on 'G' rows, y <= 0 on 'L' rows, free on 'E' rows.
    std::vector<double> duals;
    int iterations = 0;
    int rounds = 0;
    double max_violation = 0.0;  // post-solve feasibility recheck
};

// Revised simplex, two-phase, Dantzig pricing with a Bland fallback. Every
// row is scale-normalized internally; the result is re-verified against the
// input rows before reporting Optimal.
LpResult lp_solve(const LinearProgram& lp);

// Separation callback: given a candidate x, return the most violated
// constraint first (optionally more violated rows after it), or an empty
// vector when x is feasible for the whole family. Every returned row must be
// violated by more than the feasibility tolerance at x.
using SeparationOracle =
    std::function<std::vector<LinearProgram::Row>(const std::vector<double>& x)>;

struct LazyOptions {
    int max_rounds = 400;
    int max_pool = 20000;
    double violation_tol = 1e-8;
};

// Kelley-style cutting-plane loop: solve the pool, ask the oracle, add cuts,
// repeat until the oracle is silent. Non-binding stale cuts are dropped
// between rounds (never ones added recently).
LpResult solve_lazy(const LinearProgram& core, const SeparationOracle& oracle,
                    const LazyOptions& opt = {});

}  // namespace congestion
