#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/lp.hpp"

namespace congestion {

// Dual matrix y_{n,m}, n,m in [0,N], for LPD_h with h(n) = n^{d+1}.
struct DualSolution {
    int N = 0;
    int degree = 1;
    std::vector<std::vector<double>> y;  // y[n][m]
    double objective = 0.0;              // sum h(n) y_{n,m}
};

// The maximization LP exactly as displayed: objective sum h(n) y_{n,m},
// normalization sum h(m) y_{n,m} <= 1, flow rows
// t * sum_m y_{t,m} <= sum_m m*y_{t-1,m} for t in [1,N] (t=0 is vacuous).
// Variables are y flattened as n*(N+1)+m. h is passed as h(0..N).
LinearProgram build_lpd(const std::vector<double>& h, int N);

// Direct simplex solve of build_lpd; practical for N up to ~80.
DualSolution solve_lpd(int degree, int N);

// LPD optimum value. Uses the direct solve for small N and the
// box-program bisection (provably equal by strong duality, cross-checked
// in tests against solve_lpd) for large N.
double lpd_value(int degree, int N);

struct DualityCheck {
    double primal = 0.0;  // LP_SC optimum (min lambda, full box family)
    double dual = 0.0;    // LPD optimum
    bool ok = false;
};
DualityCheck lp_duality_check(int degree, int N, double rel_tol = 1e-5);

// Tight ladder dual: one pool per row n with slot count m_n, flows exactly
// tight (y_{n+1} = m_n y_n / (n+1)), rows kept while every reduced
// denominator stays within denom_cap. This is the production dual fed to
// construct_instance for the Table 2 lower-bound instances.
DualSolution ladder_dual(int degree, long long denom_cap = 10000);

struct SchedulingInstance {
    int degree = 1;
    long long M = 1;  // scaling factor (lcm of denominators)
    double epsilon = 0.0;
    // pool (n,m) -> machine count y_{n,m}*M; machines are laid out in this
    // pool order as game resources
    std::vector<std::array<long long, 3>> pools;  // {n, m, machines}
    long long total_machines = 0;
    long long total_players = 0;
    CongestionGame game;  // each player: strategy 0 = equilibrium machine, 1 = optimal machine
    StrategyProfile equilibrium;
    StrategyProfile optimum;
    double dual_objective = 0.0;  // of the rounded dual
};

// Lemma construction: prune support below 1e-9, round every y_{n,m} down to
// a rational with denominator <= denom_cap inside [(1-eps/lambda)y, y]
// (continued fractions), M = lcm of denominators, pools and groups
// instantiated with greedy round-robin assignment.
// Throws when a denominator or the lcm exceeds the cap (suggesting a larger
// epsilon), or when an assignment invariant fails.
SchedulingInstance construct_instance(const DualSolution& dual, double epsilon,
                                      long long denom_cap = 10000);

struct GapReport {
    bool eq_is_pne = false;     // structural: deviation target load+1 >= current load
    bool structural_ok = false; // pool/group count invariants
    bool degenerate = false;    // empty instance
    double ratio = 0.0;         // sum h(n_e(s*)) / sum h(n_e(s))
};
GapReport verify_gap(const SchedulingInstance& inst);

}  // namespace congestion
