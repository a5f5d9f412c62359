#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "congestion/lowerbound.hpp"
#include "congestion/smoothness.hpp"

using namespace congestion;

namespace {

DualSolution hand_dual(int degree, int N, std::vector<std::vector<double>> y) {
    DualSolution d;
    d.degree = degree;
    d.N = N;
    d.y = std::move(y);
    const int dp1 = degree + 1;
    d.objective = 0.0;
    for (int n = 0; n < static_cast<int>(d.y.size()); ++n)
        for (double v : d.y[n]) d.objective += std::pow(n, dp1) * v;
    return d;
}

}  // namespace

TEST_CASE("build_lpd at N = 1 matches the displayed program and solves to 1") {
    LinearProgram lp = build_lpd({0.0, 1.0}, 1);
    // variables y_00 y_01 y_10 y_11, one normalization row, one flow row
    CHECK(lp.num_vars == 4);
    REQUIRE(lp.rows.size() == 2);
    CHECK(lp.rows[0].rel == 'L');
    CHECK(lp.rows[0].rhs == 1.0);
    CHECK(lp.rows[1].rel == 'L');
    CHECK(lp.rows[1].rhs == 0.0);
    // y_10 is rewarded by the objective and only bounded by the flow row, so
    // the optimum is y_01 = y_10 = 1 with value 1, not 1/2
    LpResult r = lp_solve(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(-r.objective == doctest::Approx(1.0));
    CHECK(solve_lpd(1, 1).objective == doctest::Approx(1.0));
}

TEST_CASE("build_lpd rejects malformed h") {
    CHECK_THROWS_AS(build_lpd({0.0, 1.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_lpd({1.0, 2.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_lpd({0.0, 2.0, 1.0}, 2), std::invalid_argument);
}

TEST_CASE("LPD optimum at N = 60 for the first two degrees") {
    CHECK(solve_lpd(1, 60).objective == doctest::Approx(2.012066948).epsilon(1e-6));
    CHECK(solve_lpd(2, 60).objective == doctest::Approx(5.100974229).epsilon(1e-6));
}

TEST_CASE("strong duality against the primal box program") {
    for (int d : {1, 2}) {
        for (int N : {10, 60}) {
            DualityCheck dc = lp_duality_check(d, N);
            INFO("degree ", d, " N ", N, " primal ", dc.primal, " dual ", dc.dual);
            CHECK(dc.ok);
            CHECK(dc.primal == doctest::Approx(dc.dual).epsilon(1e-7));
        }
    }
}

TEST_CASE("lpd_value agrees across the direct and bisection paths") {
    CHECK(lpd_value(1, 60) == doctest::Approx(solve_lpd(1, 60).objective).epsilon(1e-9));
    // N = 100 exceeds the direct-solve range; the chain bisection continues
    // the same monotone sequence
    double v100 = lpd_value(1, 100);
    CHECK(v100 == doctest::Approx(2.012066948).epsilon(1e-6));
    CHECK(v100 >= lpd_value(1, 60) - 1e-9);
    CHECK(lpd_value(2, 100) == doctest::Approx(5.100974229).epsilon(1e-5));
}

TEST_CASE("ladder dual for degree 1 is the nine-row tight ladder") {
    DualSolution lad = ladder_dual(1);
    REQUIRE(lad.N == 8);
    const int expect_m[9] = {1, 1, 1, 1, 2, 2, 2, 2, 3};
    const long long expect_a[9] = {2520, 2520, 1260, 420, 105, 42, 14, 4, 1};
    for (int n = 0; n <= 8; ++n) {
        for (int m = 0; m < static_cast<int>(lad.y[n].size()); ++m) {
            if (m == expect_m[n])
                CHECK(lad.y[n][m] == doctest::Approx(expect_a[n] / 7389.0).epsilon(1e-12));
            else
                CHECK(lad.y[n][m] == 0.0);
        }
    }
    CHECK(lad.objective == doctest::Approx(14834.0 / 7389.0).epsilon(1e-12));
    // normalization is exactly tight
    double norm = 0.0;
    for (int n = 0; n <= 8; ++n) norm += expect_m[n] * expect_m[n] * lad.y[n][expect_m[n]];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degree 1 instance: exact counts, equilibrium, and gap") {
    SchedulingInstance inst = construct_instance(ladder_dual(1), 1e-9);
    CHECK(inst.M == 7389);
    CHECK(inst.total_machines == 6886);
    CHECK(inst.total_players == 7050);
    const long long expect_a[9] = {2520, 2520, 1260, 420, 105, 42, 14, 4, 1};
    REQUIRE(inst.pools.size() == 9);
    for (int i = 0; i < 9; ++i) {
        CHECK(inst.pools[i][0] == i);
        CHECK(inst.pools[i][2] == expect_a[i]);
    }
    CHECK(inst.dual_objective == doctest::Approx(14834.0 / 7389.0).epsilon(1e-12));

    GapReport rep = verify_gap(inst);
    CHECK(rep.eq_is_pne);
    CHECK(rep.structural_ok);
    CHECK_FALSE(rep.degenerate);
    // top-row slots have no group above them, so the realized optimum load
    // sum is 7380 rather than M
    CHECK(rep.ratio == doctest::Approx(14834.0 / 7380.0).epsilon(1e-12));
    CHECK(rep.ratio >= 2.012 - 0.03);
}

TEST_CASE("degree 2 instance clears five") {
    SchedulingInstance inst = construct_instance(ladder_dual(2), 1e-9);
    CHECK(inst.M == 8067);
    CHECK(inst.total_machines == 6886);
    CHECK(inst.total_players == 7050);
    GapReport rep = verify_gap(inst);
    CHECK(rep.eq_is_pne);
    CHECK(rep.structural_ok);
    CHECK(rep.ratio == doctest::Approx(40818.0 / 8040.0).epsilon(1e-12));
    CHECK(rep.ratio >= 5.0);
}

TEST_CASE("hand-built two-pool dual snaps to the unit instance") {
    // y_01 = y_10 = 1 is the N = 1 optimum; the m = 0 pool has no slots
    auto d = hand_dual(1, 1, {{0.0, 1.0}, {1.0, 0.0}});
    SchedulingInstance inst = construct_instance(d, 1e-9);
    CHECK(inst.M == 1);
    REQUIRE(inst.pools.size() == 2);
    CHECK(inst.total_machines == 2);
    CHECK(inst.total_players == 1);
    GapReport rep = verify_gap(inst);
    CHECK(rep.eq_is_pne);
    CHECK(rep.structural_ok);
    CHECK(rep.ratio == doctest::Approx(1.0));
}

TEST_CASE("rounding absorbs slack into epsilon and the lcm stays small") {
    // 0.4 and 0.45 violate the flow row as given; rounding keeps 2/5 and
    // 9/20, and the repair pass removes one upper machine
    auto d = hand_dual(1, 1, {{0.0, 0.4}, {0.0, 0.45}});
    SchedulingInstance inst = construct_instance(d, 1e-9);
    CHECK(inst.M == 20);
    REQUIRE(inst.pools.size() == 2);
    CHECK(inst.pools[0][2] == 8);
    CHECK(inst.pools[1][2] == 8);
    GapReport rep = verify_gap(inst);
    CHECK(rep.eq_is_pne);
    CHECK(rep.structural_ok);
    CHECK(rep.ratio == doctest::Approx(1.0));
}

TEST_CASE("coarse epsilon picks a simpler fraction") {
    auto d = hand_dual(1, 1, {{0.0, 0.499}, {0.0, 0.499}});
    // lambda clamps to 1, so the window is [0.4491, 0.499] and the simplest
    // admissible value is 5/11
    SchedulingInstance inst = construct_instance(d, 0.1);
    CHECK(inst.M == 11);
    REQUIRE(inst.pools.size() == 2);
    CHECK(inst.pools[0][2] == 5);
    CHECK(inst.pools[1][2] == 5);
}

TEST_CASE("construction failure modes") {
    auto d = hand_dual(1, 1, {{0.0, 0.123456789}, {0.0, 0.1}});
    CHECK_THROWS_AS(construct_instance(d, 1e-12), std::runtime_error);
    CHECK_THROWS_AS(construct_instance(d, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(construct_instance(d, -1.0), std::invalid_argument);

    auto zero = hand_dual(1, 1, {{0.0, 0.0}, {0.0, 0.0}});
    SchedulingInstance inst = construct_instance(zero, 0.5);
    CHECK(verify_gap(inst).degenerate);
}
