#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "congestion/lp.hpp"

using namespace congestion;

TEST_CASE("min x subject to x >= 3") {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.add_row({{0, 1.0}}, 'G', 3.0);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(res.x[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("min x+y subject to x+y >= 1, x-y >= 0") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'G', 1.0);
    lp.add_row({{0, 1.0}, {1, -1.0}}, 'G', 0.0);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("upper bounds and equality rows") {
    // min -x - 2y s.t. x + y <= 4, x - y = 1  ->  x = 2.5, y = 1.5
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {-1.0, -2.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'L', 4.0);
    lp.add_row({{0, 1.0}, {1, -1.0}}, 'E', 1.0);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.x[0] == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(res.x[1] == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(res.objective == doctest::Approx(-5.5).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded are reported as such") {
    LinearProgram bad;
    bad.num_vars = 1;
    bad.objective = {1.0};
    bad.add_row({{0, 1.0}}, 'G', 3.0);
    bad.add_row({{0, 1.0}}, 'L', 2.0);
    CHECK(lp_solve(bad).status == LpStatus::Infeasible);

    LinearProgram unb;
    unb.num_vars = 1;
    unb.objective = {-1.0};
    unb.add_row({{0, 1.0}}, 'G', 0.0);
    CHECK(lp_solve(unb).status == LpStatus::Unbounded);
}

TEST_CASE("nonzero lower bounds shift the feasible box") {
    // min x + y with x >= 2, y >= -1, x + y >= 0
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.lower = {2.0, -1.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'G', 0.0);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.x[0] == doctest::Approx(2.0));
    CHECK(res.x[1] == doctest::Approx(-1.0));
    CHECK(res.objective == doctest::Approx(1.0));
}

// LP_SC rows for f(x)=x with f' pinned at 1.5x: the single variable is
// lambda and the binding row gives 2.5.
TEST_CASE("social-cost family with pinned modified costs gives 2.5") {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    int N = 200;
    for (int n = 0; n <= N; ++n) {
        for (int m = 1; m <= N; ++m) {
            // lambda*m^2 >= m*1.5*(n+1) - n*1.5*n + n^2
            double rhs = m * 1.5 * (n + 1) - 1.5 * n * n + double(n) * n;
            lp.add_row({{0, double(m) * m}}, 'G', rhs);
        }
    }
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("duals satisfy strong duality and sign conventions") {
    // min 3x + 2y s.t. x + y >= 2, x <= 3, x - y = 0.5
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {3.0, 2.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'G', 2.0);
    lp.add_row({{0, 1.0}}, 'L', 3.0);
    lp.add_row({{0, 1.0}, {1, -1.0}}, 'E', 0.5);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    REQUIRE(res.duals.size() == 3);
    CHECK(res.duals[0] >= -1e-9);
    CHECK(res.duals[1] <= 1e-9);
    double by = res.duals[0] * 2.0 + res.duals[1] * 3.0 + res.duals[2] * 0.5;
    CHECK(by == doctest::Approx(res.objective).epsilon(1e-8));
}

TEST_CASE("random dense LPs: duality and feasibility re-verify") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> coef(-2.0, 3.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    int optimal_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + int(rng() % 5), m = 1 + int(rng() % 7);
        LinearProgram lp;
        lp.num_vars = n;
        lp.objective.resize(n);
        for (auto& c : lp.objective) c = pos(rng);
        for (int i = 0; i < m; ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, coef(rng)});
            lp.add_row(std::move(terms), rng() % 2 ? 'G' : 'L', coef(rng));
        }
        auto res = lp_solve(lp);
        if (res.status != LpStatus::Optimal) continue;
        ++optimal_seen;
        CHECK(res.max_violation <= 1e-8);
        double by = 0.0;
        for (size_t i = 0; i < lp.rows.size(); ++i) by += res.duals[i] * lp.rows[i].rhs;
        CHECK(by == doctest::Approx(res.objective).epsilon(1e-6));
    }
    CHECK(optimal_seen > 10);
}

TEST_CASE("lazy solve with a silent oracle equals the direct solve") {
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'G', 1.0);
    auto res = solve_lazy(lp, [](const std::vector<double>&) {
        return std::vector<LinearProgram::Row>{};
    });
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(1.0));
    CHECK(res.rounds == 1);
}

TEST_CASE("lazy solve over the dominated family lambda >= 1/k") {
    LinearProgram core;
    core.num_vars = 1;
    core.objective = {1.0};
    core.add_row({{0, 1.0}}, 'G', 0.0);
    int next_k = 10;
    auto oracle = [&next_k](const std::vector<double>& x) {
        std::vector<LinearProgram::Row> out;
        for (int k = next_k; k >= 1; --k) {
            if (x[0] < 1.0 / k - 1e-9) {
                out.push_back({{{0, 1.0}}, 'G', 1.0 / k, k});
                next_k = k - 1;
                break;
            }
        }
        return out;
    };
    auto res = solve_lazy(core, oracle);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lazy matches eager on a random cut family") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(0.1, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + int(rng() % 3);
        std::vector<LinearProgram::Row> family;
        for (int i = 0; i < 40; ++i) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, coef(rng)});
            family.push_back({terms, 'G', coef(rng), i});
        }
        LinearProgram eager;
        eager.num_vars = n;
        eager.objective.assign(n, 1.0);
        eager.rows = family;
        auto direct = lp_solve(eager);
        REQUIRE(direct.status == LpStatus::Optimal);

        LinearProgram core;
        core.num_vars = n;
        core.objective.assign(n, 1.0);
        auto oracle = [&family](const std::vector<double>& x) {
            std::vector<LinearProgram::Row> out;
            double worst = -1e-8;
            const LinearProgram::Row* pick = nullptr;
            for (const auto& r : family) {
                double lhs = 0.0, mag = std::fabs(r.rhs);
                for (auto [j, a] : r.terms) {
                    lhs += a * x[j];
                    mag += std::fabs(a * x[j]);
                }
                double viol = (r.rhs - lhs) / (1.0 + mag);
                if (viol > worst + 1e-15) {
                    worst = viol;
                    pick = &r;
                }
            }
            std::vector<LinearProgram::Row> res;
            if (pick && worst > 1e-8) res.push_back(*pick);
            return res;
        };
        auto lazy = solve_lazy(core, oracle);
        REQUIRE(lazy.status == LpStatus::Optimal);
        CHECK(lazy.objective == doctest::Approx(direct.objective).epsilon(1e-6));
    }
}

TEST_CASE("tall LPs with mixed senses solve through the dual") {
    // min 2x + 3y, x + y = 5, x <= 4, plus thousands of dominated rows
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {2.0, 3.0};
    lp.add_row({{0, 1.0}, {1, 1.0}}, 'E', 5.0);
    lp.add_row({{0, 1.0}}, 'L', 4.0);
    for (int k = 0; k < 4000; ++k)
        lp.add_row({{0, 1.0}, {1, 1.0}}, 'G', 1.0 + (k % 7) * 0.1);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.x[0] == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(res.x[1] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.objective == doctest::Approx(11.0).epsilon(1e-8));
    double by = res.duals[0] * 5.0 + res.duals[1] * 4.0;
    for (size_t r = 2; r < lp.rows.size(); ++r) by += res.duals[r] * lp.rows[r].rhs;
    CHECK(by == doctest::Approx(11.0).epsilon(1e-6));
}

TEST_CASE("badly scaled rows still solve after internal normalization") {
    // min x + y with a 1e12-scaled copy of x + y >= 1 and a tiny row
    LinearProgram lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.add_row({{0, 1e12}, {1, 1e12}}, 'G', 1e12);
    lp.add_row({{0, 1e-7}}, 'L', 5e-7);
    auto res = lp_solve(lp);
    REQUIRE(res.status == LpStatus::Optimal);
    CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(res.x[0] <= 5.0 + 1e-6);
}
