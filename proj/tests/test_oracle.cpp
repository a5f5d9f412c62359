#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "congestion/lowerbound.hpp"
#include "congestion/oracle.hpp"
#include "congestion/smoothness.hpp"

using namespace congestion;

namespace {

CongestionGame singleton_game(int players, std::vector<CostFunction> fs) {
    CongestionGame g;
    g.resources = std::move(fs);
    g.players.resize(players);
    for (auto& strategies : g.players) {
        strategies.clear();
        for (int e = 0; e < static_cast<int>(g.resources.size()); ++e)
            strategies.push_back({e});
    }
    return g;
}

bool is_split(const StrategyProfile& s) { return s.choices[0] != s.choices[1]; }

}  // namespace

TEST_CASE("identical linear two-player game has exactly the two splits at alpha 1") {
    auto g = singleton_game(2, {CostFunction::monomial(1), CostFunction::monomial(1)});
    auto eqs = enumerate_equilibria(g, 1.0);
    REQUIRE(eqs.size() == 2);
    CHECK(is_split(eqs[0]));
    CHECK(is_split(eqs[1]));
    // definitional agreement on every profile, both included and excluded
    StrategyProfile s;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            s = make_profile(g, {a, b});
            bool holds = verify_alpha_equilibrium(g, s, 1.0).holds;
            CHECK(holds == (a != b));
        }
    }
}

TEST_CASE("vacuous and constant-cost enumerations return every profile") {
    auto g = singleton_game(2, {CostFunction::monomial(1), CostFunction::monomial(1)});
    CHECK(enumerate_equilibria(g, 100.0).size() == 4);
    auto c = singleton_game(3, {CostFunction::constant(2.0), CostFunction::constant(2.0)});
    CHECK(enumerate_equilibria(c, 1.0).size() == 8);
}

TEST_CASE("enumeration refuses oversized profile spaces") {
    std::vector<CostFunction> fs(8, CostFunction::monomial(1));
    auto g = singleton_game(9, fs);  // 8^9 profiles
    CHECK_THROWS_AS(enumerate_equilibria(g, 1.0), std::runtime_error);
    CHECK_THROWS_AS(exact_stretch(g, 1.0, nullptr, nullptr), std::runtime_error);
    CHECK_THROWS_AS(exact_poa(g), std::runtime_error);
}

TEST_CASE("stretch is 1 on flat and on split-optimal games") {
    auto c = singleton_game(3, {CostFunction::constant(1.0), CostFunction::constant(1.0)});
    CHECK(exact_stretch(c, 1.0, nullptr, nullptr) == doctest::Approx(1.0));
    auto g = singleton_game(2, {CostFunction::monomial(1), CostFunction::monomial(1)});
    CHECK(exact_stretch(g, 1.0, nullptr, nullptr) == doctest::Approx(1.0));
    // below alpha = 1/2 even the splits stop qualifying
    CHECK(exact_stretch(g, 0.4, nullptr, nullptr) == 0.0);
}

TEST_CASE("q-equilibria under the modified costs stay within theta of the minimizer") {
    SmoothnessCertificate cert = solve_phi_monomial(1, 40);
    const double q = 1.2;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto g = random_singleton_game(3, 3, 1, seed);
        ModifiedCostTable mod = materialize_modified(g, {cert});
        double lam = cert.lambda;
        double theta = lam / (1.0 + g.num_players() * lam * (1.0 - q) / q);
        REQUIRE(theta > 0.0);
        double st = exact_stretch(g, q, &mod, &mod);
        INFO("seed ", seed, " stretch ", st, " theta ", theta);
        CHECK(st <= theta + 1e-9);
        CHECK(st >= 1.0 - 1e-12);
    }
}

TEST_CASE("price of anarchy by hand: pinned player makes the shared link sticky") {
    CongestionGame g;
    g.resources = {CostFunction::monomial(1), CostFunction::polynomial({0.0, 2.1})};
    g.players = {{{0}, {1}}, {{0}}};
    // only equilibrium: both on the shared link (2 + 2 = 4); optimum splits
    // (2.1 + 1 = 3.1)
    CHECK(exact_poa(g) == doctest::Approx(4.0 / 3.1));
    auto c = singleton_game(2, {CostFunction::constant(3.0), CostFunction::constant(3.0)});
    CHECK(exact_poa(c) == doctest::Approx(1.0));
}

TEST_CASE("truncated ladder instance keeps a gap above 1.8 under exact enumeration") {
    // four-row tight ladder (m = 1 throughout): y = (3/8, 3/8, 3/16, 1/16),
    // M = 16, machine counts 6, 6, 3, 1, fifteen players
    DualSolution d;
    d.degree = 1;
    d.N = 3;
    d.y = {{0.0, 3.0 / 8}, {0.0, 3.0 / 8}, {0.0, 3.0 / 16}, {0.0, 1.0 / 16}};
    d.objective = 1.0 * 3 / 8 + 4.0 * 3 / 16 + 9.0 / 16;
    SchedulingInstance inst = construct_instance(d, 1e-9, 100);
    CHECK(inst.M == 16);
    CHECK(inst.total_players == 15);
    GapReport rep = verify_gap(inst);
    CHECK(rep.eq_is_pne);
    CHECK(rep.ratio == doctest::Approx(27.0 / 15.0));
    // the designated optimum is the global one, so the exact PoA is at
    // least the designated-equilibrium ratio
    double poa = exact_poa(inst.game);
    CHECK(poa >= 27.0 / 15.0 - 1e-9);
}

TEST_CASE("grid search brackets the LP optimum for both families") {
    for (int d : {1, 2}) {
        CostFunction f = CostFunction::monomial(d);
        double fmax = f(3);
        for (Objective fam : {Objective::Potential, Objective::SocialCost}) {
            double lp = solve_lambda_table(f, 2, fam).lambda;
            for (int g : {60, 120}) {
                double bf = bruteforce_lambda(f, 2, fam, g);
                INFO("degree ", d, " steps ", g, " lp ", lp, " bf ", bf);
                CHECK(bf >= lp - 1e-9);
                CHECK(bf - lp <= 4.0 * fmax / g + 1e-9);
            }
        }
    }
    // N = 2 optima land exactly on the 120-step lattice
    CHECK(bruteforce_lambda(CostFunction::monomial(1), 2, Objective::Potential, 120) ==
          doctest::Approx(1.5));
    CHECK(bruteforce_lambda(CostFunction::monomial(1), 2, Objective::SocialCost, 120) ==
          doctest::Approx(1.5));
}

TEST_CASE("grid search trivial and refusal cases") {
    CostFunction c = CostFunction::constant(2.0);
    CHECK(bruteforce_lambda(c, 2, Objective::Potential, 40) == doctest::Approx(1.0));
    CHECK(bruteforce_lambda(c, 2, Objective::SocialCost, 40) == doctest::Approx(1.0));
    CHECK_THROWS_AS(bruteforce_lambda(c, 5, Objective::Potential, 10), std::invalid_argument);
    CHECK_THROWS_AS(bruteforce_lambda(c, 0, Objective::Potential, 10), std::invalid_argument);
    CHECK_THROWS_AS(bruteforce_lambda(c, 2, Objective::Potential, 0), std::invalid_argument);
    CHECK_THROWS_AS(bruteforce_lambda(c, 4, Objective::Potential, 200), std::invalid_argument);
}

TEST_CASE("generators are seeded, shaped, and valid") {
    auto a = random_singleton_game(5, 3, 2, 42);
    auto b = random_singleton_game(5, 3, 2, 42);
    auto c = random_singleton_game(5, 3, 2, 43);
    REQUIRE(a.num_players() == 5);
    REQUIRE(a.num_resources() == 3);
    for (const auto& strategies : a.players) {
        REQUIRE(strategies.size() == 3);
        for (const auto& st : strategies) CHECK(st.size() == 1);
    }
    bool same = true, diff = false;
    for (int e = 0; e < 3; ++e) {
        same = same && a.resources[e].coeffs == b.resources[e].coeffs;
        diff = diff || a.resources[e].coeffs != c.resources[e].coeffs;
    }
    CHECK(same);
    CHECK(diff);
    for (const auto& f : a.resources) {
        CHECK(f.coeffs.size() == 3);
        CHECK(f.coeffs[2] >= 0.5);
    }

    auto s = random_subset_game(4, 6, 1, 3, 2, 7);
    REQUIRE(s.num_players() == 4);
    for (const auto& strategies : s.players) {
        REQUIRE(strategies.size() == 3);
        for (const auto& st : strategies) {
            CHECK(st.size() >= 1);
            CHECK(st.size() <= 2);
            CHECK(std::is_sorted(st.begin(), st.end()));
        }
    }
    CHECK_THROWS_AS(random_subset_game(2, 3, 1, 2, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_singleton_game(0, 3, 1, 1), std::invalid_argument);
}
