#include "congestion/apx_algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace congestion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CandidateParams {
    bool feasible = false;
    double inv_Nc = 0.0;
    double q = 1.0;
    double theta_q = 0.0;
    double p = 0.0;
};

// Evaluates the parameter chain at a given exponent c. Powers of N are kept
// as N^{-c} throughout; N^c itself is never formed, so large c degrades to
// inv_Nc = 0, q = 1, theta = lambda, p -> lambda instead of overflowing.
CandidateParams eval_candidate(double lambda, int N, double c) {
    CandidateParams cp;
    cp.inv_Nc = N > 1 ? std::exp(-c * std::log(static_cast<double>(N))) : 1.0;
    cp.q = 1.0 + cp.inv_Nc;
    double denom = 1.0 - N * lambda * cp.inv_Nc / cp.q;
    if (!(denom > 0.0)) return cp;
    cp.theta_q = lambda / denom;
    double recip = 1.0 / cp.theta_q - (1.0 + cp.q + 2.0 * lambda) * cp.inv_Nc;
    if (!(recip > 0.0)) return cp;
    cp.p = 1.0 / recip;
    cp.feasible = true;
    return cp;
}

// Smallest admissible exponent, found by bisection; feasibility is monotone
// in c because inv_Nc is decreasing in c.
double minimal_feasible_c(double lambda, int N) {
    double hi = 1.0;
    int grow = 0;
    while (!eval_candidate(lambda, N, hi).feasible) {
        hi *= 2.0;
        if (++grow > 16) return kInf;
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (eval_candidate(lambda, N, mid).feasible)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double cost_spread(const CongestionGame& g, int N) {
    double delta = 1.0;
    for (const auto& f : g.resources) {
        double at_one = f(1);
        double at_n = f(N);
        if (at_n <= 0.0) continue;
        if (at_one <= 0.0)
            throw std::invalid_argument(
                "resource has zero cost at load 1 but positive cost at load N");
        delta = std::max(delta, at_n / at_one);
    }
    return delta;
}

int best_original_singleton_start(const CongestionGame& g, int player) {
    const auto& strategies = g.players[player];
    int best = 0;
    double best_cost = kInf;
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

}  // namespace

AlgoParams derive_params(double lambda, double epsilon, const CongestionGame& g,
                         std::optional<double> c_override) {
    if (!(lambda >= 1.0))
        throw std::invalid_argument("lambda must be at least 1");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    int N = static_cast<int>(g.players.size());
    if (N < 1) throw std::invalid_argument("game has no players");

    AlgoParams params;
    params.lambda = lambda;
    params.epsilon = epsilon;
    params.N = N;
    params.theoretical_c = 10.0 * std::log2(std::max(lambda / epsilon, 1.0));
    params.used_override = c_override.has_value();
    params.c = c_override ? *c_override : params.theoretical_c;
    if (!(params.c > 0.0))
        throw std::invalid_argument("exponent c must be positive");

    CandidateParams cp = eval_candidate(lambda, N, params.c);
    if (!cp.feasible) {
        double min_c = minimal_feasible_c(lambda, N);
        std::ostringstream msg;
        msg << "c = " << params.c << " gives a non-positive move threshold for N = "
            << N << ", lambda = " << lambda;
        if (std::isfinite(min_c))
            msg << "; minimal admissible c is about " << min_c;
        else
            msg << "; no admissible c exists for this player count";
        throw ParamInfeasible(msg.str(), min_c);
    }

    params.inv_Nc = cp.inv_Nc;
    params.q = cp.q;
    params.theta_q = cp.theta_q;
    params.p = cp.p;
    params.Delta = cost_spread(g, N);
    params.alpha_bound = cp.p * (1.0 + 5.0 * cp.inv_Nc);
    return params;
}

BlockStructure partition_blocks(const CongestionGame& g, const AlgoParams& params) {
    int N = static_cast<int>(g.players.size());
    BlockStructure bs;
    bs.ell.resize(N);
    for (int u = 0; u < N; ++u) {
        bs.ell[u] = optimistic_cost(g, u);
        if (!(bs.ell[u] > 0.0))
            throw std::invalid_argument(
                "player " + std::to_string(u) + " has non-positive optimistic cost");
    }
    bs.ell_min = *std::min_element(bs.ell.begin(), bs.ell.end());
    bs.ell_max = *std::max_element(bs.ell.begin(), bs.ell.end());

    // R = 2 * Delta * N^{2c+2}; the exponent can overflow to inf, which just
    // collapses everything into the first block.
    bs.ratio = 2.0 * params.Delta *
               std::exp((2.0 * params.c + 2.0) * std::log(static_cast<double>(std::max(params.N, 2))));
    if (params.N == 1) bs.ratio = 2.0 * params.Delta;
    if (!(bs.ratio > 1.0)) throw std::logic_error("block ratio must exceed 1");

    double spread = bs.ell_max / bs.ell_min;
    int extra = 0;
    if (spread > 1.0 && std::isfinite(bs.ratio))
        extra = static_cast<int>(std::ceil(std::log(spread) / std::log(bs.ratio) - 1e-12));
    bs.z_hat = 1 + extra;

    bs.boundaries.resize(bs.z_hat + 1);
    bs.boundaries[0] = bs.ell_max;
    for (int i = 1; i <= bs.z_hat; ++i) bs.boundaries[i] = bs.boundaries[i - 1] / bs.ratio;

    bs.block_of.resize(N);
    for (int u = 0; u < N; ++u) {
        int block = bs.z_hat;
        for (int i = 1; i <= bs.z_hat; ++i) {
            if (bs.ell[u] > bs.boundaries[i]) {
                block = i;
                break;
            }
        }
        bs.block_of[u] = block;
    }
    return bs;
}

bool has_factor_move(const CongestionGame& g, const StrategyProfile& s, int player,
                     double factor, const ModifiedCostTable* mod) {
    double cur = player_cost(g, s, player, mod);
    if (!(cur > 0.0)) return false;
    BestResponse br = best_response(g, s, player, mod);
    return cur > factor * br.cost * (1.0 + 1e-12);
}

bool check_pmove_dominance(const CongestionGame& g, const ModifiedCostTable& mod,
                           const StrategyProfile& s, int player, int new_strategy,
                           double p, double q) {
    double lhs = p * deviation_cost(g, s, player, new_strategy, nullptr) -
                 player_cost(g, s, player, nullptr);
    double rhs = q * deviation_cost(g, s, player, new_strategy, &mod) -
                 player_cost(g, s, player, &mod);
    return lhs >= rhs - 1e-9 * (1.0 + std::abs(lhs) + std::abs(rhs));
}

bool check_approx_potential_step(const CongestionGame& g, const ModifiedCostTable& mod,
                                 const StrategyProfile& s, int player, int new_strategy,
                                 double p) {
    (void)p;
    double before = rosenthal_potential(g, s, &mod);
    StrategyProfile t = s;
    apply_move(g, t, player, new_strategy);
    double after = rosenthal_potential(g, t, &mod);
    return after < before;
}

RunReport run_dynamics(const CongestionGame& g, const SmoothnessCertificate& cert,
                       double epsilon, const RunOptions& opts) {
    if (cert.objective != Objective::Potential)
        throw std::invalid_argument("dynamics needs a potential-objective certificate");

    RunReport report;
    report.params = derive_params(cert.lambda, epsilon, g, opts.c_override);
    const AlgoParams& params = report.params;

    ModifiedCostTable mod = materialize_modified(g, std::vector<SmoothnessCertificate>{cert});
    report.blocks = partition_blocks(g, params);
    const BlockStructure& bs = report.blocks;

    std::vector<int> choices(params.N);
    for (int u = 0; u < params.N; ++u) choices[u] = best_original_singleton_start(g, u);
    StrategyProfile s = make_profile(g, choices);

    report.every_move_decreased_potential = true;
    report.phase_postconditions_ok = true;
    report.lemma_checks_ok = true;

    int last_phase = std::max(1, bs.z_hat - 1);
    bool capped = false;
    for (int phase = 1; phase <= last_phase && !capped; ++phase) {
        bool any_here = false;
        for (int u = 0; u < params.N; ++u)
            if (bs.block_of[u] == phase) any_here = true;
        if (!any_here) continue;

        while (true) {
            if (report.moves >= opts.move_cap) {
                capped = true;
                break;
            }
            int mover = -1;
            char kind = 0;
            for (int u = 0; u < params.N && mover < 0; ++u) {
                if (bs.block_of[u] == phase &&
                    has_factor_move(g, s, u, params.p, nullptr)) {
                    mover = u;
                    kind = 'p';
                }
            }
            for (int u = 0; u < params.N && mover < 0; ++u) {
                if (bs.block_of[u] == phase + 1 &&
                    has_factor_move(g, s, u, params.q, &mod)) {
                    mover = u;
                    kind = 'q';
                }
            }
            if (mover < 0) break;

            const ModifiedCostTable* family = kind == 'p' ? nullptr : &mod;
            BestResponse br = best_response(g, s, mover, family);

            MoveRecord rec;
            rec.phase = phase;
            rec.kind = kind;
            rec.player = mover;
            rec.from = s.choices[mover];
            rec.to = br.strategy;
            rec.cost_before = player_cost(g, s, mover, family);
            rec.potential_before = rosenthal_potential(g, s, &mod);

            if (opts.runtime_lemma_checks && kind == 'p') {
                if (!check_pmove_dominance(g, mod, s, mover, br.strategy, params.p, params.q))
                    report.lemma_checks_ok = false;
                if (!check_approx_potential_step(g, mod, s, mover, br.strategy, params.p))
                    report.lemma_checks_ok = false;
            }

            apply_move(g, s, mover, br.strategy);
            rec.cost_after = player_cost(g, s, mover, family);
            rec.potential_after = rosenthal_potential(g, s, &mod);
            if (!(rec.potential_after < rec.potential_before))
                report.every_move_decreased_potential = false;

            ++report.moves;
            if (opts.keep_move_log) report.move_log.push_back(rec);
        }

        if (!capped) {
            for (int u = 0; u < params.N; ++u) {
                if (bs.block_of[u] == phase &&
                    has_factor_move(g, s, u, params.p, nullptr))
                    report.phase_postconditions_ok = false;
                if (bs.block_of[u] == phase + 1 &&
                    has_factor_move(g, s, u, params.q, &mod))
                    report.phase_postconditions_ok = false;
            }
            ++report.phases;
        }
    }
    report.hit_move_cap = capped;

    report.profile = s;
    EquilibriumCheck chk = verify_alpha_equilibrium(g, s, params.alpha_bound, nullptr);
    report.certified_alpha = chk.worst_ratio;
    report.alpha_within_bound = chk.holds;
    return report;
}

}  // namespace congestion
