#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/smoothness.hpp"

namespace congestion {

// Parameters of the block-phase dynamics. q-1 and 1/N^c are kept as
// separate small quantities; q, theta_q, p are derived from them.
struct AlgoParams {
    double lambda = 1.0;
    double epsilon = 0.0;
    int N = 0;
    double c = 0.0;             // exponent actually used
    double theoretical_c = 0.0; // 10*log2(lambda/epsilon)
    bool used_override = false;
    double inv_Nc = 0.0;  // 1/N^c = q-1
    double q = 1.0;
    double theta_q = 1.0;
    double p = 1.0;
    double Delta = 1.0;         // max_e f_e(N)/f_e(1)
    double alpha_bound = 1.0;   // p(1 + 5/N^c)
};

struct ParamInfeasible : std::runtime_error {
    double minimal_c;
    ParamInfeasible(const std::string& msg, double min_c)
        : std::runtime_error(msg), minimal_c(min_c) {}
};

// Theoretical c unless c_override is given; throws ParamInfeasible (with the
// minimal admissible c for this N, lambda) when p would be non-positive.
AlgoParams derive_params(double lambda, double epsilon, const CongestionGame& g,
                         std::optional<double> c_override = std::nullopt);

struct BlockStructure {
    int z_hat = 1;
    double ratio = 1.0;              // 2*Delta*N^{2c+2}
    std::vector<double> boundaries;  // b_1..b_{z_hat+1}, b_1 = ell_max
    std::vector<int> block_of;       // per player, 1-based
    std::vector<double> ell;         // optimistic costs
    double ell_min = 0.0, ell_max = 0.0;
};
// Interval rule: u in B_i iff ell_u in (b_{i+1}, b_i]. Throws on ell_u = 0.
BlockStructure partition_blocks(const CongestionGame& g, const AlgoParams& params);

struct MoveRecord {
    int phase;
    char kind;  // 'p' or 'q'
    int player;
    int from, to;
    double cost_before, cost_after;      // in the move's cost family
    double potential_before, potential_after;  // modified-family Rosenthal
};

struct RunReport {
    StrategyProfile profile;
    AlgoParams params;
    BlockStructure blocks;
    long long moves = 0;
    int phases = 0;
    double certified_alpha = 0.0;  // measured worst deviation ratio, original costs
    bool alpha_within_bound = false;
    bool every_move_decreased_potential = true;
    bool phase_postconditions_ok = true;
    bool lemma_checks_ok = true;  // dominance + approximate-potential on every p-move
    bool hit_move_cap = false;
    std::vector<MoveRecord> move_log;
};

struct RunOptions {
    std::optional<double> c_override;
    long long move_cap = 1000000;
    bool keep_move_log = false;
    bool runtime_lemma_checks = true;
};

// Algorithm 1: start everyone at BR_u(0); for each phase i with B_i
// non-empty, repeatedly move the first eligible player (B_i with a p-move
// under original costs, else B_{i+1} with a q-move under modified costs) to
// its best response in that family. z_hat = 1 degenerates to a single
// p-move-only phase so the final profile is still a certified p-equilibrium.
RunReport run_dynamics(const CongestionGame& g, const SmoothnessCertificate& cert,
                       double epsilon, const RunOptions& opts = {});

// Lemma assertions, evaluated on the profile *before* the move.
bool check_approx_potential_step(const CongestionGame& g, const ModifiedCostTable& mod,
                                 const StrategyProfile& s, int player, int new_strategy,
                                 double p);
bool check_pmove_dominance(const CongestionGame& g, const ModifiedCostTable& mod,
                           const StrategyProfile& s, int player, int new_strategy,
                           double p, double q);

// True when the player can improve by a factor > f in the given family.
bool has_factor_move(const CongestionGame& g, const StrategyProfile& s, int player,
                     double factor, const ModifiedCostTable* mod);

}  // namespace congestion
