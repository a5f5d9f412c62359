#pragma once
#include <optional>
#include <vector>

#include "congestion/game.hpp"
#include "congestion/smoothness.hpp"

namespace congestion {

// Refundable load-dependent taxes t_e(n) = f'_e(n) - f_e(n). Taxes shift
// equilibria (players minimize f + t = f') but never enter social cost.
struct TaxTable {
    std::vector<std::vector<double>> taxes;  // [resource][load-1]
    double lambda = 1.0;
};

// Materializes the certificate for the game and subtracts the original
// costs pointwise. Requires a social-cost certificate.
TaxTable taxes_from_certificate(const CongestionGame& g,
                                const std::vector<SmoothnessCertificate>& certs);

ModifiedCostTable taxed_costs(const CongestionGame& g, const TaxTable& taxes);

// zeta_SC(s) = sum_e sum_{i<=n_e(s)} f'_e(i); the pseudo-potential of the
// taxed game (identical to the modified-family Rosenthal potential).
double zeta_sc(const CongestionGame& g, const ModifiedCostTable& mod,
               const StrategyProfile& s);

struct LocalSearchResult {
    StrategyProfile profile;
    long long moves = 0;
    bool hit_cap = false;
    double local_alpha = 1.0;  // measured worst f'-deviation ratio at the end
};

// Big-improvement local search on f'-costs: accept a unilateral move only
// when it shrinks the mover's f'-cost by a factor > 1 + epsilon/(2N).
// Starts from BR_u(0) unless a profile is supplied.
LocalSearchResult epsilon_local_search(const CongestionGame& g, const ModifiedCostTable& mod,
                                       double epsilon,
                                       std::optional<StrategyProfile> start = std::nullopt,
                                       long long move_cap = 1000000);

struct PoAReport {
    double worst_eq_cost = 0.0;
    double opt_cost = 0.0;
    double ratio = 1.0;
    long long num_equilibria = 0;
};

// Exhaustive: enumerates every profile, keeps exact PNE of the taxed game,
// and reports max equilibrium social cost (original f) over the optimum.
// Refuses games with more than 1e7 profiles.
PoAReport poa_under_taxes(const CongestionGame& g, const ModifiedCostTable& mod);

}  // namespace congestion
