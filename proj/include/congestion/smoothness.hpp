#pragma once
#include <functional>
#include <vector>

#include "congestion/cost_function.hpp"
#include "congestion/game.hpp"
#include "congestion/lp.hpp"

namespace congestion {

enum class Objective { Potential, SocialCost };
enum class CertScope { Plain, Strong };

const char* to_string(Objective o);

// Modified-cost certificate. For monomial runs there is a single fprime
// table plus the tail rate nu (f'(n) = nu * n^d beyond K); game-derived
// certificates carry one table per resource and nu = 0.
struct SmoothnessCertificate {
    Objective objective = Objective::Potential;
    CertScope scope = CertScope::Strong;
    double lambda = 1.0;
    double nu = 0.0;
    int K = 0;       // table horizon
    int degree = -1; // monomial degree, -1 for game certificates
    std::vector<std::vector<double>> fprime;  // [resource][load-1]
    int lp_iterations = 0;
    int lp_rounds = 0;
};

// Slack of the plain social-cost row: lambda*h(m) - m f'(n+1) + n f'(n) - h(n)
// with h(n) = n*f(n). Row holds iff slack >= 0.
double eval_sc_constraint(const CostFunction& f, const std::vector<double>& fprime,
                          int n, int m, double lambda);

// Slack of the strong potential row:
// lambda*sum_{i=z+1}^{m+z} f(i) - m f'(n+z+1) + n f'(n+z) - sum_{i=z+1}^{n+z} f(i).
double eval_phi_constraint(const CostFunction& f, const std::vector<double>& fprime,
                           int n, int z, int m, double lambda);

// Full small-N programs: variable 0 = lambda, variables 1..N+1 = f'(1..N+1),
// objective min lambda, every (n,z,m) resp. (n,m) row materialized.
LinearProgram build_lp_phi(const CostFunction& f, int N);
LinearProgram build_lp_sc(const CostFunction& f, int N);

// Lazy-solvable view of the same family (core rows + exact separation),
// used for N large enough that materializing everything is wasteful.
struct LazyFamily {
    LinearProgram core;
    SeparationOracle oracle;
};
LazyFamily lazy_lp_phi(const CostFunction& f, int N);
LazyFamily lazy_lp_sc(const CostFunction& f, int N);

// Truncated monomial family at a fixed lambda-hat (the boundary pin
// f'(K) = nu_hat * K^d makes the program lambda-dependent, so the optimum
// is found by an outer bisection over lambda_hat). Variables are rescaled,
// u_j = f'(j) / scale[j], to keep every coefficient near unit size.
struct TruncatedFamily {
    Objective objective;
    int degree = 0;
    int K = 0;
    double lambda_hat = 0.0;
    double nu_hat = 0.0;
    std::vector<double> scale;  // scale[j-1] for f'(j), j in [1, K-1]
    LinearProgram core;
    SeparationOracle oracle;
};
TruncatedFamily build_lp_phi_truncated(int degree, int K, double lambda_hat);
TruncatedFamily build_lp_sc_truncated(int degree, int K, double lambda_hat);

// Outer bisection drivers producing the Table 1 / Table 2 certificates.
SmoothnessCertificate solve_phi_monomial(int degree, int K = 150);
SmoothnessCertificate solve_sc_monomial(int degree, int K = 1154);

// Small-N exact solves (min lambda as an LP variable).
SmoothnessCertificate solve_lambda_table(const CostFunction& f, int N, Objective obj);
// Per-resource solve, lambda = max_e lambda_e; fprime gets one table per resource.
SmoothnessCertificate solve_lambda_game(const CongestionGame& g, Objective obj);

struct CertScan {
    bool valid = false;
    double worst_slack = 0.0;  // most negative slack seen (0 when none negative)
    int resource = -1;
    int n = -1, z = -1, m = -1;  // witness indices; z = -1 for social cost rows
};
// Scans the declared constraint family for every resource table in the
// certificate. exhaustive=true walks the full declared (n[,z],m) range;
// otherwise the analytic-minimizer oracle pattern plus a strided sweep.
// n_limit/m_limit override the declared range when >= 0.
CertScan verify_certificate(const std::vector<CostFunction>& fs,
                            const SmoothnessCertificate& cert, bool exhaustive,
                            int n_limit = -1, long long m_limit = -1);

// Smallest load from which the closed-form tail inequality of the family
// holds onward; throws if it never holds below the scan bound 1e6.
int verify_tail_lemma(int degree, double lambda_d, Objective family);

// Builds per-resource modified cost tables covering loads 1..num_players.
// Game certificates map tables through directly; monomial certificates are
// assembled per resource from polynomial coefficients (a_i-weighted monomial
// tables), with the nu*n^d tail beyond K.
ModifiedCostTable materialize_modified(const CongestionGame& g,
                                       const std::vector<SmoothnessCertificate>& certs);

}  // namespace congestion
