#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

#include "congestion/json_io.hpp"
#include "congestion/lowerbound.hpp"
#include "congestion/oracle.hpp"
#include "congestion/smoothness.hpp"
#include "congestion/taxes.hpp"

using namespace congestion;
using nlohmann::json;

namespace {

// stdout carries exactly one primary numeric per command, 4 significant
// digits with trailing zeros kept (1 -> "1.000").
void print_primary(double v) { std::printf("%#.4g\n", v); }

json load_input(const std::string& path) {
    try {
        return load_json_file(path);
    } catch (const std::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParamInfeasible& e) {
        std::fprintf(stderr, "parameter infeasibility: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "bad input: %s\n", e.what());
        return 3;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "bad input: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solve failed: %s\n", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal congestion taxes, approximate equilibria, and lower bounds"};
    app.require_subcommand(1);

    // lambda
    auto* lambda_cmd = app.add_subcommand("lambda", "compute an optimal modified-cost certificate");
    std::string objective = "potential";
    int degree = -1, K = 0, N = 0;
    std::string game_path, cert_out;
    lambda_cmd->add_option("--objective", objective, "potential or socialcost")
        ->check(CLI::IsMember({"potential", "socialcost"}));
    lambda_cmd->add_option("--degree", degree, "monomial degree");
    lambda_cmd->add_option("--game", game_path, "game JSON (per-resource tables)");
    lambda_cmd->add_option("--K", K, "truncation horizon for monomial runs");
    lambda_cmd->add_option("--N", N, "exact small-N box program instead of the truncated family");
    lambda_cmd->add_option("--out", cert_out, "certificate JSON path");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run the block-phase dynamics");
    std::string solve_game, solve_cert, report_out;
    double epsilon = 0.1;
    double c_override = -1.0;
    long long move_cap = 1000000;
    solve_cmd->add_option("--game", solve_game)->required();
    solve_cmd->add_option("--cert", solve_cert)->required();
    solve_cmd->add_option("--epsilon", epsilon)->required();
    solve_cmd->add_option("--c-override", c_override, "use this exponent instead of 10 log2(lambda/eps)");
    solve_cmd->add_option("--move-cap", move_cap);
    solve_cmd->add_option("--out", report_out, "run report JSON path");

    // taxes
    auto* taxes_cmd = app.add_subcommand("taxes", "derive load-dependent taxes from a certificate");
    std::string tax_game, tax_cert, tax_out;
    taxes_cmd->add_option("--game", tax_game)->required();
    taxes_cmd->add_option("--cert", tax_cert)->required();
    taxes_cmd->add_option("--out", tax_out, "tax JSON path");

    // lowerbound
    auto* lb_cmd = app.add_subcommand("lowerbound", "build a matching scheduling instance");
    int lb_degree = 1;
    double lb_eps = 1e-9;
    long long denom_cap = 10000;
    std::string lb_out;
    lb_cmd->add_option("--degree", lb_degree)->required();
    lb_cmd->add_option("--epsilon", lb_eps, "rounding budget for the dual snap");
    lb_cmd->add_option("--denom-cap", denom_cap);
    lb_cmd->add_option("--out", lb_out, "instance JSON path");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "check a profile for alpha-equilibrium");
    std::string v_game, v_profile, v_taxes;
    double v_alpha = 1.0;
    verify_cmd->add_option("--game", v_game)->required();
    verify_cmd->add_option("--profile", v_profile)->required();
    verify_cmd->add_option("--alpha", v_alpha);
    verify_cmd->add_option("--taxes", v_taxes, "verify under these taxed costs");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive PoA/stretch report");
    std::string o_game, o_out;
    double o_alpha = 1.0;
    oracle_cmd->add_option("--game", o_game)->required();
    oracle_cmd->add_option("--alpha", o_alpha, "equilibrium approximation for the stretch scan");
    oracle_cmd->add_option("--out", o_out, "report JSON path");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "emit a seeded random game");
    int g_players = 2, g_resources = 2, g_degree = 1, g_strategies = 2, g_subset = 0;
    std::uint64_t g_seed = 1;
    std::string g_out;
    gen_cmd->add_option("--players", g_players)->required();
    gen_cmd->add_option("--resources", g_resources)->required();
    gen_cmd->add_option("--degree", g_degree);
    gen_cmd->add_option("--seed", g_seed);
    gen_cmd->add_option("--subset-max", g_subset, "0 keeps singleton strategies");
    gen_cmd->add_option("--strategies", g_strategies, "strategies per player in subset mode");
    gen_cmd->add_option("--out", g_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    }

    if (*lambda_cmd) {
        return guarded([&] {
            SmoothnessCertificate cert;
            Objective obj = objective == "potential" ? Objective::Potential : Objective::SocialCost;
            if ((degree >= 0) == !game_path.empty())
                throw std::invalid_argument("pass exactly one of --degree and --game");
            if (degree >= 0) {
                if (N > 0)
                    cert = solve_lambda_table(CostFunction::monomial(degree), N, obj);
                else if (obj == Objective::Potential)
                    cert = K > 0 ? solve_phi_monomial(degree, K) : solve_phi_monomial(degree);
                else
                    cert = K > 0 ? solve_sc_monomial(degree, K) : solve_sc_monomial(degree);
            } else {
                cert = solve_lambda_game(parse_game(load_input(game_path)), obj);
            }
            if (!cert_out.empty()) write_json_file(cert_out, certificate_to_json(cert));
            print_primary(cert.lambda);
            return 0;
        });
    }
    if (*solve_cmd) {
        return guarded([&] {
            CongestionGame g = parse_game(load_input(solve_game));
            SmoothnessCertificate cert = parse_certificate(load_input(solve_cert));
            if (cert.scope != CertScope::Strong)
                throw std::invalid_argument("solve needs a strong-scope potential certificate");
            RunOptions opts;
            if (c_override > 0.0) opts.c_override = c_override;
            opts.move_cap = move_cap;
            RunReport rep = run_dynamics(g, cert, epsilon, opts);
            if (!report_out.empty()) write_json_file(report_out, run_report_to_json(rep));
            print_primary(rep.certified_alpha);
            if (rep.hit_move_cap) return 5;
            return rep.certified_alpha <= cert.lambda * (1.0 + epsilon) + 1e-12 ? 0 : 1;
        });
    }
    if (*taxes_cmd) {
        return guarded([&] {
            CongestionGame g = parse_game(load_input(tax_game));
            SmoothnessCertificate cert = parse_certificate(load_input(tax_cert));
            TaxTable t = taxes_from_certificate(g, {cert});
            if (!tax_out.empty()) write_json_file(tax_out, taxes_to_json(t));
            print_primary(t.lambda);
            return 0;
        });
    }
    if (*lb_cmd) {
        return guarded([&] {
            DualSolution dual = ladder_dual(lb_degree, denom_cap);
            SchedulingInstance inst = construct_instance(dual, lb_eps, denom_cap);
            GapReport rep = verify_gap(inst);
            if (!lb_out.empty()) write_json_file(lb_out, instance_to_json(inst));
            print_primary(rep.ratio);
            return rep.eq_is_pne && rep.structural_ok && !rep.degenerate ? 0 : 1;
        });
    }
    if (*verify_cmd) {
        return guarded([&] {
            CongestionGame g = parse_game(load_input(v_game));
            StrategyProfile s = parse_profile(load_input(v_profile), g);
            ModifiedCostTable mod;
            bool taxed = !v_taxes.empty();
            if (taxed) mod = taxed_costs(g, parse_taxes(load_input(v_taxes)));
            EquilibriumCheck chk = verify_alpha_equilibrium(g, s, v_alpha, taxed ? &mod : nullptr);
            print_primary(chk.worst_ratio);
            return chk.holds ? 0 : 1;
        });
    }
    if (*oracle_cmd) {
        return guarded([&] {
            CongestionGame g = parse_game(load_input(o_game));
            double poa = exact_poa(g);
            double stretch = exact_stretch(g, o_alpha, nullptr, nullptr);
            auto eqs = enumerate_equilibria(g, o_alpha);
            if (!o_out.empty()) {
                json j = {{"poa", round6(poa)},
                          {"stretch", round6(stretch)},
                          {"equilibria", eqs.size()}};
                write_json_file(o_out, j);
            }
            print_primary(poa);
            return 0;
        });
    }
    return guarded([&] {  // gen
        CongestionGame g = g_subset > 0
                               ? random_subset_game(g_players, g_resources, g_degree,
                                                    g_strategies, g_subset, g_seed)
                               : random_singleton_game(g_players, g_resources, g_degree, g_seed);
        write_json_file(g_out, game_to_json(g));
        print_primary(static_cast<double>(g.profile_space()));
        return 0;
    });
}
