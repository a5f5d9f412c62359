#include <pybind11/pybind11.h>

#include <nlohmann/json.hpp>
#include <string>

#include "congestion/json_io.hpp"
#include "congestion/lowerbound.hpp"
#include "congestion/oracle.hpp"
#include "congestion/smoothness.hpp"
#include "congestion/taxes.hpp"

namespace py = pybind11;
using namespace congestion;
using nlohmann::json;

namespace {

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

std::string dump(const json& j) { return j.dump(2); }

std::string py_solve_lambda(const std::string& objective, int degree,
                            const std::string& game_json, int K, int N) {
    Objective obj;
    if (objective == "potential")
        obj = Objective::Potential;
    else if (objective == "socialcost")
        obj = Objective::SocialCost;
    else
        throw std::invalid_argument("objective must be potential or socialcost");
    if ((degree >= 0) == !game_json.empty())
        throw std::invalid_argument("pass exactly one of degree and game_json");

    SmoothnessCertificate cert;
    if (degree >= 0) {
        if (N > 0)
            cert = solve_lambda_table(CostFunction::monomial(degree), N, obj);
        else if (obj == Objective::Potential)
            cert = K > 0 ? solve_phi_monomial(degree, K) : solve_phi_monomial(degree);
        else
            cert = K > 0 ? solve_sc_monomial(degree, K) : solve_sc_monomial(degree);
    } else {
        cert = solve_lambda_game(parse_game(parse(game_json)), obj);
    }
    return dump(certificate_to_json(cert));
}

std::string py_run_dynamics(const std::string& game_json, const std::string& cert_json,
                            double epsilon, double c_override, long long move_cap) {
    CongestionGame g = parse_game(parse(game_json));
    SmoothnessCertificate cert = parse_certificate(parse(cert_json));
    RunOptions opts;
    if (c_override > 0.0) opts.c_override = c_override;
    opts.move_cap = move_cap;
    return dump(run_report_to_json(run_dynamics(g, cert, epsilon, opts)));
}

std::string py_taxes(const std::string& game_json, const std::string& cert_json) {
    CongestionGame g = parse_game(parse(game_json));
    SmoothnessCertificate cert = parse_certificate(parse(cert_json));
    return dump(taxes_to_json(taxes_from_certificate(g, {cert})));
}

std::string py_lower_bound(int degree, double epsilon, long long denom_cap) {
    DualSolution dual = ladder_dual(degree, denom_cap);
    SchedulingInstance inst = construct_instance(dual, epsilon, denom_cap);
    GapReport rep = verify_gap(inst);
    json j = instance_to_json(inst);
    j["ratio"] = round6(rep.ratio);
    j["eq_is_pne"] = rep.eq_is_pne;
    j["structural_ok"] = rep.structural_ok;
    return dump(j);
}

py::dict py_verify(const std::string& game_json, const std::string& profile_json,
                   double alpha, const std::string& taxes_json) {
    CongestionGame g = parse_game(parse(game_json));
    StrategyProfile s = parse_profile(parse(profile_json), g);
    ModifiedCostTable mod;
    bool taxed = !taxes_json.empty();
    if (taxed) mod = taxed_costs(g, parse_taxes(parse(taxes_json)));
    EquilibriumCheck chk = verify_alpha_equilibrium(g, s, alpha, taxed ? &mod : nullptr);
    py::dict d;
    d["holds"] = chk.holds;
    d["worst_ratio"] = chk.worst_ratio;
    d["worst_player"] = chk.worst_player;
    return d;
}

double py_poa(const std::string& game_json) { return exact_poa(parse_game(parse(game_json))); }

double py_stretch(const std::string& game_json, double alpha) {
    return exact_stretch(parse_game(parse(game_json)), alpha, nullptr, nullptr);
}

std::string py_gen_game(int players, int resources, int degree, std::uint64_t seed,
                        int subset_max, int strategies) {
    CongestionGame g = subset_max > 0
                           ? random_subset_game(players, resources, degree, strategies,
                                                subset_max, seed)
                           : random_singleton_game(players, resources, degree, seed);
    return dump(game_to_json(g));
}

}  // namespace

PYBIND11_MODULE(pycongestion, m) {
    m.doc() = "optimal congestion taxes, approximate equilibria, and lower bounds";

    m.def("solve_lambda", &py_solve_lambda, py::arg("objective"), py::arg("degree") = -1,
          py::arg("game_json") = "", py::arg("K") = 0, py::arg("N") = 0,
          "Optimal modified-cost certificate as a JSON string.");
    m.def("run_dynamics", &py_run_dynamics, py::arg("game_json"), py::arg("cert_json"),
          py::arg("epsilon"), py::arg("c_override") = -1.0, py::arg("move_cap") = 1000000LL,
          "Block-phase best-response run; returns the report as a JSON string.");
    m.def("taxes", &py_taxes, py::arg("game_json"), py::arg("cert_json"),
          "Load-dependent taxes realizing the certificate, as a JSON string.");
    m.def("lower_bound", &py_lower_bound, py::arg("degree"), py::arg("epsilon") = 1e-9,
          py::arg("denom_cap") = 10000LL,
          "Scheduling instance matching the upper bound, as a JSON string.");
    m.def("verify", &py_verify, py::arg("game_json"), py::arg("profile_json"),
          py::arg("alpha") = 1.0, py::arg("taxes_json") = "",
          "Check a profile for alpha-approximate equilibrium.");
    m.def("poa", &py_poa, py::arg("game_json"), "Exhaustive price of anarchy.");
    m.def("stretch", &py_stretch, py::arg("game_json"), py::arg("alpha") = 1.0,
          "Worst potential ratio over alpha-approximate equilibria.");
    m.def("gen_game", &py_gen_game, py::arg("players"), py::arg("resources"),
          py::arg("degree") = 1, py::arg("seed") = 1, py::arg("subset_max") = 0,
          py::arg("strategies") = 2, "Seeded random game as a JSON string.");
}
