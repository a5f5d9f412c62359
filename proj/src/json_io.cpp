#include "congestion/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace congestion {

namespace {

using nlohmann::json;

json round6_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round6(x));
    return a;
}

std::vector<double> double_array(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(x.get<double>());
    return out;
}

json tables_to_json(const std::vector<std::vector<double>>& tables) {
    json a = json::array();
    for (const auto& t : tables) a.push_back(round6_array(t));
    return a;
}

std::vector<std::vector<double>> parse_tables(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array");
    std::vector<std::vector<double>> out;
    for (const auto& t : j) out.push_back(double_array(t, what));
    return out;
}

}  // namespace

double round6(double x) {
    if (!std::isfinite(x)) return x;
    return std::round(x * 1e6) / 1e6;
}

CongestionGame parse_game(const json& j) {
    CongestionGame g;
    if (!j.contains("resources") || !j.contains("players"))
        throw std::invalid_argument("game JSON needs resources and players");
    for (const auto& r : j.at("resources")) {
        std::string kind = r.at("kind").get<std::string>();
        if (kind == "poly")
            g.resources.push_back(CostFunction::polynomial(double_array(r.at("coeffs"), "coeffs")));
        else if (kind == "table")
            g.resources.push_back(CostFunction::table(double_array(r.at("values"), "values")));
        else
            throw std::invalid_argument("unknown resource kind: " + kind);
    }
    for (const auto& p : j.at("players")) {
        std::vector<std::vector<int>> strategies;
        for (const auto& st : p.at("strategies")) {
            std::vector<int> s = st.get<std::vector<int>>();
            std::sort(s.begin(), s.end());
            strategies.push_back(std::move(s));
        }
        g.players.push_back(std::move(strategies));
    }
    g.validate();
    return g;
}

json game_to_json(const CongestionGame& g) {
    json j;
    j["resources"] = json::array();
    for (const auto& f : g.resources) {
        json r;
        if (f.kind == CostFunction::Kind::Table) {
            r["kind"] = "table";
            r["values"] = round6_array(f.values);
        } else if (f.kind == CostFunction::Kind::Monomial) {
            r["kind"] = "poly";
            std::vector<double> coeffs(f.degree + 1, 0.0);
            coeffs[f.degree] = 1.0;
            r["coeffs"] = round6_array(coeffs);
        } else {
            r["kind"] = "poly";
            r["coeffs"] = round6_array(f.coeffs);
        }
        j["resources"].push_back(std::move(r));
    }
    j["players"] = json::array();
    for (const auto& strategies : g.players) {
        json p;
        p["strategies"] = strategies;
        j["players"].push_back(std::move(p));
    }
    return j;
}

StrategyProfile parse_profile(const json& j, const CongestionGame& g) {
    if (!j.contains("choices")) throw std::invalid_argument("profile JSON needs choices");
    return make_profile(g, j.at("choices").get<std::vector<int>>());
}

json profile_to_json(const StrategyProfile& s) {
    json j;
    j["choices"] = s.choices;
    return j;
}

SmoothnessCertificate parse_certificate(const json& j) {
    SmoothnessCertificate c;
    c.lambda = j.at("lambda").get<double>();
    std::string obj = j.at("objective").get<std::string>();
    if (obj == "potential")
        c.objective = Objective::Potential;
    else if (obj == "social_cost")
        c.objective = Objective::SocialCost;
    else
        throw std::invalid_argument("unknown objective: " + obj);
    std::string scope = j.at("scope").get<std::string>();
    if (scope == "plain")
        c.scope = CertScope::Plain;
    else if (scope == "strong")
        c.scope = CertScope::Strong;
    else
        throw std::invalid_argument("unknown scope: " + scope);
    c.fprime = parse_tables(j.at("fprime"), "fprime");
    c.nu = j.at("nu").get<double>();
    c.K = j.at("K").get<int>();
    c.degree = j.value("degree", -1);
    return c;
}

json certificate_to_json(const SmoothnessCertificate& c) {
    json j;
    j["lambda"] = round6(c.lambda);
    j["objective"] = c.objective == Objective::Potential ? "potential" : "social_cost";
    j["scope"] = c.scope == CertScope::Plain ? "plain" : "strong";
    j["fprime"] = tables_to_json(c.fprime);
    j["nu"] = round6(c.nu);
    j["K"] = c.K;
    j["degree"] = c.degree;
    return j;
}

TaxTable parse_taxes(const json& j) {
    TaxTable t;
    t.taxes = parse_tables(j.at("taxes"), "taxes");
    t.lambda = j.at("lambda").get<double>();
    return t;
}

json taxes_to_json(const TaxTable& t) {
    json j;
    j["taxes"] = tables_to_json(t.taxes);
    j["lambda"] = round6(t.lambda);
    return j;
}

json run_report_to_json(const RunReport& r) {
    json j;
    j["profile"] = profile_to_json(r.profile);
    j["moves"] = r.moves;
    j["phases"] = r.phases;
    j["certified_alpha"] = round6(r.certified_alpha);
    j["params"] = {{"q", round6(r.params.q)},
                   {"p", round6(r.params.p)},
                   {"c", round6(r.params.c)},
                   {"Delta", round6(r.params.Delta)},
                   {"theta_q", round6(r.params.theta_q)},
                   {"z_hat", r.blocks.z_hat}};
    j["alpha_within_bound"] = r.alpha_within_bound;
    j["hit_move_cap"] = r.hit_move_cap;
    return j;
}

json instance_to_json(const SchedulingInstance& inst) {
    json j = game_to_json(inst.game);
    j["equilibrium_profile"] = profile_to_json(inst.equilibrium);
    j["optimal_profile"] = profile_to_json(inst.optimum);
    j["degree"] = inst.degree;
    j["M"] = inst.M;
    j["epsilon"] = round6(inst.epsilon);
    j["pools"] = json::array();
    for (const auto& p : inst.pools) j["pools"].push_back({p[0], p[1], p[2]});
    j["dual_objective"] = round6(inst.dual_objective);
    return j;
}

SchedulingInstance parse_instance(const json& j) {
    SchedulingInstance inst;
    inst.game = parse_game(j);
    inst.equilibrium = parse_profile(j.at("equilibrium_profile"), inst.game);
    inst.optimum = parse_profile(j.at("optimal_profile"), inst.game);
    inst.degree = j.at("degree").get<int>();
    inst.M = j.at("M").get<long long>();
    inst.epsilon = j.value("epsilon", 0.0);
    inst.dual_objective = j.value("dual_objective", 0.0);
    if (j.contains("pools")) {
        for (const auto& p : j.at("pools")) {
            inst.pools.push_back({p.at(0).get<long long>(), p.at(1).get<long long>(),
                                  p.at(2).get<long long>()});
        }
    } else {
        // sidecar-only files: reconstruct pools from realized loads, one pool
        // per (equilibrium load, optimum load) run in resource order
        for (int e = 0; e < inst.game.num_resources(); ++e) {
            long long n = inst.equilibrium.loads[e], m = inst.optimum.loads[e];
            if (!inst.pools.empty() && inst.pools.back()[0] == n && inst.pools.back()[1] == m)
                ++inst.pools.back()[2];
            else
                inst.pools.push_back({n, m, 1});
        }
    }
    for (const auto& p : inst.pools) inst.total_machines += p[2];
    inst.total_players = inst.game.num_players();
    return inst;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace congestion
