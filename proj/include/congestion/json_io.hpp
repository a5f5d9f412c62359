#pragma once
#include <string>

#include <nlohmann/json.hpp>

#include "congestion/apx_algorithm.hpp"
#include "congestion/game.hpp"
#include "congestion/lowerbound.hpp"
#include "congestion/smoothness.hpp"
#include "congestion/taxes.hpp"

namespace congestion {

// File formats (field names are the stable contract):
//   game:        {"resources":[{"kind":"poly","coeffs":[...]}|{"kind":"table","values":[...]}],
//                 "players":[{"strategies":[[resourceIdx,...],...]},...]}
//   profile:     {"choices":[int,...]}
//   certificate: {"lambda","objective":"potential"|"social_cost","scope":"plain"|"strong",
//                 "fprime":[[...]],"nu","K"}
//   taxes:       {"taxes":[[...]],"lambda"}
//   run report:  {"profile":{...},"moves","phases","certified_alpha",
//                 "params":{"q","p","c","Delta","theta_q","z_hat"}}
//   instance:    game format plus {"equilibrium_profile","optimal_profile","degree","M"}

CongestionGame parse_game(const nlohmann::json& j);
nlohmann::json game_to_json(const CongestionGame& g);

StrategyProfile parse_profile(const nlohmann::json& j, const CongestionGame& g);
nlohmann::json profile_to_json(const StrategyProfile& s);

SmoothnessCertificate parse_certificate(const nlohmann::json& j);
nlohmann::json certificate_to_json(const SmoothnessCertificate& c);

TaxTable parse_taxes(const nlohmann::json& j);
nlohmann::json taxes_to_json(const TaxTable& t);

nlohmann::json run_report_to_json(const RunReport& r);

nlohmann::json instance_to_json(const SchedulingInstance& inst);
SchedulingInstance parse_instance(const nlohmann::json& j);

// All emitted floats are rounded to 6 decimals.
nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
double round6(double x);

}  // namespace congestion
