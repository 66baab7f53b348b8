// SPDX-License-Identifier: Apache-2.0
#include "liqgame/problem_io.hpp"

#include "liqgame/error.hpp"

#include <fstream>
#include <string>

namespace liqgame {

namespace {

using nlohmann::json;

double number(const json& obj, const char* key) {
    if (!obj.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing field '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> number_array(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_array()) {
        throw Error(ErrorCode::ConfigError, std::string("field '") + key + "' must be an array");
    }
    std::vector<double> out;
    for (const auto& v : obj.at(key)) {
        if (!v.is_number()) throw Error(ErrorCode::ConfigError, std::string("'") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

DriftSpec drift_from_json(const json& doc) {
    if (doc.is_null()) return DriftSpec::zero();
    if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
        throw Error(ErrorCode::ConfigError, "drift must be an object with a 'type'");
    }
    const auto type = doc.at("type").get<std::string>();
    if (type == "zero") return DriftSpec::zero();
    if (type == "constant") return DriftSpec::constant(number(doc, "value"));
    if (type == "sampled") return DriftSpec::sampled(number_array(doc, "grid"), number_array(doc, "values"));
    throw Error(ErrorCode::ConfigError, "unknown drift type '" + type + "'");
}

Horizon horizon_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
        throw Error(ErrorCode::ConfigError, "horizon must be an object with a 'type'");
    }
    const auto type = doc.at("type").get<std::string>();
    if (type == "finite") return Horizon::finite(number(doc, "T"));
    if (type == "infinite") return Horizon::infinite();
    throw Error(ErrorCode::ConfigError, "unknown horizon type '" + type + "'");
}

}  // namespace

ValidatedProblem problem_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "problem must be a JSON object");
    for (const char* key : {"market", "agents", "horizon"}) {
        if (!doc.contains(key)) throw Error(ErrorCode::ConfigError, std::string("missing section '") + key + "'");
    }
    const auto& m = doc.at("market");
    if (!m.is_object()) throw Error(ErrorCode::ConfigError, "market must be an object");
    MarketParams market;
    market.lambda = number(m, "lambda");
    market.gamma = number(m, "gamma");
    market.sigma = number(m, "sigma");
    market.s0 = m.contains("s0") ? number(m, "s0") : 0.0;
    market.drift = drift_from_json(m.contains("drift") ? m.at("drift") : json());

    const auto& a = doc.at("agents");
    if (!a.is_array()) throw Error(ErrorCode::ConfigError, "agents must be an array");
    std::vector<AgentSpec> agents;
    for (const auto& entry : a) {
        if (!entry.is_object()) throw Error(ErrorCode::ConfigError, "each agent must be an object");
        agents.push_back({number(entry, "x0"), number(entry, "alpha")});
    }
    return validate_problem(std::move(market), std::move(agents), horizon_from_json(doc.at("horizon")));
}

json drift_to_json(const DriftSpec& drift) {
    if (std::holds_alternative<ZeroDrift>(drift.variant())) return {{"type", "zero"}};
    if (const auto* c = std::get_if<ConstantDrift>(&drift.variant())) {
        return {{"type", "constant"}, {"value", c->value}};
    }
    const auto& s = std::get<SampledDrift>(drift.variant());
    return {{"type", "sampled"}, {"grid", s.grid}, {"values", s.values}};
}

json problem_to_json(const ValidatedProblem& problem) {
    json agents = json::array();
    for (const auto& a : problem.agents) agents.push_back({{"x0", a.x0}, {"alpha", a.alpha}});
    json horizon = problem.horizon.is_finite()
                       ? json{{"type", "finite"}, {"T", problem.horizon.length()}}
                       : json{{"type", "infinite"}};
    const auto& m = problem.market;
    return {
        {"market",
         {{"lambda", m.lambda}, {"gamma", m.gamma}, {"sigma", m.sigma}, {"s0", m.s0}, {"drift", drift_to_json(m.drift)}}},
        {"agents", agents},
        {"horizon", horizon},
    };
}

ValidatedProblem load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
    }
    return problem_from_json(doc);
}

}  // namespace liqgame
