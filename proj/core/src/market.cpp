#include "riskshare/market.hpp"

#include "riskshare/choquet.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace riskshare {

namespace {

using nlohmann::json;

const json& require(const json& j, const std::string& key, const std::string& field) {
    if (!j.is_object()) throw ConfigError(field, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(field + "." + key, "missing required field");
    return *it;
}

double as_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "expected a string");
    return j.get<std::string>();
}

std::vector<double> as_number_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& field) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(field + "." + it.key(), "unknown field");
}

std::vector<double> read_sample_file(const std::filesystem::path& path,
                                     const std::string& field) {
    std::ifstream in(path);
    if (!in) throw ConfigError(field, "cannot open sample file " + path.string());
    std::vector<double> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            std::size_t pos = 0;
            double v = std::stod(line, &pos);
            while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
                ++pos;
            if (pos != line.size()) throw std::invalid_argument("trailing characters");
            samples.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(field, "invalid number at line " + std::to_string(line_no) +
                                         " of " + path.string());
        }
    }
    if (samples.empty()) throw ConfigError(field, "sample file " + path.string() + " is empty");
    return samples;
}

DistortionFunction distortion_from_json(const json& j, const std::string& field) {
    std::string type = as_string(require(j, "type", field), field + ".type");
    try {
        if (type == "es") {
            check_keys(j, {"type", "alpha"}, field);
            return DistortionFunction::expected_shortfall(
                as_number(require(j, "alpha", field), field + ".alpha"));
        }
        if (type == "power") {
            check_keys(j, {"type", "alpha", "exponent"}, field);
            return DistortionFunction::power_tail(
                as_number(require(j, "alpha", field), field + ".alpha"),
                as_number(require(j, "exponent", field), field + ".exponent"));
        }
        if (type == "wang") {
            check_keys(j, {"type", "shift"}, field);
            return DistortionFunction::wang(
                as_number(require(j, "shift", field), field + ".shift"));
        }
        if (type == "identity") {
            check_keys(j, {"type"}, field);
            return DistortionFunction::identity();
        }
        if (type == "piecewise") {
            check_keys(j, {"type", "knots", "values"}, field);
            return DistortionFunction::piecewise_linear(
                as_number_array(require(j, "knots", field), field + ".knots"),
                as_number_array(require(j, "values", field), field + ".values"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(field + ".type", "unknown distortion type '" + type + "'");
}

RiskDistribution distribution_from_json(const json& j, const std::string& field,
                                        double truncation_mass,
                                        const std::filesystem::path& base_dir,
                                        std::vector<double>* raw_samples) {
    std::string type = as_string(require(j, "type", field), field + ".type");
    try {
        if (type == "gamma") {
            check_keys(j, {"type", "shape", "scale"}, field);
            return RiskDistribution::gamma(
                as_number(require(j, "shape", field), field + ".shape"),
                as_number(require(j, "scale", field), field + ".scale"), truncation_mass);
        }
        if (type == "lognormal") {
            check_keys(j, {"type", "mu", "sigma"}, field);
            return RiskDistribution::lognormal(
                as_number(require(j, "mu", field), field + ".mu"),
                as_number(require(j, "sigma", field), field + ".sigma"), truncation_mass);
        }
        if (type == "uniform") {
            check_keys(j, {"type", "lo", "hi"}, field);
            return RiskDistribution::uniform(as_number(require(j, "lo", field), field + ".lo"),
                                             as_number(require(j, "hi", field), field + ".hi"));
        }
        if (type == "empirical") {
            check_keys(j, {"type", "path"}, field);
            auto path = base_dir / as_string(require(j, "path", field), field + ".path");
            auto samples = read_sample_file(path, field + ".path");
            if (raw_samples) *raw_samples = samples;
            return RiskDistribution::empirical(std::move(samples));
        }
        if (type == "discrete") {
            check_keys(j, {"type", "atoms", "probs"}, field);
            return RiskDistribution::discrete(
                as_number_array(require(j, "atoms", field), field + ".atoms"),
                as_number_array(require(j, "probs", field), field + ".probs"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
    throw ConfigError(field + ".type", "unknown distribution type '" + type + "'");
}

InitialPosition position_from_json(const json& j, const std::string& field,
                                   const std::filesystem::path& base_dir) {
    std::string type = as_string(require(j, "type", field), field + ".type");
    if (type == "proportional") {
        check_keys(j, {"type", "theta"}, field);
        double theta = as_number(require(j, "theta", field), field + ".theta");
        if (!(theta >= 0.0 && theta <= 1.0))
            throw ConfigError(field + ".theta", "must lie in [0, 1]");
        return ProportionalShare{theta};
    }
    if (type == "precomputed") {
        check_keys(j, {"type", "rho_x"}, field);
        double rho = as_number(require(j, "rho_x", field), field + ".rho_x");
        if (!std::isfinite(rho)) throw ConfigError(field + ".rho_x", "must be finite");
        return PrecomputedRisk{rho};
    }
    if (type == "empirical_column") {
        check_keys(j, {"type", "path", "column"}, field);
        int column = as_int(require(j, "column", field), field + ".column");
        if (column < 0) throw ConfigError(field + ".column", "must be non-negative");
        return EmpiricalColumn{base_dir / as_string(require(j, "path", field), field + ".path"),
                               static_cast<std::size_t>(column)};
    }
    throw ConfigError(field + ".type", "unknown position type '" + type + "'");
}

} // namespace

MarketConfig load_market_config(const std::filesystem::path& path,
                                std::optional<double> truncation_mass_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("JSON parse error: ") + e.what());
    }
    check_keys(j,
               {"schema_version", "aggregate", "agents", "solver", "quadrature", "tie_rule",
                "tie_weights", "truncation_mass", "curve_grid", "verify_rel_tol"},
               "config");
    if (j.contains("schema_version") &&
        as_int(j["schema_version"], "config.schema_version") != 1)
        throw ConfigError("config.schema_version", "unsupported schema version");

    std::filesystem::path base_dir = path.has_parent_path() ? path.parent_path() : ".";

    MarketConfig cfg{.aggregate = RiskDistribution::uniform(0.0, 1.0)};
    if (j.contains("truncation_mass"))
        cfg.truncation_mass = as_number(j["truncation_mass"], "config.truncation_mass");
    if (truncation_mass_override) cfg.truncation_mass = *truncation_mass_override;
    if (!(cfg.truncation_mass > 0.0 && cfg.truncation_mass <= 0.01))
        throw ConfigError("config.truncation_mass", "must lie in (0, 0.01]");
    cfg.aggregate = distribution_from_json(require(j, "aggregate", "config"), "config.aggregate",
                                           cfg.truncation_mass, base_dir,
                                           &cfg.aggregate_samples_raw);

    const json& agents = require(j, "agents", "config");
    if (!agents.is_array() || agents.empty())
        throw ConfigError("config.agents", "expected a non-empty array");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        std::string field = "config.agents[" + std::to_string(i) + "]";
        const json& a = agents[i];
        if (!a.is_object()) throw ConfigError(field, "expected an object");
        check_keys(a, {"label", "generators", "position"}, field);
        std::string label = as_string(require(a, "label", field), field + ".label");
        if (label.empty()) throw ConfigError(field + ".label", "must be non-empty");
        if (!labels.insert(label).second)
            throw ConfigError(field + ".label", "duplicate label '" + label + "'");
        const json& gens = require(a, "generators", field);
        if (!gens.is_array() || gens.empty())
            throw ConfigError(field + ".generators", "expected a non-empty array");
        std::vector<DistortionFunction> generators;
        for (std::size_t k = 0; k < gens.size(); ++k)
            generators.push_back(distortion_from_json(
                gens[k], field + ".generators[" + std::to_string(k) + "]"));
        DistortionSet set = [&] {
            try {
                return DistortionSet(std::move(generators), label);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(field + ".generators", e.what());
            }
        }();
        InitialPosition pos =
            position_from_json(require(a, "position", field), field + ".position", base_dir);
        cfg.agents.push_back(AgentConfig{std::move(label), std::move(set), std::move(pos)});
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, {"gap_tol", "max_iters", "inner_grid"}, "config.solver");
        if (s.contains("gap_tol"))
            cfg.solver.gap_tol = as_number(s["gap_tol"], "config.solver.gap_tol");
        if (s.contains("max_iters"))
            cfg.solver.max_iters = as_int(s["max_iters"], "config.solver.max_iters");
        if (s.contains("inner_grid"))
            cfg.solver.inner_grid = as_int(s["inner_grid"], "config.solver.inner_grid");
        if (!(cfg.solver.gap_tol > 0.0) || cfg.solver.max_iters < 1 || cfg.solver.inner_grid < 4)
            throw ConfigError("config.solver", "invalid solver options");
    }
    if (j.contains("quadrature")) {
        const json& q = j["quadrature"];
        check_keys(q, {"abs_tol", "rel_tol", "max_subdivisions"}, "config.quadrature");
        if (q.contains("abs_tol"))
            cfg.quad.abs_tol = as_number(q["abs_tol"], "config.quadrature.abs_tol");
        if (q.contains("rel_tol"))
            cfg.quad.rel_tol = as_number(q["rel_tol"], "config.quadrature.rel_tol");
        if (q.contains("max_subdivisions"))
            cfg.quad.max_subdivisions =
                as_int(q["max_subdivisions"], "config.quadrature.max_subdivisions");
        if (!(cfg.quad.abs_tol > 0.0) || !(cfg.quad.rel_tol > 0.0) ||
            cfg.quad.max_subdivisions < 8)
            throw ConfigError("config.quadrature", "invalid quadrature options");
    }
    if (j.contains("tie_rule")) {
        std::string rule = as_string(j["tie_rule"], "config.tie_rule");
        if (rule == "lowest")
            cfg.tie_rule = TieRule::LowestIndex;
        else if (rule == "equal")
            cfg.tie_rule = TieRule::EqualSplit;
        else if (rule == "weights")
            cfg.tie_rule = TieRule::WeightVector;
        else
            throw ConfigError("config.tie_rule", "expected 'lowest', 'equal' or 'weights'");
    }
    if (cfg.tie_rule == TieRule::WeightVector) {
        if (!j.contains("tie_weights"))
            throw ConfigError("config.tie_weights", "required by tie_rule 'weights'");
        cfg.tie_weights = as_number_array(j["tie_weights"], "config.tie_weights");
        if (cfg.tie_weights.size() != cfg.agents.size())
            throw ConfigError("config.tie_weights", "need one weight per agent");
        for (double w : cfg.tie_weights)
            if (!(w >= 0.0)) throw ConfigError("config.tie_weights", "must be non-negative");
    } else if (j.contains("tie_weights")) {
        throw ConfigError("config.tie_weights", "only valid with tie_rule 'weights'");
    }
    if (j.contains("curve_grid")) {
        cfg.curve_grid = as_int(j["curve_grid"], "config.curve_grid");
        if (cfg.curve_grid < 2) throw ConfigError("config.curve_grid", "must be at least 2");
    }
    if (j.contains("verify_rel_tol")) {
        cfg.verify_rel_tol = as_number(j["verify_rel_tol"], "config.verify_rel_tol");
        if (!(cfg.verify_rel_tol > 0.0))
            throw ConfigError("config.verify_rel_tol", "must be positive");
    }

    // Proportional thetas must form a full sharing of S when used exclusively.
    bool all_proportional = true;
    double theta_sum = 0.0;
    for (const auto& a : cfg.agents) {
        if (const auto* p = std::get_if<ProportionalShare>(&a.position))
            theta_sum += p->theta;
        else
            all_proportional = false;
    }
    if (all_proportional && std::abs(theta_sum - 1.0) > 1e-9)
        throw ConfigError("config.agents", "proportional thetas must sum to 1 within 1e-9");

    bool any_column = false;
    for (const auto& a : cfg.agents)
        if (std::holds_alternative<EmpiricalColumn>(a.position)) any_column = true;
    if (any_column && cfg.aggregate_samples_raw.empty())
        throw ConfigError("config.agents",
                          "empirical_column positions require an empirical aggregate");
    return cfg;
}

std::vector<double> initial_risks(const MarketConfig& config) {
    // Parse each referenced sample matrix once; validate row sums against the
    // raw (unsorted) aggregate samples.
    std::map<std::string, std::vector<std::vector<double>>> matrices;
    auto matrix_for = [&](const std::filesystem::path& path)
        -> const std::vector<std::vector<double>>& {
        auto key = path.string();
        auto it = matrices.find(key);
        if (it != matrices.end()) return it->second;

        std::ifstream in(path);
        if (!in) throw ConfigError("position.path", "cannot open " + key);
        std::vector<std::vector<double>> rows;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::vector<double> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                try {
                    row.push_back(std::stod(cell));
                } catch (const std::exception&) {
                    throw ConfigError("position.path", "invalid number at line " +
                                                           std::to_string(line_no) + " of " + key);
                }
            }
            rows.push_back(std::move(row));
        }
        if (rows.size() != config.aggregate_samples_raw.size())
            throw ConfigError("position.path",
                              key + ": row count does not match the aggregate samples");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double sum = 0.0;
            for (double v : rows[r]) sum += v;
            if (std::abs(sum - config.aggregate_samples_raw[r]) > 1e-9)
                throw ConfigError("position.path",
                                  key + ": row " + std::to_string(r + 1) +
                                      " does not sum to the aggregate sample within 1e-9");
        }
        return matrices.emplace(key, std::move(rows)).first->second;
    };

    std::vector<double> risks;
    risks.reserve(config.agents.size());
    for (const auto& agent : config.agents) {
        if (const auto* p = std::get_if<ProportionalShare>(&agent.position)) {
            // Positive homogeneity: rho(theta S) = theta rho(S).
            risks.push_back(p->theta *
                            coherent_risk(config.aggregate, agent.set, config.quad).value);
        } else if (const auto* pre = std::get_if<PrecomputedRisk>(&agent.position)) {
            risks.push_back(pre->rho_x);
        } else {
            const auto& col = std::get<EmpiricalColumn>(agent.position);
            const auto& rows = matrix_for(col.path);
            std::vector<double> samples;
            samples.reserve(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (col.column >= rows[r].size())
                    throw ConfigError("position.column",
                                      "row " + std::to_string(r + 1) + " of " +
                                          col.path.string() + " has no column " +
                                          std::to_string(col.column));
                samples.push_back(rows[r][col.column]);
            }
            risks.push_back(
                coherent_risk(RiskDistribution::empirical(std::move(samples)), agent.set,
                              config.quad)
                    .value);
        }
    }
    return risks;
}

} // namespace riskshare
