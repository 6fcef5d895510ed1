#include "riskshare/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace riskshare {

namespace {

std::string num(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    out += "\"";
    return out;
}

std::string num_array(const std::vector<double>& vs) {
    std::string out = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += num(vs[i]);
    }
    return out + "]";
}

std::string bool_array(const std::vector<bool>& vs) {
    std::string out = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += vs[i] ? "true" : "false";
    }
    return out + "]";
}

std::string index_array(const std::vector<std::size_t>& vs) {
    std::string out = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(vs[i]);
    }
    return out + "]";
}

std::string csv_label(const std::string& label) {
    std::string out;
    for (char ch : label) {
        bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                  (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        out += ok ? ch : '_';
    }
    return out;
}

} // namespace

std::string serialize_report(const RunReport& r) {
    std::string out;
    out += "{\n";
    out += "  \"schema_version\": " + std::to_string(r.schema_version) + ",\n";
    out += "  \"problem\": {\n";
    out += "    \"aggregate\": " + json_string(r.aggregate) + ",\n";
    out += "    \"agents\": " + std::to_string(r.agents.size()) + ",\n";
    out += "    \"lower_bound_s\": " + num(r.lower_bound_s) + ",\n";
    out += "    \"span\": " + num(r.span) + "\n";
    out += "  },\n";
    out += "  \"solver\": {\n";
    out += "    \"objective_value\": " + num(r.objective_value) + ",\n";
    out += "    \"iterations\": " + std::to_string(r.solver_iterations) + ",\n";
    out += "    \"final_gap\": " + num(r.solver_gap) + ",\n";
    out += std::string("    \"converged\": ") + (r.solver_converged ? "true" : "false") + "\n";
    out += "  },\n";
    out += "  \"layers\": {\n";
    out += "    \"breakpoints\": " + num_array(r.layer_breakpoints) + ",\n";
    out += "    \"active_sets\": [";
    for (std::size_t i = 0; i < r.layers.size(); ++i) {
        if (i) out += ", ";
        out += index_array(r.layers[i]);
    }
    out += "]\n";
    out += "  },\n";
    out += "  \"agents\": [\n";
    for (std::size_t i = 0; i < r.agents.size(); ++i) {
        const AgentReport& a = r.agents[i];
        out += "    {\n";
        out += "      \"label\": " + json_string(a.label) + ",\n";
        out += "      \"weights\": " + num_array(a.weights) + ",\n";
        out += "      \"distortion\": " + json_string(a.distortion) + ",\n";
        out += "      \"initial_risk\": " + num(a.initial_risk) + ",\n";
        out += "      \"retained_risk\": " + num(a.retained_risk) + ",\n";
        out += "      \"side_payment\": " + num(a.side_payment) + ",\n";
        out += "      \"final_risk\": " + num(a.final_risk) + ",\n";
        out += "      \"gain\": " + num(a.gain) + "\n";
        out += (i + 1 < r.agents.size()) ? "    },\n" : "    }\n";
    }
    out += "  ],\n";
    out += "  \"totals\": {\n";
    out += "    \"initial_risk\": " + num(r.total_initial_risk) + ",\n";
    out += "    \"final_risk\": " + num(r.total_final_risk) + ",\n";
    out += "    \"welfare_gain\": " + num(r.welfare_gain) + "\n";
    out += "  },\n";
    const VerificationReport& v = r.verification;
    out += "  \"verification\": {\n";
    out += "    \"feasibility_residual\": " + num(v.feasibility_residual) + ",\n";
    out += std::string("    \"feasible\": ") + (v.feasible ? "true" : "false") + ",\n";
    out += "    \"layer_violation\": " + num(v.layer_violation) + ",\n";
    out +=
        std::string("    \"slopes_in_layers\": ") + (v.slopes_in_layers ? "true" : "false") + ",\n";
    out += "    \"total_risk\": " + num(v.total_risk) + ",\n";
    out += "    \"total_residual_rel\": " + num(v.total_residual_rel) + ",\n";
    out += std::string("    \"total_matches\": ") + (v.total_matches ? "true" : "false") + ",\n";
    out += "    \"individually_rational\": " + bool_array(v.individually_rational) + ",\n";
    out += std::string("    \"ir_all\": ") + (v.ir_all ? "true" : "false") + ",\n";
    out += std::string("    \"all_pass\": ") + (v.all_pass() ? "true" : "false") + "\n";
    out += "  }\n";
    out += "}\n";
    return out;
}

std::string curves_csv(const MarketConfig& config, const MinMaxSolution& solution,
                       const RetentionProfile& profile) {
    const auto& dist = config.aggregate;
    double s = profile.s_lower;
    double hi = dist.essential_sup();
    int grid = config.curve_grid;

    std::string out = "x,survival";
    for (const auto& a : config.agents) out += ",Tstar_" + csv_label(a.label);
    for (const auto& a : config.agents) out += ",g_" + csv_label(a.label);
    out += "\n";

    for (int k = 0; k <= grid; ++k) {
        double x = s + (hi - s) * static_cast<double>(k) / static_cast<double>(grid);
        double tail = dist.survival(x);
        out += num(x) + "," + num(tail);
        for (const auto& T : solution.optimal_distortions) out += "," + num(T(tail));
        for (const auto& g : profile.g) out += "," + num(g(x - s));
        out += "\n";
    }
    return out;
}

std::string density_csv(const MarketConfig& config) {
    const auto& dist = config.aggregate;
    auto [lo, hi] = dist.essential_bounds();
    int grid = config.curve_grid;
    std::string out = "x,density\n";
    for (int k = 0; k <= grid; ++k) {
        double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid);
        double d;
        if (dist.has_density()) {
            d = dist.density(x);
        } else if (k < grid) {
            // Cell mass over cell width for atomic laws.
            double x_next = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(grid);
            d = x_next > x ? (dist.survival(x) - dist.survival(x_next)) / (x_next - x) : 0.0;
        } else {
            d = 0.0;
        }
        out += num(x) + "," + num(d) + "\n";
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

} // namespace riskshare
