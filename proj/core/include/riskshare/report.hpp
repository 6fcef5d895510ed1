#pragma once

#include "riskshare/allocation.hpp"
#include "riskshare/market.hpp"
#include "riskshare/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace riskshare {

struct AgentReport {
    std::string label;
    std::vector<double> weights;
    std::string distortion; // description of the optimal mixed distortion
    double initial_risk;
    double retained_risk; // rho_i of the retention, before side payment
    double side_payment;
    double final_risk; // retained_risk + side_payment
    double gain;       // initial_risk - final_risk
};

/// Everything a run produces. Wall-clock timings are carried here for
/// callers but are excluded from the serialized report so identical configs
/// produce byte-identical report files.
struct RunReport {
    int schema_version = 1;
    std::string aggregate;
    double lower_bound_s = 0.0;
    double span = 0.0;
    double objective_value = 0.0;
    int solver_iterations = 0;
    double solver_gap = 0.0;
    bool solver_converged = true;
    std::vector<double> layer_breakpoints; // offsets above lower_bound_s
    std::vector<std::vector<std::size_t>> layers;
    std::vector<AgentReport> agents;
    double total_initial_risk = 0.0;
    double total_final_risk = 0.0;
    double welfare_gain = 0.0;
    VerificationReport verification{};
    double wall_ms_solve = 0.0; // not serialized
    double wall_ms_total = 0.0; // not serialized
};

/// Deterministic JSON: fixed field order, all reals at 12 significant
/// digits, LF line endings. Documented in docs/report_schema.md.
std::string serialize_report(const RunReport& report);

/// Curve data for the solved market: header row then curve_grid + 1 rows of
/// x, P(S > x), per-agent T_i*(P(S > x)), per-agent g_i(x - s_lower).
std::string curves_csv(const MarketConfig& config, const MinMaxSolution& solution,
                       const RetentionProfile& profile);

/// Density data for the aggregate: exact density for analytic families,
/// per-cell probability mass over width for atomic ones.
std::string density_csv(const MarketConfig& config);

/// Write content to path atomically enough for tests (temp file + rename),
/// creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace riskshare
