#pragma once

#include "riskshare/allocation.hpp"
#include "riskshare/market.hpp"
#include "riskshare/report.hpp"
#include "riskshare/solver.hpp"

#include <filesystem>
#include <vector>

namespace riskshare {

/// One end-to-end run: solve, detect layers, build retentions, settle side
/// payments, verify, report.
struct RunOutcome {
    RunReport report;
    MinMaxSolution solution;
    RetentionProfile profile;
    int exit_code; // 0 pass, 2 verification failed, 3 solver not converged
    std::vector<std::filesystem::path> written;
};

/// Runs the full pipeline for a validated config and writes report.json
/// (write_report) and curves.csv plus density.csv (write_curves) into
/// out_dir. report.json bytes depend only on the config: timings stay in
/// RunReport and are never serialized. A single-agent market skips the
/// solve; the agent retains the whole aggregate.
RunOutcome run_pipeline(const MarketConfig& config, const std::filesystem::path& out_dir,
                        bool write_report, bool write_curves);

/// Independent check of the solver against exhaustive grid enumeration.
struct OracleCheckResult {
    double solver_value;
    double grid_value;
    double gap;       // |solver_value - grid_value|
    double scale;     // max(1, essential span of the enumerated aggregate)
    double step_used; // weight grid step after coarsening
    int atoms_used;
    bool pass; // gap <= 2e-3 * scale
    long evaluations;
};

/// Compares solve() with brute-force grid enumeration on a small version of
/// the config's market. Continuous (or oversized atomic) aggregates are
/// discretized to `atoms` equal-probability atoms at quantile midpoints.
/// The weight step is coarsened to keep the enumeration within its budget:
/// with f two-generator agents, step >= 1 / (floor(1e7^(1/f)) - 1).
/// Requires 2 or 3 agents with at most 2 generators each.
OracleCheckResult oracle_check(const MarketConfig& config, int atoms = 8,
                               double weight_step = 1e-3);

} // namespace riskshare
