/// Command-line front end: solve a risk-sharing market, cross-check the
/// solver against brute-force enumeration, or regenerate plot data.

#include "riskshare/market.hpp"
#include "riskshare/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

struct Flags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<double> gap_tol;
    std::optional<double> abs_tol;
    std::optional<double> rel_tol;
    std::optional<double> truncation_mass;
    std::optional<int> grid;
    std::string tie_rule;
    int atoms = 8;
    double weight_step = 1e-3;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("config", f.config_path, "market config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--gap-tol", f.gap_tol, "solver convergence gap tolerance");
    cmd->add_option("--abs-tol", f.abs_tol, "quadrature absolute tolerance");
    cmd->add_option("--rel-tol", f.rel_tol, "quadrature relative tolerance");
    cmd->add_option("--truncation-mass", f.truncation_mass,
                    "tail mass trimmed from unbounded aggregates, in (0, 0.01]");
}

void add_output_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--out-dir", f.out_dir, "output directory (default .)");
    cmd->add_option("--grid", f.grid, "rows in the curve and density CSVs");
    cmd->add_option("--tie-rule", f.tie_rule, "slope split on shared layers")
        ->check(CLI::IsMember({"lowest", "equal"}));
}

riskshare::MarketConfig load_with_flags(const Flags& f) {
    if (f.gap_tol && !(*f.gap_tol > 0.0))
        throw riskshare::ConfigError("--gap-tol", "must be positive");
    if (f.abs_tol && !(*f.abs_tol > 0.0))
        throw riskshare::ConfigError("--abs-tol", "must be positive");
    if (f.rel_tol && !(*f.rel_tol >= 0.0))
        throw riskshare::ConfigError("--rel-tol", "must be non-negative");
    if (f.grid && *f.grid < 2) throw riskshare::ConfigError("--grid", "must be at least 2");

    auto cfg = riskshare::load_market_config(f.config_path, f.truncation_mass);
    if (f.gap_tol) cfg.solver.gap_tol = *f.gap_tol;
    if (f.abs_tol) cfg.quad.abs_tol = *f.abs_tol;
    if (f.rel_tol) cfg.quad.rel_tol = *f.rel_tol;
    if (f.grid) cfg.curve_grid = *f.grid;
    if (f.tie_rule == "lowest") {
        cfg.tie_rule = riskshare::TieRule::LowestIndex;
        cfg.tie_weights.clear();
    } else if (f.tie_rule == "equal") {
        cfg.tie_rule = riskshare::TieRule::EqualSplit;
        cfg.tie_weights.clear();
    }
    return cfg;
}

int run_solve(const Flags& f, bool write_report) {
    auto cfg = load_with_flags(f);
    auto outcome = riskshare::run_pipeline(cfg, f.out_dir, write_report, true);
    const auto& r = outcome.report;

    std::printf("aggregate      %s\n", r.aggregate.c_str());
    std::printf("objective      %.12g  (span %.12g above s = %.12g)\n", r.objective_value,
                r.span, r.lower_bound_s);
    std::printf("solver         %s after %d iterations, gap %.3g\n",
                r.solver_converged ? "converged" : "NOT CONVERGED", r.solver_iterations,
                r.solver_gap);
    std::printf("total risk     %.12g -> %.12g  (welfare gain %.12g)\n", r.total_initial_risk,
                r.total_final_risk, r.welfare_gain);
    std::printf("verification   %s\n", r.verification.all_pass() ? "pass" : "FAIL");
    for (const auto& p : outcome.written) std::printf("wrote          %s\n", p.string().c_str());
    std::fprintf(stderr, "timing: solve %.1f ms, total %.1f ms\n", r.wall_ms_solve,
                 r.wall_ms_total);
    return outcome.exit_code;
}

int run_oracle(const Flags& f) {
    auto cfg = load_with_flags(f);
    auto result = riskshare::oracle_check(cfg, f.atoms, f.weight_step);
    std::printf("solver value   %.12g\n", result.solver_value);
    std::printf("grid value     %.12g  (%ld evaluations, step %.6g, %d atoms)\n",
                result.grid_value, result.evaluations, result.step_used, result.atoms_used);
    std::printf("gap            %.3g  (tolerance %.3g)\n", result.gap, 2e-3 * result.scale);
    std::printf("oracle check   %s\n", result.pass ? "pass" : "FAIL");
    return result.pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Comonotone Pareto-optimal risk sharing for distortion risk measures"};
    app.require_subcommand(1);
    Flags f;

    CLI::App* solve = app.add_subcommand(
        "solve", "solve the market and write report.json, curves.csv, density.csv");
    add_common_flags(solve, f);
    add_output_flags(solve, f);

    CLI::App* oracle =
        app.add_subcommand("oracle", "check the solver against brute-force enumeration");
    add_common_flags(oracle, f);
    oracle->add_option("--atoms", f.atoms, "atoms for discretizing the aggregate, in [2, 12]")
        ->check(CLI::Range(2, 12));
    oracle->add_option("--weight-step", f.weight_step, "enumeration grid step, in (0, 0.5]");

    CLI::App* curves =
        app.add_subcommand("curves", "regenerate curves.csv and density.csv only");
    add_common_flags(curves, f);
    add_output_flags(curves, f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(f, true);
        if (oracle->parsed()) return run_oracle(f);
        return run_solve(f, false);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
