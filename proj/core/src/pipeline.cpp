#include "riskshare/pipeline.hpp"

#include "riskshare/choquet.hpp"
#include "riskshare/oracle.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace riskshare {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void fill_agent_reports(RunReport& report, const MarketConfig& config,
                        const MinMaxSolution& solution, const RetentionProfile& profile,
                        const std::vector<double>& rho_x,
                        const std::vector<double>& retained) {
    report.total_initial_risk = 0.0;
    report.total_final_risk = 0.0;
    for (std::size_t i = 0; i < config.agents.size(); ++i) {
        AgentReport a;
        a.label = config.agents[i].label;
        a.weights = solution.weights[i];
        a.distortion = solution.optimal_distortions[i].describe();
        a.initial_risk = rho_x[i];
        a.retained_risk = retained[i];
        a.side_payment = profile.c[i];
        a.final_risk = retained[i] + profile.c[i];
        a.gain = a.initial_risk - a.final_risk;
        report.total_initial_risk += a.initial_risk;
        report.total_final_risk += a.final_risk;
        report.agents.push_back(std::move(a));
    }
    report.welfare_gain = report.total_initial_risk - report.total_final_risk;
}

/// Forced outcome for a one-agent market: identity retention, c = s_lower.
/// The solve step degenerates to the upper envelope of the agent's own set.
void run_single_agent(RunOutcome& out, const MarketConfig& config,
                      const std::vector<double>& rho_x) {
    const RiskDistribution& dist = config.aggregate;
    const DistortionSet& set = config.agents[0].set;
    double s = dist.essential_inf();
    double span = dist.essential_sup() - s;
    double scale = std::max(1.0, span);

    CoherentRisk rho_s = coherent_risk(dist, set, config.quad);
    double value = rho_s.value - s; // objective at retention level

    std::vector<double> weights(set.generators().size(), 0.0);
    weights[rho_s.argmax_index] = 1.0;
    out.solution.weights = {weights};
    out.solution.optimal_distortions = {set.generators()[rho_s.argmax_index]};
    out.solution.value = value;
    out.solution.convergence = {0, 0.0, true, {value}};

    out.profile.g = {span > 0.0 ? RetentionFunction::identity(span) : RetentionFunction::zero()};
    out.profile.c = {s};
    out.profile.s_lower = s;

    std::vector<double> retained = {rho_s.value - s};

    out.report.lower_bound_s = s;
    out.report.span = span;
    out.report.objective_value = value;
    out.report.solver_iterations = 0;
    out.report.solver_gap = 0.0;
    out.report.solver_converged = true;
    out.report.layer_breakpoints = {0.0, span};
    out.report.layers = {{0}};
    fill_agent_reports(out.report, config, out.solution, out.profile, rho_x, retained);

    VerificationReport v;
    v.feasibility_residual = 0.0;
    v.feasible = true;
    v.layer_violation = 0.0;
    v.slopes_in_layers = true;
    v.total_risk = retained[0] + s;
    double expected = value + s;
    v.total_residual_rel = std::abs(v.total_risk - expected) / std::max(1.0, std::abs(expected));
    v.total_matches = v.total_residual_rel <= config.verify_rel_tol;
    v.individually_rational = {v.total_risk <= rho_x[0] + 1e-7 * scale};
    v.ir_all = v.individually_rational[0];
    out.report.verification = v;
}

/// `atoms` equal-probability atoms at quantile midpoints; coincident
/// midpoints (possible for atomic laws) merge by summing probability.
RiskDistribution discretize_for_oracle(const RiskDistribution& dist, int atoms) {
    std::vector<double> values;
    std::vector<double> probs;
    double p = 1.0 / static_cast<double>(atoms);
    for (int k = 0; k < atoms; ++k) {
        double x = dist.quantile((static_cast<double>(k) + 0.5) * p);
        if (!values.empty() && x <= values.back()) {
            probs.back() += p;
        } else {
            values.push_back(x);
            probs.push_back(p);
        }
    }
    return RiskDistribution::discrete(values, probs);
}

} // namespace

RunOutcome run_pipeline(const MarketConfig& config, const std::filesystem::path& out_dir,
                        bool write_report, bool write_curves) {
    auto t_total = Clock::now();
    RunOutcome out{};
    out.exit_code = 0;
    out.report.aggregate = config.aggregate.describe();

    std::vector<double> rho_x = initial_risks(config);

    if (config.agents.size() == 1) {
        run_single_agent(out, config, rho_x);
    } else {
        std::vector<DistortionSet> sets;
        sets.reserve(config.agents.size());
        for (const auto& a : config.agents) sets.push_back(a.set);
        MinMaxProblem problem(config.aggregate, std::move(sets), config.quad);

        auto t_solve = Clock::now();
        out.solution = solve(problem, config.solver);
        out.report.wall_ms_solve = ms_since(t_solve);

        LayerStructure layers = layer_structure(out.solution, problem);
        out.profile = build_retentions(layers, problem, config.tie_rule, config.tie_weights);
        out.profile.c = side_payments(out.profile, problem, rho_x);

        std::vector<double> retained(config.agents.size());
        for (std::size_t i = 0; i < retained.size(); ++i)
            retained[i] = risk_of_retention(problem.aggregate, out.profile.g[i],
                                            problem.sets[i], problem.quad,
                                            problem.lower_bound_s);

        out.report.lower_bound_s = problem.lower_bound_s;
        out.report.span = problem.span();
        out.report.objective_value = out.solution.value;
        out.report.solver_iterations = out.solution.convergence.iterations;
        out.report.solver_gap = out.solution.convergence.final_gap;
        out.report.solver_converged = out.solution.convergence.converged;
        out.report.layer_breakpoints = layers.breakpoints;
        out.report.layers = layers.layers;
        fill_agent_reports(out.report, config, out.solution, out.profile, rho_x, retained);
        out.report.verification =
            verify(out.profile, problem, out.solution, rho_x, config.verify_rel_tol);
    }

    if (!out.report.solver_converged)
        out.exit_code = 3;
    else if (!out.report.verification.all_pass())
        out.exit_code = 2;

    if (write_report) {
        auto path = out_dir / "report.json";
        write_text_file(path, serialize_report(out.report));
        out.written.push_back(path);
    }
    if (write_curves) {
        auto curves_path = out_dir / "curves.csv";
        write_text_file(curves_path, curves_csv(config, out.solution, out.profile));
        out.written.push_back(curves_path);
        auto density_path = out_dir / "density.csv";
        write_text_file(density_path, density_csv(config));
        out.written.push_back(density_path);
    }

    out.report.wall_ms_total = ms_since(t_total);
    return out;
}

OracleCheckResult oracle_check(const MarketConfig& config, int atoms, double weight_step) {
    if (atoms < 2 || atoms > 12)
        throw std::invalid_argument("oracle_check: atoms must be in [2, 12]");
    if (!(weight_step > 0.0 && weight_step <= 0.5))
        throw std::invalid_argument("oracle_check: weight_step must be in (0, 0.5]");

    std::vector<DistortionSet> sets;
    sets.reserve(config.agents.size());
    for (const auto& a : config.agents) sets.push_back(a.set);

    RiskDistribution law = config.aggregate;
    int atoms_used = atoms;
    if (law.has_atoms() && law.atoms().size() <= 12)
        atoms_used = static_cast<int>(law.atoms().size());
    else
        law = discretize_for_oracle(law, atoms);

    std::size_t free_agents = 0;
    for (const auto& s : sets)
        if (s.generators().size() == 2) ++free_agents;
    double step = weight_step;
    if (free_agents > 0) {
        double per_axis =
            std::floor(std::pow(1e7, 1.0 / static_cast<double>(free_agents)));
        step = std::max(step, 1.0 / std::max(1.0, per_axis - 1.0));
    }

    DiscreteInstance instance(law, sets, step);
    BruteForceResult grid = brute_force_minmax(instance);

    MinMaxProblem problem(law, std::move(sets), config.quad);
    MinMaxSolution sol = solve(problem, config.solver);

    OracleCheckResult result{};
    result.solver_value = sol.value;
    result.grid_value = grid.value;
    result.gap = std::abs(sol.value - grid.value);
    result.scale = std::max(1.0, law.essential_sup() - law.essential_inf());
    result.step_used = step;
    result.atoms_used = atoms_used;
    result.pass = result.gap <= 2e-3 * result.scale;
    result.evaluations = grid.evaluations;
    return result;
}

} // namespace riskshare
