#include "riskshare/allocation.hpp"

#include "riskshare/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace riskshare {

LayerStructure layer_structure(const MinMaxSolution& solution, const MinMaxProblem& problem,
                               double tie_tol, int scan_grid) {
    if (solution.optimal_distortions.size() != problem.sets.size())
        throw std::invalid_argument("layer_structure: solution does not match problem");
    if (tie_tol < 0.0)
        throw std::invalid_argument("layer_structure: tie_tol must be non-negative");

    double s = problem.lower_bound_s;
    double hi = problem.aggregate.essential_sup();
    auto part = min_attainment_partition(problem.aggregate, solution.optimal_distortions,
                                         s, hi, tie_tol, scan_grid);

    LayerStructure layers;
    layers.tie_tol = tie_tol;
    layers.layers = std::move(part.members);
    layers.breakpoints.reserve(part.edges.size());
    for (double e : part.edges) layers.breakpoints.push_back(e - s);
    layers.breakpoints.front() = 0.0;
    if (hi > s) layers.breakpoints.back() = hi - s;
    return layers;
}

RetentionProfile build_retentions(const LayerStructure& layers, const MinMaxProblem& problem,
                                  TieRule rule, std::span<const double> agent_weights) {
    const std::size_t n = problem.sets.size();
    if (rule == TieRule::WeightVector) {
        if (agent_weights.size() != n)
            throw std::invalid_argument("build_retentions: need one weight per agent");
        for (double w : agent_weights)
            if (!(w >= 0.0))
                throw std::invalid_argument("build_retentions: weights must be non-negative");
    }

    RetentionProfile profile;
    profile.s_lower = problem.lower_bound_s;
    profile.c.assign(n, 0.0);

    const std::size_t m = layers.layers.size();
    bool degenerate = layers.breakpoints.back() <= layers.breakpoints.front();
    if (degenerate) {
        for (std::size_t i = 0; i < n; ++i) profile.g.push_back(RetentionFunction::zero());
        return profile;
    }

    std::vector<std::vector<double>> slopes(n, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < m; ++j) {
        const auto& active = layers.layers[j];
        switch (rule) {
        case TieRule::LowestIndex:
            slopes[active.front()][j] = 1.0;
            break;
        case TieRule::EqualSplit: {
            double share = 1.0 / static_cast<double>(active.size());
            for (std::size_t i : active) slopes[i][j] = share;
            break;
        }
        case TieRule::WeightVector: {
            double mass = 0.0;
            for (std::size_t i : active) mass += agent_weights[i];
            if (!(mass > 0.0))
                throw std::invalid_argument(
                    "build_retentions: weight vector has no mass on an active layer");
            for (std::size_t i : active) slopes[i][j] = agent_weights[i] / mass;
            break;
        }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        profile.g.emplace_back(layers.breakpoints, std::move(slopes[i]));
    return profile;
}

std::vector<double> side_payments(const RetentionProfile& profile, const MinMaxProblem& problem,
                                  std::span<const double> initial_risks) {
    const std::size_t n = problem.sets.size();
    if (profile.g.size() != n || initial_risks.size() != n)
        throw std::invalid_argument("side_payments: profile and risks must match the problem");

    double gain_total = -profile.s_lower;
    std::vector<double> retained(n);
    for (std::size_t i = 0; i < n; ++i) {
        retained[i] = risk_of_retention(problem.aggregate, profile.g[i], problem.sets[i],
                                        problem.quad, profile.s_lower);
        gain_total += initial_risks[i] - retained[i];
    }

    double scale = std::max(1.0, problem.span());
    if (gain_total < -1e-6 * scale) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "side_payments: total gain %.6e below feasibility slack -1e-6 * %.6g",
                      gain_total, scale);
        throw InfeasibleSidePayments(msg, gain_total);
    }

    double dn = static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = initial_risks[i] - retained[i] - gain_total / dn;
    return c;
}

VerificationReport verify(const RetentionProfile& profile, const MinMaxProblem& problem,
                          const MinMaxSolution& solution,
                          std::span<const double> initial_risks, double total_rel_tol) {
    const std::size_t n = problem.sets.size();
    if (profile.g.size() != n || profile.c.size() != n || initial_risks.size() != n)
        throw std::invalid_argument("verify: profile and risks must match the problem");

    VerificationReport report{};
    double span = problem.span();
    double scale = std::max(1.0, span);

    // (a) Feasibility: retentions sum to the identity.
    report.feasibility_residual = 0.0;
    const int grid = 10000;
    for (int k = 0; k <= grid; ++k) {
        double x = span * static_cast<double>(k) / static_cast<double>(grid);
        double sum = 0.0;
        for (const auto& g : profile.g) sum += g(x);
        report.feasibility_residual = std::max(report.feasibility_residual, std::abs(sum - x));
    }
    report.feasible = report.feasibility_residual <= 1e-9 * scale;

    // (b) Slope mass stays inside the recomputed active sets.
    auto layers = layer_structure(solution, problem);
    std::vector<double> edges = layers.breakpoints;
    for (const auto& g : profile.g)
        edges.insert(edges.end(), g.breakpoints().begin(), g.breakpoints().end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    report.layer_violation = 0.0;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        if (edges[e + 1] - edges[e] <= 1e-8 * scale) continue; // below layer resolution
        double mid = 0.5 * (edges[e] + edges[e + 1]);
        auto it = std::upper_bound(layers.breakpoints.begin(), layers.breakpoints.end(), mid);
        std::size_t cell = std::min(layers.layers.size() - 1,
                                    static_cast<std::size_t>(it - layers.breakpoints.begin()) - 1);
        const auto& active = layers.layers[cell];
        double outside = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(active.begin(), active.end(), i) == active.end())
                outside += profile.g[i].slope_at(mid);
        }
        report.layer_violation = std::max(report.layer_violation, outside);
    }
    report.slopes_in_layers = report.layer_violation <= 1e-9;

    // (c) Total risk equals the objective value shifted by s_lower.
    report.total_risk = 0.0;
    std::vector<double> final_risks(n);
    for (std::size_t i = 0; i < n; ++i) {
        final_risks[i] = risk_of_retention(problem.aggregate, profile.g[i], problem.sets[i],
                                           problem.quad, profile.s_lower) +
                         profile.c[i];
        report.total_risk += final_risks[i];
    }
    double expected = solution.value + profile.s_lower;
    report.total_residual_rel =
        std::abs(report.total_risk - expected) / std::max(1.0, std::abs(expected));
    report.total_matches = report.total_residual_rel <= total_rel_tol;

    // (d) Individual rationality.
    report.individually_rational.resize(n);
    report.ir_all = true;
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = final_risks[i] <= initial_risks[i] + 1e-7 * scale;
        report.individually_rational[i] = ok;
        report.ir_all = report.ir_all && ok;
    }
    return report;
}

} // namespace riskshare
