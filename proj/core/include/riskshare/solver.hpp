#pragma once

#include "riskshare/choquet.hpp"
#include "riskshare/distortion.hpp"
#include "riskshare/distribution.hpp"
#include "riskshare/quadrature.hpp"

#include <optional>
#include <vector>

namespace riskshare {

/// The central concave program: maximize, over one mixing-weight vector per
/// agent (each on its own simplex), the integral over x in [0, span] of
/// min_i T_i(P(S > s_lower + x)), where T_i is agent i's mixed distortion.
struct MinMaxProblem {
    RiskDistribution aggregate;
    std::vector<DistortionSet> sets;
    QuadratureConfig quad{};
    double lower_bound_s;

    /// lower_bound defaults to essential_inf(aggregate) and must not exceed
    /// it. Requires at least two agents.
    MinMaxProblem(RiskDistribution aggregate_, std::vector<DistortionSet> sets_,
                  QuadratureConfig quad_ = {}, std::optional<double> lower_bound = {});

    [[nodiscard]] double span() const {
        return aggregate.essential_sup() - lower_bound_s;
    }
};

struct SolverOptions {
    double gap_tol = 1e-6; // relative to max(1, |value|)
    int max_iters = 500;   // conditional-gradient step budget
    int inner_grid = 64;   // golden-section iteration cap per 1-D scan
};

struct SolverConvergence {
    int iterations;   // objective evaluations (scan path) or ascent steps
    double final_gap; // conditional-gradient certificate: f* - f <= final_gap
    bool converged;
    /// Accepted incumbent values, non-decreasing by construction.
    std::vector<double> objective_history;
};

struct MinMaxSolution {
    std::vector<std::vector<double>> weights; // one simplex vector per agent
    std::vector<DistortionFunction> optimal_distortions;
    double value;
    SolverConvergence convergence;
};

/// Objective at explicit weights. Validates one simplex vector per agent.
double objective(const MinMaxProblem& problem,
                 const std::vector<std::vector<double>>& weights);

/// Deterministic maximization.
///
/// Scheme (fixed, no randomness): agents with one generator are pinned;
/// when every free agent has exactly two generators and there are at most
/// three of them, a nested golden-section scan over the per-agent mixing
/// weights runs first (partial maximization of a concave function is
/// concave, so each 1-D restriction is unimodal), followed by cyclic
/// coordinate polish. Otherwise conditional-gradient ascent from the
/// uniform weights with exact per-cell supergradients and golden-section
/// line search. Both paths finish with a conditional-gradient gap
/// certificate; convergence means final_gap <= gap_tol * max(1, |value|).
/// Non-convergence is reported, not thrown: the best iterate is returned
/// with converged = false.
MinMaxSolution solve(const MinMaxProblem& problem, const SolverOptions& opts = {});

} // namespace riskshare
