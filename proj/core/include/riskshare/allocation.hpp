#pragma once

#include "riskshare/retention.hpp"
#include "riskshare/solver.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskshare {

/// Maximal intervals of [0, span] (offsets above lower_bound_s) on which the
/// set of agents attaining min_i T_i*(P(S > s_lower + x)) is constant within
/// tie_tol. Optimal retentions put slope only on these active sets.
struct LayerStructure {
    std::vector<double> breakpoints;              // 0 = b_0 < ... < b_m = span
    std::vector<std::vector<std::size_t>> layers; // active agents per interval
    double tie_tol;
};

/// Layer detection: exact atom cells for atomic aggregates; uniform scan
/// (scan_grid cells, at least 64) plus bisection to 1e-8 * span otherwise,
/// with sub-resolution intervals merged away. A zero-span aggregate yields a
/// single trivial interval.
LayerStructure layer_structure(const MinMaxSolution& solution, const MinMaxProblem& problem,
                               double tie_tol = 1e-9, int scan_grid = 4096);

/// How to split slope within a layer when several agents are active.
enum class TieRule {
    LowestIndex, // all slope to the smallest active index
    EqualSplit,  // uniform over the active set
    WeightVector // renormalized user weights over the active set
};

/// The comonotone allocation Y_i = g_i(S - s_lower) + c_i.
struct RetentionProfile {
    std::vector<RetentionFunction> g;
    std::vector<double> c; // side payments, sum to s_lower
    double s_lower;
};

/// Retentions supported on the layers; slopes sum to 1 on every interval.
/// Side payments are zero until assigned. agent_weights is WeightVector's
/// distribution over all agents (non-negative; its restriction to each layer
/// must have positive mass).
RetentionProfile build_retentions(const LayerStructure& layers, const MinMaxProblem& problem,
                                  TieRule rule, std::span<const double> agent_weights = {});

/// Thrown when the requested side payments cannot keep every agent at or
/// below its initial risk (total gain below -1e-6 * scale).
class InfeasibleSidePayments : public std::runtime_error {
  public:
    InfeasibleSidePayments(std::string msg, double slack)
        : std::runtime_error(std::move(msg)), slack_(slack) {}
    [[nodiscard]] double slack() const { return slack_; }

  private:
    double slack_;
};

/// Equal-gain side payments: with D = sum_i rho_i(X_i) - sum_i rho_i(g_i) -
/// s_lower (the total welfare gain), c_i = rho_i(X_i) - rho_i(g_i) - D/n.
/// Then sum_i c_i = s_lower and every agent's risk drops by exactly D/n.
std::vector<double> side_payments(const RetentionProfile& profile,
                                  const MinMaxProblem& problem,
                                  std::span<const double> initial_risks);

struct VerificationReport {
    double feasibility_residual; // max |sum_i g_i(x) - x| over the grid
    bool feasible;
    double layer_violation; // max slope mass placed outside the active set
    bool slopes_in_layers;
    double total_risk; // sum_i rho_i(Y_i)
    double total_residual_rel;
    bool total_matches;
    std::vector<bool> individually_rational;
    bool ir_all;

    [[nodiscard]] bool all_pass() const {
        return feasible && slopes_in_layers && total_matches && ir_all;
    }
};

/// Checks, in order: (a) sum of retentions is the identity on a 10001-point
/// grid; (b) slope mass stays inside the recomputed layers; (c) the total
/// risk sum_i [rho_i(g_i) + c_i] matches solution.value + s_lower within
/// total_rel_tol; (d) per-agent individual rationality against
/// initial_risks.
VerificationReport verify(const RetentionProfile& profile, const MinMaxProblem& problem,
                          const MinMaxSolution& solution,
                          std::span<const double> initial_risks,
                          double total_rel_tol = 1e-5);

} // namespace riskshare
