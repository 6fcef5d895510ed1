#pragma once

#include "riskshare/distortion.hpp"
#include "riskshare/distribution.hpp"

#include <cstddef>
#include <vector>

namespace riskshare {

/// A small instance the brute-force oracles can enumerate exhaustively:
/// atomic non-negative aggregate with at most 12 atoms, 2 or 3 agents, at
/// most 2 generators each. Objective evaluations on these instances are
/// exact finite sums, so the oracles are independent of the quadrature and
/// ascent machinery they check.
struct DiscreteInstance {
    RiskDistribution aggregate;
    std::vector<DistortionSet> sets;
    double weight_grid_step = 1e-3;

    DiscreteInstance(RiskDistribution aggregate_, std::vector<DistortionSet> sets_,
                     double weight_grid_step_ = 1e-3);
};

struct BruteForceResult {
    double value;
    std::vector<std::vector<double>> weights;
    long evaluations;
};

/// Exhaustive Cartesian scan of the mixing-weight grid (step
/// weight_grid_step on each two-generator simplex). Ties go to the first
/// grid point in row-major order. Throws std::invalid_argument if the grid
/// exceeds 1e7 evaluations.
BruteForceResult brute_force_minmax(const DiscreteInstance& instance);

struct LayerEnumerationResult {
    double min_total; // over all enumerated allocations
    double max_total;
    long count;
};

/// Enumerates every layer allocation on the integer share grid: for each
/// inter-atom gap, shares h_i in {0, 1/share_grid, ..., 1} summing to 1;
/// each agent's risk is the envelope max over its generators of the exact
/// retention sum. Totals are at retention level (no s_lower shift).
/// Guards: share_grid <= 11 and n * (atom count - 1) <= 12.
LayerEnumerationResult brute_force_layer_allocations(const DiscreteInstance& instance,
                                                     int share_grid);

} // namespace riskshare
