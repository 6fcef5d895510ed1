#include "riskshare/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace riskshare {

namespace {

struct GapData {
    std::vector<double> widths;     // atom gaps
    std::vector<double> tail_probs; // survival at the left atom of each gap
};

GapData gap_data(const RiskDistribution& aggregate) {
    GapData g;
    const auto& atoms = aggregate.atoms();
    const auto& tails = aggregate.atom_tail_probs();
    for (std::size_t j = 0; j + 1 < atoms.size(); ++j) {
        g.widths.push_back(atoms[j + 1] - atoms[j]);
        g.tail_probs.push_back(tails[j]);
    }
    return g;
}

} // namespace

DiscreteInstance::DiscreteInstance(RiskDistribution aggregate_,
                                   std::vector<DistortionSet> sets_,
                                   double weight_grid_step_)
    : aggregate(std::move(aggregate_)), sets(std::move(sets_)),
      weight_grid_step(weight_grid_step_) {
    if (!aggregate.has_atoms())
        throw std::invalid_argument("DiscreteInstance: aggregate must be atomic");
    if (aggregate.atoms().size() > 12)
        throw std::invalid_argument("DiscreteInstance: at most 12 atoms supported");
    if (aggregate.atoms().front() < 0.0)
        throw std::invalid_argument("DiscreteInstance: atoms must be non-negative");
    if (sets.size() < 2 || sets.size() > 3)
        throw std::invalid_argument("DiscreteInstance: 2 or 3 agents supported");
    for (const auto& s : sets)
        if (s.size() > 2)
            throw std::invalid_argument("DiscreteInstance: at most 2 generators per set");
    if (!(weight_grid_step > 0.0 && weight_grid_step <= 0.5))
        throw std::invalid_argument("DiscreteInstance: weight_grid_step must lie in (0, 0.5]");
}

BruteForceResult brute_force_minmax(const DiscreteInstance& instance) {
    const std::size_t n = instance.sets.size();
    GapData gaps = gap_data(instance.aggregate);
    const std::size_t m = gaps.widths.size();

    long grid = std::lround(1.0 / instance.weight_grid_step);
    grid = std::max(grid, 1L);

    std::vector<long> counts(n);
    double combos = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        counts[i] = instance.sets[i].size() == 1 ? 1 : grid + 1;
        combos *= static_cast<double>(counts[i]);
    }
    if (combos > 1e7)
        throw std::invalid_argument("brute_force_minmax: grid exceeds 1e7 evaluations");

    // Mixed distortion values per agent, grid point and gap.
    std::vector<std::vector<std::vector<double>>> val(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& gens = instance.sets[i].generators();
        val[i].resize(static_cast<std::size_t>(counts[i]));
        for (long t = 0; t < counts[i]; ++t) {
            auto& row = val[i][static_cast<std::size_t>(t)];
            row.resize(m);
            double lambda =
                counts[i] == 1 ? 1.0 : static_cast<double>(t) / static_cast<double>(grid);
            for (std::size_t j = 0; j < m; ++j) {
                double tp = gaps.tail_probs[j];
                row[j] = counts[i] == 1 ? gens[0](tp)
                                        : lambda * gens[0](tp) + (1.0 - lambda) * gens[1](tp);
            }
        }
    }

    BruteForceResult best;
    best.value = -std::numeric_limits<double>::infinity();
    best.evaluations = 0;

    std::vector<long> idx(n, 0);
    while (true) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double mn = val[0][static_cast<std::size_t>(idx[0])][j];
            for (std::size_t i = 1; i < n; ++i)
                mn = std::min(mn, val[i][static_cast<std::size_t>(idx[i])][j]);
            total += gaps.widths[j] * mn;
        }
        ++best.evaluations;
        if (total > best.value) {
            best.value = total;
            best.weights.assign(n, {});
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] == 1)
                    best.weights[i] = {1.0};
                else {
                    double lambda = static_cast<double>(idx[i]) / static_cast<double>(grid);
                    best.weights[i] = {lambda, 1.0 - lambda};
                }
            }
        }
        // Row-major advance, last agent fastest.
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < counts[pos]) break;
            idx[pos] = 0;
            if (pos == 0) return best;
        }
    }
}

LayerEnumerationResult brute_force_layer_allocations(const DiscreteInstance& instance,
                                                     int share_grid) {
    if (share_grid < 1 || share_grid > 11)
        throw std::invalid_argument("brute_force_layer_allocations: share_grid must be in [1, 11]");
    const std::size_t n = instance.sets.size();
    GapData gaps = gap_data(instance.aggregate);
    const std::size_t m = gaps.widths.size();
    if (static_cast<double>(n) * static_cast<double>(m) > 12.0)
        throw std::invalid_argument(
            "brute_force_layer_allocations: n * (atom count - 1) must be at most 12");

    if (m == 0) return LayerEnumerationResult{0.0, 0.0, 1};

    // Pure per-gap contributions: contrib[j][i][k] = gen_{i,k}(tail_j) * width_j.
    std::vector<std::vector<std::vector<double>>> contrib(m);
    for (std::size_t j = 0; j < m; ++j) {
        contrib[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& gen : instance.sets[i].generators())
                contrib[j][i].push_back(gen(gaps.tail_probs[j]) * gaps.widths[j]);
        }
    }

    // All share compositions of share_grid into n parts.
    std::vector<std::vector<double>> comps;
    std::vector<int> part(n, 0);
    auto gen_comps = [&](auto&& self, std::size_t i, int remaining) -> void {
        if (i + 1 == n) {
            part[i] = remaining;
            std::vector<double> c(n);
            for (std::size_t q = 0; q < n; ++q)
                c[q] = static_cast<double>(part[q]) / static_cast<double>(share_grid);
            comps.push_back(std::move(c));
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            part[i] = v;
            self(self, i + 1, remaining - v);
        }
    };
    gen_comps(gen_comps, 0, share_grid);

    LayerEnumerationResult result{std::numeric_limits<double>::infinity(),
                                  -std::numeric_limits<double>::infinity(), 0};

    // Accumulators travel by value down the recursion: fresh sums per path,
    // no add/undo cancellation drift (the enumeration is compared to exact
    // sums at 1e-12).
    using Acc = std::array<std::array<double, 2>, 3>;
    auto dfs = [&](auto&& self, std::size_t j, Acc acc) -> void {
        if (j == m) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double best = acc[i][0];
                if (instance.sets[i].size() == 2) best = std::max(best, acc[i][1]);
                total += best;
            }
            result.min_total = std::min(result.min_total, total);
            result.max_total = std::max(result.max_total, total);
            ++result.count;
            return;
        }
        for (const auto& comp : comps) {
            Acc next = acc;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < contrib[j][i].size(); ++k)
                    next[i][k] += comp[i] * contrib[j][i][k];
            self(self, j + 1, next);
        }
    };
    dfs(dfs, 0, Acc{});
    return result;
}

} // namespace riskshare
