#include "riskshare/choquet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace riskshare {

namespace {

// Cell edges of an atomic law restricted to [a, b): the survival function is
// constant on [edge_k, edge_{k+1}).
std::vector<double> atomic_cell_edges(const RiskDistribution& dist, double a, double b) {
    std::vector<double> edges{a};
    for (double atom : dist.atoms())
        if (atom > a && atom < b) edges.push_back(atom);
    edges.push_back(b);
    return edges;
}

// Kinks of the distortions pulled back to t-space through the quantile.
std::vector<double> kink_breakpoints(const RiskDistribution& dist,
                                     std::span<const DistortionFunction> funcs) {
    std::vector<double> bps;
    for (const auto& f : funcs)
        for (double k : f.kinks())
            if (k > 0.0 && k < 1.0) bps.push_back(dist.quantile(1.0 - k));
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

std::size_t lowest_argmin(std::span<const DistortionFunction> funcs, double t) {
    std::size_t best = 0;
    double best_val = funcs[0](t);
    for (std::size_t i = 1; i < funcs.size(); ++i) {
        double v = funcs[i](t);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> members_within(std::span<const DistortionFunction> funcs,
                                        double t, double tie_tol) {
    double min_val = funcs[0](t);
    for (std::size_t i = 1; i < funcs.size(); ++i) min_val = std::min(min_val, funcs[i](t));
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < funcs.size(); ++i)
        if (funcs[i](t) <= min_val + tie_tol) members.push_back(i);
    return members;
}

// Root of f_left(survival) - f_right(survival) inside [xl, xr], where the
// left owner is minimal at xl and the right owner at xr.
double locate_switch(const RiskDistribution& dist, const DistortionFunction& f_left,
                     const DistortionFunction& f_right, double xl, double xr,
                     double x_tol) {
    auto diff = [&](double x) {
        double t = dist.survival(x);
        return f_left(t) - f_right(t);
    };
    for (int it = 0; it < 200 && xr - xl > x_tol; ++it) {
        double mid = 0.5 * (xl + xr);
        if (diff(mid) <= 0.0)
            xl = mid;
        else
            xr = mid;
    }
    return 0.5 * (xl + xr);
}

// Owner-switch locations of min_i funcs_i(survival) inside (a, b).
std::vector<double> switch_breakpoints(const RiskDistribution& dist,
                                       std::span<const DistortionFunction> funcs,
                                       double a, double b, int scan_grid, double x_tol) {
    std::vector<double> switches;
    if (funcs.size() < 2) return switches;
    double step = (b - a) / static_cast<double>(scan_grid);
    std::size_t prev_owner = lowest_argmin(funcs, dist.survival(a));
    double prev_x = a;
    for (int i = 1; i <= scan_grid; ++i) {
        double x = (i == scan_grid) ? b : a + step * static_cast<double>(i);
        std::size_t owner = lowest_argmin(funcs, dist.survival(x));
        if (owner != prev_owner)
            switches.push_back(
                locate_switch(dist, funcs[prev_owner], funcs[owner], prev_x, x, x_tol));
        prev_owner = owner;
        prev_x = x;
    }
    return switches;
}

} // namespace

double survival_distortion_integral(const RiskDistribution& dist,
                                    const DistortionFunction& T, double a, double b,
                                    const QuadratureConfig& quad) {
    if (!(b > a)) return 0.0;
    if (dist.has_atoms()) {
        auto edges = atomic_cell_edges(dist, a, b);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            acc += (edges[i + 1] - edges[i]) * T(dist.survival(edges[i]));
        return acc;
    }
    const DistortionFunction* fs = &T;
    auto bps = kink_breakpoints(dist, {fs, 1});
    return integrate([&](double t) { return T(dist.survival(t)); }, a, b, bps, quad);
}

double survival_min_integral(const RiskDistribution& dist,
                             std::span<const DistortionFunction> funcs, double a,
                             double b, const QuadratureConfig& quad, int scan_grid) {
    if (funcs.empty())
        throw std::invalid_argument("survival_min_integral: need at least one function");
    if (funcs.size() == 1) return survival_distortion_integral(dist, funcs[0], a, b, quad);
    if (!(b > a)) return 0.0;

    auto min_val = [&](double t) {
        double m = funcs[0](t);
        for (std::size_t i = 1; i < funcs.size(); ++i) m = std::min(m, funcs[i](t));
        return m;
    };

    if (dist.has_atoms()) {
        auto edges = atomic_cell_edges(dist, a, b);
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            acc += (edges[i + 1] - edges[i]) * min_val(dist.survival(edges[i]));
        return acc;
    }

    if (scan_grid < 2) throw std::invalid_argument("survival_min_integral: scan_grid too small");
    auto bps = kink_breakpoints(dist, funcs);
    auto switches = switch_breakpoints(dist, funcs, a, b, scan_grid, 1e-10 * (b - a));
    bps.insert(bps.end(), switches.begin(), switches.end());
    return integrate([&](double t) { return min_val(dist.survival(t)); }, a, b, bps, quad);
}

MinAttainmentPartition min_attainment_partition(const RiskDistribution& dist,
                                                std::span<const DistortionFunction> funcs,
                                                double a, double b, double tie_tol,
                                                int scan_grid) {
    if (funcs.empty())
        throw std::invalid_argument("min_attainment_partition: need at least one function");
    if (tie_tol < 0.0)
        throw std::invalid_argument("min_attainment_partition: tie_tol must be non-negative");
    if (scan_grid < 64)
        throw std::invalid_argument("min_attainment_partition: scan_grid must be at least 64");

    MinAttainmentPartition part;
    if (!(b > a)) {
        // Degenerate span: one trivial cell at a.
        part.edges = {a, a};
        part.members.push_back(members_within(funcs, dist.survival(a), tie_tol));
        return part;
    }

    std::vector<double> edges{a};
    if (dist.has_atoms()) {
        auto cell_edges = atomic_cell_edges(dist, a, b);
        edges.assign(cell_edges.begin(), cell_edges.end());
    } else {
        double x_tol = 1e-8 * (b - a);
        auto switches = switch_breakpoints(dist, funcs, a, b, scan_grid, x_tol);
        // Drop switch points that would create cells below resolution.
        for (double s : switches)
            if (s - edges.back() > x_tol && b - s > x_tol) edges.push_back(s);
        edges.push_back(b);
    }

    // Member sets per cell; atomic laws sample the left edge (survival is
    // right-continuous), analytic laws the midpoint.
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        double probe = dist.has_atoms() ? edges[i] : 0.5 * (edges[i] + edges[i + 1]);
        part.members.push_back(members_within(funcs, dist.survival(probe), tie_tol));
    }
    part.edges = std::move(edges);

    // Merge adjacent cells with identical member sets.
    std::vector<double> merged_edges{part.edges.front()};
    std::vector<std::vector<std::size_t>> merged_members;
    for (std::size_t i = 0; i < part.members.size(); ++i) {
        if (!merged_members.empty() && merged_members.back() == part.members[i]) {
            merged_edges.back() = part.edges[i + 1];
        } else {
            merged_members.push_back(part.members[i]);
            merged_edges.push_back(part.edges[i + 1]);
        }
    }
    part.edges = std::move(merged_edges);
    part.members = std::move(merged_members);
    return part;
}

double choquet_integral(const RiskDistribution& dist, const DistortionFunction& T,
                        const QuadratureConfig& quad) {
    auto [lo, hi] = dist.essential_bounds();
    if (!(hi > lo)) return lo;
    return lo + survival_distortion_integral(dist, T, lo, hi, quad);
}

CoherentRisk coherent_risk(const RiskDistribution& dist, const DistortionSet& set,
                           const QuadratureConfig& quad) {
    CoherentRisk best{0.0, 0};
    for (std::size_t k = 0; k < set.size(); ++k) {
        double v = choquet_integral(dist, set.generators()[k], quad);
        if (k == 0 || v > best.value) best = CoherentRisk{v, k};
    }
    return best;
}

double retention_integral(const RiskDistribution& dist, const RetentionFunction& g,
                          const DistortionFunction& T, const QuadratureConfig& quad,
                          std::optional<double> s_lower) {
    double s = s_lower.value_or(dist.essential_inf());
    if (s > dist.essential_inf())
        throw std::invalid_argument("retention_integral: s_lower must bound S from below");
    double span = dist.essential_sup() - s;
    if (g.span() > span + 1e-9 * std::max(1.0, span))
        throw std::invalid_argument("retention_integral: g extends beyond the span of S");

    std::vector<double> edges = g.breakpoints();
    if (edges.back() < span) edges.push_back(span);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double slope = g.slope_at(edges[k]);
        if (slope > 0.0)
            acc += slope *
                   survival_distortion_integral(dist, T, s + edges[k], s + edges[k + 1], quad);
    }
    return acc;
}

double risk_of_retention(const RiskDistribution& dist, const RetentionFunction& g,
                         const DistortionSet& set, const QuadratureConfig& quad,
                         std::optional<double> s_lower) {
    double best = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k) {
        double v = retention_integral(dist, g, set.generators()[k], quad, s_lower);
        if (k == 0 || v > best) best = v;
    }
    return best;
}

} // namespace riskshare
