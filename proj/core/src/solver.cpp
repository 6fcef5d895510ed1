#include "riskshare/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace riskshare {

namespace {

constexpr double inv_phi = 0.61803398874989484820458683436564;

int golden_iters_for(double x_tol) {
    // Bracket shrinks by inv_phi per iteration from length 1.
    return static_cast<int>(std::ceil(std::log(x_tol) / std::log(inv_phi)));
}

struct LinePoint {
    double x;
    double value;
};

// Deterministic golden-section maximization on [lo, hi]; the endpoints are
// always candidates so boundary optima come out exact (lo preferred on ties).
template <typename F>
LinePoint golden_max(F&& f, double lo, double hi, int max_iters, double x_tol) {
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    LinePoint best = (f1 >= f2) ? LinePoint{x1, f1} : LinePoint{x2, f2};
    for (int k = 0; k < max_iters && (b - a) > x_tol; ++k) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if (f1 > best.value) best = {x1, f1};
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if (f2 > best.value) best = {x2, f2};
        }
    }
    double flo = f(lo);
    if (flo >= best.value) best = {lo, flo};
    double fhi = f(hi);
    if (fhi > best.value) best = {hi, fhi};
    return best;
}

struct Evaluator {
    const MinMaxProblem& problem;
    QuadratureConfig quad;
    int switch_scan;
    long evals = 0;

    double operator()(const std::vector<std::vector<double>>& w) {
        ++evals;
        std::vector<DistortionFunction> mixes;
        mixes.reserve(problem.sets.size());
        for (std::size_t i = 0; i < problem.sets.size(); ++i)
            mixes.push_back(problem.sets[i].mix(w[i]));
        return survival_min_integral(problem.aggregate, mixes, problem.lower_bound_s,
                                     problem.aggregate.essential_sup(), quad, switch_scan);
    }
};

// Supergradient of the objective: each partition cell is owned by the
// lowest-index minimizer; d/dw_{i,k} accumulates that agent's generator
// integrals over its own cells and is zero elsewhere.
std::vector<std::vector<double>> supergradient(const MinMaxProblem& problem,
                                               const std::vector<std::vector<double>>& w) {
    std::vector<DistortionFunction> mixes;
    mixes.reserve(problem.sets.size());
    for (std::size_t i = 0; i < problem.sets.size(); ++i)
        mixes.push_back(problem.sets[i].mix(w[i]));

    auto part = min_attainment_partition(problem.aggregate, mixes, problem.lower_bound_s,
                                         problem.aggregate.essential_sup(), 0.0, 4096);
    std::vector<std::vector<double>> g(problem.sets.size());
    for (std::size_t i = 0; i < problem.sets.size(); ++i)
        g[i].assign(problem.sets[i].size(), 0.0);
    for (std::size_t c = 0; c + 1 < part.edges.size(); ++c) {
        std::size_t owner = part.members[c].front();
        for (std::size_t k = 0; k < problem.sets[owner].size(); ++k)
            g[owner][k] += survival_distortion_integral(problem.aggregate,
                                                        problem.sets[owner].generators()[k],
                                                        part.edges[c], part.edges[c + 1],
                                                        problem.quad);
    }
    return g;
}

struct Certificate {
    double gap;
    std::vector<std::vector<double>> vertex; // per-agent best generator weights
};

// Conditional-gradient certificate: by concavity f(w*) - f(w) <= gap.
Certificate gap_certificate(const MinMaxProblem& problem,
                            const std::vector<std::vector<double>>& w) {
    auto g = supergradient(problem, w);
    Certificate cert;
    cert.gap = 0.0;
    cert.vertex.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t best_k = 0;
        for (std::size_t k = 1; k < g[i].size(); ++k)
            if (g[i][k] > g[i][best_k]) best_k = k;
        double inner = 0.0;
        for (std::size_t k = 0; k < g[i].size(); ++k) inner += w[i][k] * g[i][k];
        cert.gap += g[i][best_k] - inner;
        cert.vertex[i].assign(g[i].size(), 0.0);
        cert.vertex[i][best_k] = 1.0;
    }
    return cert;
}

std::vector<std::vector<double>> pinned_weights(const MinMaxProblem& problem) {
    std::vector<std::vector<double>> w(problem.sets.size());
    for (std::size_t i = 0; i < problem.sets.size(); ++i) {
        w[i].assign(problem.sets[i].size(),
                    1.0 / static_cast<double>(problem.sets[i].size()));
    }
    return w;
}

} // namespace

MinMaxProblem::MinMaxProblem(RiskDistribution aggregate_, std::vector<DistortionSet> sets_,
                             QuadratureConfig quad_, std::optional<double> lower_bound)
    : aggregate(std::move(aggregate_)), sets(std::move(sets_)), quad(quad_),
      lower_bound_s(lower_bound.value_or(aggregate.essential_inf())) {
    if (sets.size() < 2)
        throw std::invalid_argument("MinMaxProblem: at least two agents required");
    if (!std::isfinite(lower_bound_s) || lower_bound_s > aggregate.essential_inf())
        throw std::invalid_argument("MinMaxProblem: lower_bound_s must bound S from below");
}

double objective(const MinMaxProblem& problem,
                 const std::vector<std::vector<double>>& weights) {
    if (weights.size() != problem.sets.size())
        throw std::invalid_argument("objective: one weight vector per agent required");
    Evaluator eval{problem, problem.quad, 256};
    return eval(weights);
}

MinMaxSolution solve(const MinMaxProblem& problem, const SolverOptions& opts) {
    if (!(opts.gap_tol > 0.0) || opts.max_iters < 1 || opts.inner_grid < 4)
        throw std::invalid_argument("solve: invalid solver options");

    const std::size_t n = problem.sets.size();
    std::vector<std::size_t> free_agents;
    bool all_le2 = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (problem.sets[i].size() == 2) free_agents.push_back(i);
        if (problem.sets[i].size() > 2) all_le2 = false;
    }

    // Scans use a slightly relaxed quadrature; the reported value and the
    // certificate are recomputed at the problem's own tolerance.
    QuadratureConfig scan_quad = problem.quad;
    scan_quad.rel_tol = std::max(problem.quad.rel_tol, 1e-7);
    Evaluator eval{problem, scan_quad, 64};
    Evaluator final_eval{problem, problem.quad, 256};

    MinMaxSolution sol;
    sol.weights = pinned_weights(problem);
    sol.convergence.objective_history.clear();

    auto record = [&sol](double v) { sol.convergence.objective_history.push_back(v); };

    if (free_agents.empty() && all_le2) {
        // Every set is a singleton: nothing to optimize.
        sol.value = final_eval(sol.weights);
        record(sol.value);
        auto cert = gap_certificate(problem, sol.weights);
        sol.convergence =
            SolverConvergence{0, cert.gap,
                              cert.gap <= opts.gap_tol * std::max(1.0, std::abs(sol.value)),
                              sol.convergence.objective_history};
    } else if (all_le2 && free_agents.size() <= 3) {
        // Nested golden-section scan over the free agents' mixing weights
        // (lambda = weight on generator 0), then cyclic coordinate polish.
        std::vector<double> lambda(free_agents.size(), 0.5);
        std::vector<double> best_lambda = lambda;
        double best_value = -std::numeric_limits<double>::infinity();

        auto assemble = [&](const std::vector<double>& lam) {
            auto w = pinned_weights(problem);
            for (std::size_t j = 0; j < free_agents.size(); ++j)
                w[free_agents[j]] = {lam[j], 1.0 - lam[j]};
            return w;
        };
        auto eval_leaf = [&](const std::vector<double>& lam) {
            double v = eval(assemble(lam));
            if (v > best_value) {
                best_value = v;
                best_lambda = lam;
                record(v);
            }
            return v;
        };

        int scan_iters = std::min(opts.inner_grid, golden_iters_for(3e-6));
        std::function<double(std::size_t)> scan_level = [&](std::size_t level) -> double {
            if (level == free_agents.size()) return eval_leaf(lambda);
            auto along = [&](double lam_l) {
                lambda[level] = lam_l;
                return scan_level(level + 1);
            };
            return golden_max(along, 0.0, 1.0, scan_iters, 3e-6).value;
        };
        scan_level(0);

        int polish_iters = std::min(opts.inner_grid, golden_iters_for(1e-9));
        for (int round = 0; round < 2; ++round) {
            for (std::size_t j = 0; j < free_agents.size(); ++j) {
                lambda = best_lambda;
                auto along = [&](double lam_j) {
                    lambda[j] = lam_j;
                    return eval_leaf(lambda);
                };
                golden_max(along, 0.0, 1.0, polish_iters, 1e-9);
            }
        }

        sol.weights = assemble(best_lambda);
        sol.value = final_eval(sol.weights);
        auto cert = gap_certificate(problem, sol.weights);
        sol.convergence = SolverConvergence{
            static_cast<int>(eval.evals), cert.gap,
            cert.gap <= opts.gap_tol * std::max(1.0, std::abs(sol.value)),
            sol.convergence.objective_history};
    } else {
        // Conditional-gradient ascent from the uniform weights.
        double f = eval(sol.weights);
        record(f);
        double gap = std::numeric_limits<double>::infinity();
        int steps = 0;
        bool converged = false;
        int line_iters = std::min(opts.inner_grid, golden_iters_for(1e-9));
        while (steps < opts.max_iters) {
            auto cert = gap_certificate(problem, sol.weights);
            gap = cert.gap;
            if (gap <= opts.gap_tol * std::max(1.0, std::abs(f))) {
                converged = true;
                break;
            }
            auto along = [&](double gamma) {
                auto w = sol.weights;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t k = 0; k < w[i].size(); ++k)
                        w[i][k] += gamma * (cert.vertex[i][k] - w[i][k]);
                return eval(w);
            };
            LinePoint lp = golden_max(along, 0.0, 1.0, line_iters, 1e-9);
            ++steps;
            if (lp.value <= f || lp.x == 0.0) break; // stalled at numerical resolution
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < sol.weights[i].size(); ++k)
                    sol.weights[i][k] += lp.x * (cert.vertex[i][k] - sol.weights[i][k]);
            f = lp.value;
            record(f);
        }
        sol.value = final_eval(sol.weights);
        auto cert = gap_certificate(problem, sol.weights);
        sol.convergence = SolverConvergence{
            steps, cert.gap,
            converged ||
                cert.gap <= opts.gap_tol * std::max(1.0, std::abs(sol.value)),
            sol.convergence.objective_history};
    }

    sol.optimal_distortions.clear();
    sol.optimal_distortions.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        sol.optimal_distortions.push_back(problem.sets[i].mix(sol.weights[i]));
    return sol;
}

} // namespace riskshare
