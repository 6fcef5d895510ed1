/// Acceptance suite: one line per criterion, nonzero exit on any failure.
/// Every tolerance is pinned here, next to the check it guards. An optional
/// argv[1] runs a single criterion by number.

#include "riskshare/allocation.hpp"
#include "riskshare/choquet.hpp"
#include "riskshare/market.hpp"
#include "riskshare/oracle.hpp"
#include "riskshare/pipeline.hpp"
#include "riskshare/quadrature.hpp"
#include "riskshare/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

using namespace riskshare;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int g_failures = 0;

void report(int number, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number, name,
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// Independent oracles.

/// Recursive adaptive Simpson; deliberately separate from the library's
/// Gauss-Kronrod integrator so the quantile-side checks are independent.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (!(b > a)) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// ES from the quantile side: (1/alpha) * integral_0^alpha of the upper
/// quantile at 1 - u. Split at the truncation kink of the stored law.
double quantile_side_es(const RiskDistribution& dist, double alpha) {
    auto var = [&](double u) { return dist.quantile(1.0 - u); };
    double lo = 1e-12, kink = 1e-9;
    double acc = adaptive_simpson(var, lo, std::min(kink, alpha), 1e-12);
    if (alpha > kink) acc += adaptive_simpson(var, kink, alpha, 1e-10);
    return acc / alpha;
}

// ---------------------------------------------------------------------------
// Randomized instance generators (fixed seeds; all draws via one engine).

struct AtomSample {
    std::vector<double> atoms;
    std::vector<double> probs;
};

AtomSample random_atoms(std::mt19937& rng, int min_atoms, int max_atoms) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int m = min_atoms +
            static_cast<int>(unit(rng) * static_cast<double>(max_atoms - min_atoms + 1));
    m = std::min(m, max_atoms);
    AtomSample out;
    double x = 3.0 * unit(rng);
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        out.atoms.push_back(x);
        x += 0.2 + 3.0 * unit(rng);
        out.probs.push_back(0.05 + unit(rng));
        total += out.probs.back();
    }
    for (double& p : out.probs) p /= total;
    return out;
}

RiskDistribution random_discrete(std::mt19937& rng, int min_atoms, int max_atoms) {
    AtomSample s = random_atoms(rng, min_atoms, max_atoms);
    return RiskDistribution::discrete(s.atoms, s.probs);
}

DistortionFunction random_generator(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (static_cast<int>(unit(rng) * 4.0) % 4) {
    case 0: return DistortionFunction::expected_shortfall(0.05 + 0.9 * unit(rng));
    case 1:
        return DistortionFunction::power_tail(0.1 + 0.8 * unit(rng),
                                              0.3 + 0.65 * unit(rng));
    case 2: return DistortionFunction::wang(0.2 + 2.0 * unit(rng));
    default: return DistortionFunction::identity();
    }
}

DistortionSet random_set(std::mt19937& rng, int generators, const std::string& label) {
    std::vector<DistortionFunction> gens;
    for (int k = 0; k < generators; ++k) gens.push_back(random_generator(rng));
    return DistortionSet(std::move(gens), label);
}

// ---------------------------------------------------------------------------
// Shared state: criterion 2 partitions the market criterion 1 solved.

struct GammaMarket {
    std::optional<MinMaxProblem> problem;
    MinMaxSolution solution;
    double solve_seconds = 0.0;
    bool ready = false;
};

void ensure_gamma_market(GammaMarket& state) {
    if (state.ready) return;
    auto S = RiskDistribution::gamma(2.0, 10.0);
    auto t_hat = DistortionFunction::expected_shortfall(0.025);
    std::vector<DistortionSet> sets = {
        DistortionSet({DistortionFunction::expected_shortfall(0.01)}, "agent1"),
        DistortionSet({t_hat, DistortionFunction::power_tail(0.05, 0.3)}, "agent2"),
        DistortionSet({t_hat, DistortionFunction::wang(2.8)}, "agent3"),
    };
    state.problem.emplace(S, std::move(sets));
    auto t0 = Clock::now();
    state.solution = solve(*state.problem);
    state.solve_seconds = seconds_since(t0);
    state.ready = true;
}

// ---------------------------------------------------------------------------
// Criteria.

bool criterion1(GammaMarket& state, std::string& detail) {
    ensure_gamma_market(state);
    const auto& w = state.solution.weights;
    double w3 = w[2][0]; // weight the most averse agent puts on the common cap
    double b1 = 0.0;
    for (double v : w[0]) b1 = std::min(v, 1.0 - v);
    double b2 = std::min(w[1][0], w[1][1]);
    bool ok = state.solution.convergence.converged && std::abs(w3 - 0.2269) <= 0.005 &&
              b1 <= 1e-3 && b2 <= 1e-3 && state.solve_seconds < 60.0;
    detail = fmt("cap weight %.6f vs 0.2269 +/- 0.005, boundary gaps %.1e and %.1e, "
                 "solved in %.2f s",
                 w3, b1, b2, state.solve_seconds);
    return ok;
}

bool criterion2(GammaMarket& state, std::string& detail) {
    ensure_gamma_market(state);
    auto t0 = Clock::now();
    LayerStructure raw = layer_structure(state.solution, *state.problem);

    // Intervals narrower than the breakpoint tolerance cannot be told apart
    // from their neighbors at the stated resolution; absorb them before the
    // comparison. The raw partition is kept as computed.
    const double tol = 0.1;
    std::vector<double> edges{raw.breakpoints.front()};
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t j = 0; j < raw.layers.size(); ++j) {
        if (raw.breakpoints[j + 1] - raw.breakpoints[j] < tol) continue;
        if (!members.empty() && members.back() == raw.layers[j]) {
            edges.back() = raw.breakpoints[j + 1];
        } else {
            members.push_back(raw.layers[j]);
            edges.push_back(raw.breakpoints[j + 1]);
        }
    }
    edges.back() = raw.breakpoints.back();
    double secs = seconds_since(t0);

    const std::vector<std::vector<std::size_t>> expected = {{2}, {1}, {2}, {0}};
    const std::vector<double> targets = {53.302, 68.164, 74.287};
    bool ok = members == expected && edges.size() == 5;
    if (ok)
        for (std::size_t k = 0; k < 3; ++k)
            ok = ok && std::abs(edges[k + 1] - targets[k]) <= tol;
    ok = ok && secs < 10.0;
    if (edges.size() == 5)
        detail = fmt("breakpoints %.3f / %.3f / %.3f vs 53.302 / 68.164 / 74.287 "
                     "+/- 0.1, owners 3,2,3,1, %.2f s",
                     edges[1], edges[2], edges[3], secs);
    else
        detail = fmt("unexpected layer count %zu", members.size());
    return ok;
}

bool criterion3(std::string& detail) {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    double mean = choquet_integral(S, DistortionFunction::identity());
    double second = integrate([&](double x) { return 2.0 * x * S.survival(x); }, 0.0,
                              S.essential_sup(), {});
    double variance = second - mean * mean;
    double mean_err = std::abs(mean - 20.0) / 20.0;
    double var_err = std::abs(variance - 200.0) / 200.0;
    bool ok = mean_err <= 1e-3 && var_err <= 1e-3;
    detail = fmt("mean %.6f vs 20 (rel %.1e), variance %.4f vs 200 (rel %.1e), "
                 "tolerance 1e-3",
                 mean, mean_err, variance, var_err);
    return ok;
}

bool criterion4(std::string& detail) {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    double worst = 0.0;
    for (double alpha : {0.01, 0.025, 0.05}) {
        double choquet_side =
            choquet_integral(S, DistortionFunction::expected_shortfall(alpha));
        double quantile_side = quantile_side_es(S, alpha);
        worst = std::max(worst,
                         std::abs(choquet_side - quantile_side) / quantile_side);
    }
    bool ok = worst <= 1e-5;
    detail = fmt("worst relative gap %.2e across alpha 0.01/0.025/0.05, tolerance 1e-5",
                 worst);
    return ok;
}

bool criterion5(std::string& detail) {
    auto t0 = Clock::now();
    std::mt19937 rng(20260814);

    double worst_gap = 0.0;
    for (int t = 0; t < 20; ++t) {
        int n = t < 8 ? 2 : 3;
        int free_agents = t < 16 ? (t % 3 == 0 ? 1 : 2) : 3;
        free_agents = std::min(free_agents, n);

        auto S = random_discrete(rng, 3, 8);
        std::vector<DistortionSet> sets;
        for (int i = 0; i < n; ++i)
            sets.push_back(random_set(rng, i < free_agents ? 2 : 1,
                                      "agent" + std::to_string(i)));

        double step = 1e-3;
        if (free_agents > 0) {
            double per_axis =
                std::floor(std::pow(1e7, 1.0 / static_cast<double>(free_agents)));
            step = std::max(step, 1.0 / (per_axis - 1.0));
        }
        DiscreteInstance instance(S, sets, step);
        auto grid = brute_force_minmax(instance);
        auto sol = solve(MinMaxProblem(S, sets));

        double scale = std::max(1.0, S.essential_sup() - S.essential_inf());
        worst_gap = std::max(worst_gap, std::abs(sol.value - grid.value) / scale);
    }

    double worst_layer = 0.0;
    for (int t = 0; t < 10; ++t) {
        auto S = random_discrete(rng, 3, 7);
        std::vector<DistortionFunction> funcs = {random_generator(rng),
                                                 random_generator(rng)};
        DiscreteInstance instance(
            S, {DistortionSet({funcs[0]}, "a"), DistortionSet({funcs[1]}, "b")});
        auto result = brute_force_layer_allocations(instance, 4);
        double min_integral =
            survival_min_integral(S, funcs, S.essential_inf(), S.essential_sup());
        worst_layer = std::max(worst_layer, std::abs(result.min_total - min_integral));
    }

    double secs = seconds_since(t0);
    bool ok = worst_gap <= 2e-3 && worst_layer <= 1e-12 && secs < 60.0;
    detail = fmt("20 instances, worst scaled solver-grid gap %.2e (tolerance 2e-3); "
                 "10 enumerations, worst min-vs-integral gap %.2e (tolerance 1e-12); "
                 "%.1f s",
                 worst_gap, worst_layer, secs);
    return ok;
}

bool criterion6(std::string& detail) {
    std::mt19937 rng(424242);
    double worst_spread = 0.0, worst_match = 0.0;
    for (int t = 0; t < 10; ++t) {
        int n = 2 + (t % 2);
        auto S = random_discrete(rng, 3, n == 2 ? 7 : 5);
        auto T = random_generator(rng);
        std::vector<DistortionSet> sets;
        for (int i = 0; i < n; ++i)
            sets.push_back(DistortionSet({T}, "agent" + std::to_string(i)));
        DiscreteInstance instance(S, sets);
        auto result = brute_force_layer_allocations(instance, 3);
        worst_spread = std::max(worst_spread, result.max_total - result.min_total);
        double rho = choquet_integral(S, T);
        worst_match = std::max(
            worst_match, std::abs(result.min_total + S.essential_inf() - rho));
    }
    bool ok = worst_spread <= 1e-12 && worst_match <= 1e-12;
    detail = fmt("worst total spread %.2e, worst deviation from the aggregate risk "
                 "%.2e, tolerance 1e-12",
                 worst_spread, worst_match);
    return ok;
}

bool criterion7(std::string& detail) {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 12; ++t) {
        AtomSample base = random_atoms(rng, 2, 8);
        auto S = RiskDistribution::discrete(base.atoms, base.probs);
        int gens = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
        auto set = random_set(rng, gens, "axioms");
        double rho = coherent_risk(S, set).value;

        for (double lambda : {0.5, 2.0}) {
            std::vector<double> scaled(base.atoms);
            for (double& a : scaled) a *= lambda;
            double rho_l =
                coherent_risk(RiskDistribution::discrete(scaled, base.probs), set).value;
            worst = std::max(worst, std::abs(rho_l - lambda * rho) /
                                        std::max(1.0, std::abs(lambda * rho)));
        }

        double shift = 3.25;
        std::vector<double> shifted(base.atoms);
        for (double& a : shifted) a += shift;
        double rho_c =
            coherent_risk(RiskDistribution::discrete(shifted, base.probs), set).value;
        worst = std::max(worst,
                         std::abs(rho_c - (rho + shift)) / std::max(1.0, std::abs(rho)));

        std::vector<double> larger(base.atoms);
        double bump = 0.0;
        for (double& a : larger) {
            bump += unit(rng);
            a += bump;
        }
        double rho_up =
            coherent_risk(RiskDistribution::discrete(larger, base.probs), set).value;
        worst = std::max(worst, std::max(0.0, rho - rho_up));

        // Comonotone additivity of a single distortion: complementary
        // retentions recompose the aggregate risk exactly.
        const auto& T = set.generators()[0];
        double lo = S.essential_inf(), hi = S.essential_sup();
        double span = hi - lo;
        std::vector<double> bps = {0.0, span * (0.3 + 0.4 * unit(rng)), span};
        std::vector<double> h1 = {unit(rng), unit(rng)};
        std::vector<double> h2 = {1.0 - h1[0], 1.0 - h1[1]};
        double split = retention_integral(S, RetentionFunction(bps, h1), T) +
                       retention_integral(S, RetentionFunction(bps, h2), T);
        double whole = survival_distortion_integral(S, T, lo, hi);
        worst = std::max(worst, std::abs(split - whole) / std::max(1.0, whole));
    }
    bool ok = worst <= 1e-9;
    detail = fmt("12 markets: worst scaled defect %.2e across homogeneity (0.5, 2), "
                 "translation, monotonicity, comonotone additivity; tolerance 1e-9",
                 worst);
    return ok;
}

bool criterion8(std::string& detail) {
    std::string config_path = std::string(RISKSHARE_SOURCE_DIR) +
                              "/configs/gamma_three_agents.json";
    MarketConfig cfg = load_market_config(config_path);
    auto out_dir = std::filesystem::temp_directory_path() / "riskshare_acceptance";
    RunOutcome out = run_pipeline(cfg, out_dir, false, false);

    double expected = out.solution.value + out.profile.s_lower;
    double total_rel = std::abs(out.report.total_final_risk - expected) /
                       std::max(1.0, std::abs(expected));

    // A deliberately wrong profile, everything on the first agent, must be
    // flagged with a strictly positive slope-placement residual.
    std::vector<DistortionSet> sets;
    for (const auto& a : cfg.agents) sets.push_back(a.set);
    MinMaxProblem problem(cfg.aggregate, std::move(sets), cfg.quad);
    RetentionProfile bad;
    bad.s_lower = problem.lower_bound_s;
    bad.g.push_back(RetentionFunction::identity(problem.span()));
    for (std::size_t i = 1; i < cfg.agents.size(); ++i)
        bad.g.push_back(RetentionFunction::zero());
    bad.c.assign(cfg.agents.size(), 0.0);
    auto bad_report = verify(bad, problem, out.solution, initial_risks(cfg));

    bool ok = out.exit_code == 0 && total_rel <= 1e-3 &&
              out.report.verification.ir_all && out.report.verification.all_pass() &&
              bad_report.layer_violation > 0.0 && !bad_report.slopes_in_layers;
    detail = fmt("total risk %.6f vs objective %.6f (rel %.1e, tolerance 1e-3), "
                 "all agents rational %s, planted violation %.3f > 0",
                 out.report.total_final_risk, expected, total_rel,
                 out.report.verification.ir_all ? "yes" : "no",
                 bad_report.layer_violation);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    GammaMarket state;
    struct Entry {
        int number;
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Entry> criteria = {
        {1, "optimal mixing weights on the gamma market",
         [&](std::string& d) { return criterion1(state, d); }},
        {2, "layer partition of the optimal retentions",
         [&](std::string& d) { return criterion2(state, d); }},
        {3, "aggregate distribution moments", criterion3},
        {4, "expected shortfall consistency", criterion4},
        {5, "solver agrees with exhaustive grids", criterion5},
        {6, "identical preferences level all layer totals", criterion6},
        {7, "coherence axioms on random markets", criterion7},
        {8, "end-to-end pipeline consistency", criterion8},
    };

    for (const auto& entry : criteria) {
        if (only && entry.number != only) continue;
        std::string detail;
        bool ok;
        try {
            ok = entry.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = fmt("unexpected exception: %s", e.what());
        }
        report(entry.number, entry.name, ok, detail);
    }

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
