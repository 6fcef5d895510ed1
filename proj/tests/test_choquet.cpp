#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskshare/choquet.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

using riskshare::choquet_integral;
using riskshare::coherent_risk;
using riskshare::DistortionFunction;
using riskshare::DistortionSet;
using riskshare::min_attainment_partition;
using riskshare::retention_integral;
using riskshare::RetentionFunction;
using riskshare::risk_of_retention;
using riskshare::RiskDistribution;
using riskshare::survival_distortion_integral;
using riskshare::survival_min_integral;

namespace {

/// Recursive adaptive Simpson, deliberately independent of the library's
/// Gauss-Kronrod integrator so quantile-side cross-checks are a real oracle.
double simpson(const std::function<double(double)>& f, double a, double b, double fa,
               double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// ES_alpha from the quantile side: (1/alpha) * integral_0^alpha VaR_u du,
/// VaR_u = quantile(1 - u).
double quantile_side_es(const RiskDistribution& dist, double alpha) {
    auto var = [&](double u) { return dist.quantile(1.0 - u); };
    return adaptive_simpson(var, 1e-12, alpha, 1e-11) / alpha;
}

} // namespace

TEST_CASE("choquet integral of a two-atom law under identity is the mean") {
    auto S = RiskDistribution::discrete({0.0, 10.0}, {0.5, 0.5});
    CHECK(choquet_integral(S, DistortionFunction::identity()) == 5.0);
}

TEST_CASE("a constant law returns the constant under any distortion") {
    auto S = RiskDistribution::discrete({7.25}, {1.0});
    CHECK(choquet_integral(S, DistortionFunction::identity()) == 7.25);
    CHECK(choquet_integral(S, DistortionFunction::expected_shortfall(0.01)) == 7.25);
    CHECK(choquet_integral(S, DistortionFunction::wang(2.8)) == 7.25);
}

TEST_CASE("negative atoms exercise the lower branch of the integral") {
    auto S = RiskDistribution::discrete({-5.0, 5.0}, {0.5, 0.5});
    CHECK(choquet_integral(S, DistortionFunction::identity()) == 0.0);
    // ES at level 0.5 of a symmetric two-point law is the top atom.
    CHECK(choquet_integral(S, DistortionFunction::expected_shortfall(0.5)) == 5.0);
}

TEST_CASE("gamma expected shortfall matches the quantile-side oracle") {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    auto es = DistortionFunction::expected_shortfall(0.025);
    double choquet_side = choquet_integral(S, es);
    double quantile_side = quantile_side_es(S, 0.025);
    CHECK(choquet_side == doctest::Approx(quantile_side).epsilon(1e-5));
}

TEST_CASE("coherent risk picks the dominating generator") {
    auto S = RiskDistribution::discrete({0.0, 10.0}, {0.5, 0.5});
    auto singleton = coherent_risk(S, DistortionSet({DistortionFunction::identity()}, "id"));
    CHECK(singleton.value == 5.0);
    CHECK(singleton.argmax_index == 0);

    // ES at 1% dominates ES at 2.5% pointwise, so it attains the envelope.
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    DistortionSet set({DistortionFunction::expected_shortfall(0.025),
                       DistortionFunction::expected_shortfall(0.01)},
                      "pair");
    auto risk = coherent_risk(gam, set);
    CHECK(risk.argmax_index == 1);
    CHECK(risk.value ==
          doctest::Approx(choquet_integral(gam, set.generators()[1])).epsilon(1e-12));
}

TEST_CASE("two-atom envelope computed by hand, including the tie") {
    DistortionSet set({DistortionFunction::expected_shortfall(0.025),
                       DistortionFunction::power_tail(0.05, 0.3)},
                      "pair");
    // Tail probability 0.1 saturates both distortions: tie at 1, lowest
    // index wins.
    auto tie = coherent_risk(RiskDistribution::discrete({0.0, 1.0}, {0.9, 0.1}), set);
    CHECK(tie.value == 1.0);
    CHECK(tie.argmax_index == 0);

    // Tail probability 0.01: T_hat gives 0.4, the power tail gives
    // 0.2^0.3 = 0.617..., so the power tail wins.
    auto risk = coherent_risk(RiskDistribution::discrete({0.0, 1.0}, {0.99, 0.01}), set);
    CHECK(risk.argmax_index == 1);
    CHECK(risk.value == doctest::Approx(0.6170338627200096).epsilon(1e-13));
}

TEST_CASE("full retention reproduces the distortion risk of the aggregate") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    double span = gam.essential_sup() - gam.essential_inf();
    auto g = RetentionFunction::identity(span);

    DistortionSet id_set({DistortionFunction::identity()}, "id");
    double mean = choquet_integral(gam, DistortionFunction::identity());
    CHECK(risk_of_retention(gam, g, id_set) == doctest::Approx(mean).epsilon(1e-9));

    DistortionSet es_set({DistortionFunction::expected_shortfall(0.01)}, "es1");
    CHECK(risk_of_retention(gam, g, es_set) ==
          doctest::Approx(quantile_side_es(gam, 0.01)).epsilon(1e-5));
}

TEST_CASE("zero retention carries zero risk") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    DistortionSet set({DistortionFunction::expected_shortfall(0.01)}, "es1");
    CHECK(risk_of_retention(gam, RetentionFunction::zero(), set) == 0.0);
}

TEST_CASE("complementary retentions are comonotone additive") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        // Random atomic law on [0, 20].
        int m = 2 + static_cast<int>(unit(rng) * 6);
        std::vector<double> atoms, probs;
        double x = 0.0, total = 0.0;
        for (int j = 0; j < m; ++j) {
            x += 0.5 + 19.5 * unit(rng) / m;
            atoms.push_back(x);
            probs.push_back(0.05 + unit(rng));
            total += probs.back();
        }
        for (auto& p : probs) p /= total;
        probs.back() = 1.0 - std::accumulate(probs.begin(), probs.end() - 1, 0.0);
        auto S = RiskDistribution::discrete(atoms, probs);

        double span = S.essential_sup() - S.essential_inf();
        std::vector<double> bps = {0.0, span / 3.0, span};
        std::vector<double> h1 = {unit(rng), unit(rng)};
        std::vector<double> h2 = {1.0 - h1[0], 1.0 - h1[1]};
        RetentionFunction g1(bps, h1), g2(bps, h2);

        auto T = DistortionFunction::power_tail(0.3, 0.5);
        double whole = survival_distortion_integral(S, T, S.essential_inf(),
                                                    S.essential_sup());
        double split = retention_integral(S, g1, T) + retention_integral(S, g2, T);
        CHECK(split == doctest::Approx(whole).epsilon(1e-12));
    }
}

TEST_CASE("minimum integral collapses to the dominated generator") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    std::vector<DistortionFunction> funcs = {DistortionFunction::expected_shortfall(0.01),
                                             DistortionFunction::expected_shortfall(0.025)};
    double min_int =
        survival_min_integral(gam, funcs, gam.essential_inf(), gam.essential_sup());
    double direct = survival_distortion_integral(gam, funcs[1], gam.essential_inf(),
                                                 gam.essential_sup());
    CHECK(min_int == doctest::Approx(direct).epsilon(1e-8));

    std::vector<DistortionFunction> one = {funcs[0]};
    CHECK(survival_min_integral(gam, one, 0.0, 50.0) ==
          survival_distortion_integral(gam, funcs[0], 0.0, 50.0));
}

TEST_CASE("argmin partition on an atomic law is exact") {
    // Tails after each atom: 0.02, 0.01. ES at 2.5% maps both below 1 while
    // ES at 1% saturates, so the 2.5% agent owns every cell.
    auto S = RiskDistribution::discrete({0.0, 5.0, 9.0}, {0.98, 0.01, 0.01});
    std::vector<DistortionFunction> funcs = {DistortionFunction::expected_shortfall(0.01),
                                             DistortionFunction::expected_shortfall(0.025)};
    auto part = min_attainment_partition(S, funcs, 0.0, 9.0, 1e-9);
    REQUIRE(part.edges.size() == 2);
    CHECK(part.edges.front() == 0.0);
    CHECK(part.edges.back() == 9.0);
    REQUIRE(part.members.size() == 1);
    REQUIRE(part.members[0].size() == 1);
    CHECK(part.members[0][0] == 1);
}

TEST_CASE("identical distortions tie on the whole span") {
    auto S = RiskDistribution::discrete({0.0, 4.0, 9.0}, {0.5, 0.3, 0.2});
    auto T = DistortionFunction::expected_shortfall(0.4);
    std::vector<DistortionFunction> funcs = {T, T};
    auto part = min_attainment_partition(S, funcs, 0.0, 9.0, 1e-9);
    REQUIRE(part.members.size() == 1);
    CHECK(part.members[0] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("retention integral rejects inconsistent inputs") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    auto g = RetentionFunction::identity(10.0);
    auto T = DistortionFunction::identity();
    CHECK_THROWS_AS(retention_integral(gam, g, T, {}, 5.0), std::invalid_argument);
    double span = gam.essential_sup();
    CHECK_THROWS_AS(
        retention_integral(gam, RetentionFunction::identity(span * 2.0), T),
        std::invalid_argument);
}

TEST_CASE("monotonicity in the distortion argument") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    // ES at 1% dominates ES at 2.5% dominates identity, pointwise in t.
    double id = choquet_integral(gam, DistortionFunction::identity());
    double es25 = choquet_integral(gam, DistortionFunction::expected_shortfall(0.025));
    double es1 = choquet_integral(gam, DistortionFunction::expected_shortfall(0.01));
    CHECK(id < es25);
    CHECK(es25 < es1);
}
