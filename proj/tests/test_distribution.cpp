#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskshare/distribution.hpp"
#include "riskshare/normal.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using riskshare::RiskDistribution;

TEST_CASE("gamma survival matches the closed form for shape 2") {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    CHECK(S.survival(0.0) == 1.0);
    // (1 + x/theta) e^{-x/theta} at x = 20: 3 e^{-2}.
    CHECK(S.survival(20.0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(S.survival(50.0) == doctest::Approx(6.0 * std::exp(-5.0)).epsilon(1e-12));
    CHECK(S.survival(-1.0) == 1.0);
    CHECK(S.survival(S.essential_sup()) == 0.0);
}

TEST_CASE("discrete survival counts mass strictly above x") {
    auto S = RiskDistribution::discrete({0.0, 10.0}, {0.5, 0.5});
    CHECK(S.survival(5.0) == 0.5);
    CHECK(S.survival(-1.0) == 1.0);
    CHECK(S.survival(0.0) == 0.5);
    CHECK(S.survival(10.0) == 0.0);
    CHECK(S.quantile(0.75) == 10.0);
    CHECK(S.quantile(0.5) == 0.0);
    CHECK(S.quantile(0.500001) == 10.0);
}

TEST_CASE("uniform quantile is the identity transform") {
    auto S = RiskDistribution::uniform(0.0, 1.0);
    CHECK(S.quantile(0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(S.essential_inf() == 0.0);
    CHECK(S.essential_sup() == 1.0);
    auto wide = RiskDistribution::uniform(-1.0, 3.0);
    CHECK(wide.essential_inf() == -1.0);
    CHECK(wide.essential_sup() == 3.0);
    CHECK(wide.survival(1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("empirical law uses the order-statistic quantile") {
    auto S = RiskDistribution::empirical({4.0, 2.0, 3.0, 1.0});
    CHECK(S.quantile(0.5) == 2.0);
    CHECK(S.quantile(0.25) == 1.0);
    CHECK(S.quantile(0.251) == 2.0);
    CHECK(S.quantile(0.75) == 3.0);
    CHECK(S.quantile(0.9) == 4.0);

    auto dup = RiskDistribution::empirical({5.0, 7.0, 7.0, 9.0});
    CHECK(dup.essential_inf() == 5.0);
    CHECK(dup.essential_sup() == 9.0);
    REQUIRE(dup.atoms().size() == 3);
    CHECK(dup.atoms()[1] == 7.0);
    CHECK(dup.survival(5.0) == 0.75);
    CHECK(dup.survival(7.0) == 0.25);
}

TEST_CASE("empirical survival equals exact counting") {
    std::vector<double> samples = {3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
    auto S = RiskDistribution::empirical(samples);
    for (double x : {0.5, 1.0, 2.5, 4.0, 8.9, 9.0}) {
        int above = 0;
        for (double s : samples)
            if (s > x) ++above;
        CHECK(S.survival(x) == static_cast<double>(above) / 8.0);
    }
}

TEST_CASE("gamma essential bounds follow the truncation policy") {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    CHECK(S.essential_inf() == 0.0);
    // survival at the truncation point is the truncation mass.
    CHECK(riskshare::regularized_gamma_q(2.0, S.essential_sup() / 10.0) ==
          doctest::Approx(1e-9).epsilon(1e-3));
    auto coarse = RiskDistribution::gamma(2.0, 10.0, 1e-3);
    CHECK(coarse.essential_sup() < S.essential_sup());
    CHECK(riskshare::regularized_gamma_q(2.0, coarse.essential_sup() / 10.0) ==
          doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("survival and quantile round trip on continuous families") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    auto logn = RiskDistribution::lognormal(1.0, 0.5);
    auto uni = RiskDistribution::uniform(-2.0, 7.0);
    for (const auto& dist : {gam, logn, uni}) {
        for (int k = 1; k <= 40; ++k) {
            double p = 0.001 + (0.999 - 0.001) * k / 41.0;
            CHECK(dist.survival(dist.quantile(p)) == doctest::Approx(1.0 - p).epsilon(1e-8));
        }
    }
}

TEST_CASE("lognormal matches its closed forms") {
    auto S = RiskDistribution::lognormal(1.0, 0.5);
    CHECK(S.survival(std::exp(1.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(S.quantile(0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
    CHECK(S.essential_sup() ==
          doctest::Approx(std::exp(1.0 + 0.5 * riskshare::norm_quantile(1.0 - 1e-9)))
              .epsilon(1e-9));
    CHECK(S.essential_inf() == 0.0);
}

TEST_CASE("regularized upper incomplete gamma agrees with independent forms") {
    // Q(1/2, x) = erfc(sqrt(x)).
    for (double x : {0.04, 0.25, 1.21, 4.0, 9.0})
        CHECK(riskshare::regularized_gamma_q(0.5, x) ==
              doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
    // Q(2, x) = (1 + x) e^{-x}.
    for (double x : {0.1, 1.0, 2.0, 7.5})
        CHECK(riskshare::regularized_gamma_q(2.0, x) ==
              doctest::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-12));
    // Non-integer shape near an integer stays continuous.
    CHECK(riskshare::regularized_gamma_q(2.0 + 1e-9, 2.0) ==
          doctest::Approx(riskshare::regularized_gamma_q(2.0, 2.0)).epsilon(1e-7));
    CHECK(riskshare::regularized_gamma_q(3.0, 0.0) == 1.0);
}

TEST_CASE("quantile rejects probabilities outside (0,1)") {
    auto S = RiskDistribution::gamma(2.0, 10.0);
    CHECK_THROWS_AS(static_cast<void>(S.quantile(0.0)), std::domain_error);
    CHECK_THROWS_AS(static_cast<void>(S.quantile(1.0)), std::domain_error);
    CHECK_THROWS_AS(static_cast<void>(S.quantile(-0.5)), std::domain_error);
}

TEST_CASE("construction validates parameters") {
    CHECK_THROWS_AS(RiskDistribution::gamma(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::gamma(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::gamma(2.0, 10.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::lognormal(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::uniform(2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::empirical({}), std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::discrete({1.0, 1.0}, {0.5, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::discrete({1.0, 2.0}, {0.5, 0.6}),
                    std::invalid_argument);
    CHECK_THROWS_AS(RiskDistribution::discrete({1.0, 2.0}, {1.0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("density is exposed only where it exists") {
    auto gam = RiskDistribution::gamma(2.0, 10.0);
    CHECK(gam.has_density());
    // Gamma(2, 10) density: x e^{-x/10} / 100.
    CHECK(gam.density(20.0) == doctest::Approx(20.0 * std::exp(-2.0) / 100.0).epsilon(1e-12));
    auto atom = RiskDistribution::discrete({1.0}, {1.0});
    CHECK_FALSE(atom.has_density());
    CHECK(atom.has_atoms());
    CHECK_THROWS_AS(static_cast<void>(atom.density(1.0)), std::logic_error);
}

TEST_CASE("inverse normal round trips against the normal cdf") {
    for (int k = -80; k <= 80; ++k) {
        double z = k / 10.0;
        double p = riskshare::norm_cdf(z);
        // Above z = 5 rounding p to the doubles near 1 already moves the
        // recoverable z by up to 2^-53 / pdf(z); allow the representation
        // error of p itself, nothing more.
        double allowance =
            z > 5.0 ? std::ldexp(1.0, -52) / riskshare::norm_pdf(z) : 0.0;
        CHECK(std::abs(riskshare::norm_quantile(p) - z) <= 1e-9 + allowance);
    }
    CHECK(riskshare::norm_cdf(0.0) == 0.5);
    CHECK(std::abs(riskshare::norm_quantile(0.5)) <= 1e-12);
    CHECK_THROWS_AS(riskshare::norm_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(riskshare::norm_quantile(1.0), std::domain_error);
}
