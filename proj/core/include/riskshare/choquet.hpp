#pragma once

#include "riskshare/distortion.hpp"
#include "riskshare/distribution.hpp"
#include "riskshare/quadrature.hpp"
#include "riskshare/retention.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace riskshare {

/// Integral of T(P(S > t)) over [a, b]. Atomic laws are summed exactly over
/// the constancy cells of the survival function; analytic laws use adaptive
/// quadrature with T's kinks pulled back through the quantile and seeded as
/// cell edges.
double survival_distortion_integral(const RiskDistribution& dist,
                                    const DistortionFunction& T, double a, double b,
                                    const QuadratureConfig& quad = {});

/// Integral of min_i f_i(P(S > t)) over [a, b], same exact/adaptive split.
/// Arg-min switch points are located by an owner scan (scan_grid cells) plus
/// bisection on the pairwise difference and seeded as cell edges.
double survival_min_integral(const RiskDistribution& dist,
                             std::span<const DistortionFunction> funcs, double a,
                             double b, const QuadratureConfig& quad = {},
                             int scan_grid = 64);

/// Partition of [a, b] into maximal cells on which the set of indices
/// attaining min_i f_i(P(S > t)) (within tie_tol) is constant. Members are
/// ascending per cell. Exact for atomic laws; scan plus bisection to an
/// x-tolerance of 1e-8 * (b - a) otherwise, with cells shorter than that
/// tolerance merged away.
struct MinAttainmentPartition {
    std::vector<double> edges;                     // a = e_0 < ... < e_m = b
    std::vector<std::vector<std::size_t>> members; // size m
};
MinAttainmentPartition min_attainment_partition(const RiskDistribution& dist,
                                                std::span<const DistortionFunction> funcs,
                                                double a, double b, double tie_tol,
                                                int scan_grid = 4096);

/// Choquet integral of the (truncated) law under T:
/// essential_inf + integral of T(survival) over the essential bounds.
/// Identity recovers the mean; a one-atom law returns the constant.
double choquet_integral(const RiskDistribution& dist, const DistortionFunction& T,
                        const QuadratureConfig& quad = {});

struct CoherentRisk {
    double value;
    std::size_t argmax_index; // lowest index on ties
};

/// Upper Choquet envelope over the set's generators. The hull maximum of a
/// linear functional sits at a generator, so scanning them is exact.
CoherentRisk coherent_risk(const RiskDistribution& dist, const DistortionSet& set,
                           const QuadratureConfig& quad = {});

/// Integral of T(P(S > s_lower + x)) dg(x): the Choquet risk of the
/// retention g(S - s_lower) under a single distortion. s_lower defaults to
/// essential_inf(dist) and must not exceed it.
double retention_integral(const RiskDistribution& dist, const RetentionFunction& g,
                          const DistortionFunction& T, const QuadratureConfig& quad = {},
                          std::optional<double> s_lower = {});

/// Choquet risk of g(S - s_lower) under the set's upper envelope:
/// the maximum of retention_integral over the generators.
double risk_of_retention(const RiskDistribution& dist, const RetentionFunction& g,
                         const DistortionSet& set, const QuadratureConfig& quad = {},
                         std::optional<double> s_lower = {});

} // namespace riskshare
