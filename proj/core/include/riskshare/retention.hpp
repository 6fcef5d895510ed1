#pragma once

#include <vector>

namespace riskshare {

/// Piecewise-linear retention g on [0, span]: non-decreasing, 1-Lipschitz,
/// g(0) = 0. Breakpoints start at 0 and are strictly increasing; each
/// interval carries a slope in [0, 1]. Beyond the last breakpoint g extends
/// linearly with the final slope, so sums of retentions stay feasible on
/// every prefix of the half-line.
class RetentionFunction {
  public:
    RetentionFunction(std::vector<double> breakpoints, std::vector<double> slopes);

    /// g(x) = x on [0, span].
    static RetentionFunction identity(double span);
    /// g = 0 everywhere (degenerate zero-span profile).
    static RetentionFunction zero();

    [[nodiscard]] double operator()(double x) const;
    /// Slope on the interval containing x (right-continuous; final slope
    /// beyond the last breakpoint, 0 below 0).
    [[nodiscard]] double slope_at(double x) const;

    [[nodiscard]] const std::vector<double>& breakpoints() const { return breakpoints_; }
    [[nodiscard]] const std::vector<double>& slopes() const { return slopes_; }
    [[nodiscard]] double span() const { return breakpoints_.back(); }

  private:
    std::vector<double> breakpoints_; // size m + 1, first element 0
    std::vector<double> slopes_;      // size m
    std::vector<double> values_;      // g at each breakpoint
};

} // namespace riskshare
