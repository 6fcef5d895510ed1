#include "riskshare/retention.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskshare {

namespace {
constexpr double slope_slack = 1e-12;
}

RetentionFunction::RetentionFunction(std::vector<double> breakpoints,
                                     std::vector<double> slopes)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
    if (breakpoints_.empty() || breakpoints_.front() != 0.0)
        throw std::invalid_argument("RetentionFunction: breakpoints must start at 0");
    if (slopes_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("RetentionFunction: need one slope per interval");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw std::invalid_argument("RetentionFunction: breakpoints must be increasing");
    for (double& s : slopes_) {
        if (s < -slope_slack || s > 1.0 + slope_slack)
            throw std::invalid_argument("RetentionFunction: slopes must lie in [0, 1]");
        s = std::clamp(s, 0.0, 1.0);
    }
    values_.resize(breakpoints_.size());
    values_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        values_[i + 1] = values_[i] + slopes_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
}

RetentionFunction RetentionFunction::identity(double span) {
    if (!(span > 0.0)) return zero();
    return RetentionFunction({0.0, span}, {1.0});
}

RetentionFunction RetentionFunction::zero() { return RetentionFunction({0.0}, {}); }

double RetentionFunction::operator()(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= breakpoints_.back()) {
        double tail_slope = slopes_.empty() ? 0.0 : slopes_.back();
        return values_.back() + tail_slope * (x - breakpoints_.back());
    }
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[k] + slopes_[k] * (x - breakpoints_[k]);
}

double RetentionFunction::slope_at(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= breakpoints_.back()) return slopes_.empty() ? 0.0 : slopes_.back();
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return slopes_[k];
}

} // namespace riskshare
