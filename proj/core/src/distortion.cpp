#include "riskshare/distortion.hpp"

#include "riskshare/normal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace riskshare {

namespace {

constexpr double domain_slack = 1e-12;
constexpr double concavity_tol = 1e-10;
constexpr double simplex_tol = 1e-12;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out = "[";
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(vs[i]);
    }
    out += "]";
    return out;
}

} // namespace

DistortionFunction DistortionFunction::expected_shortfall(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("expected_shortfall: alpha must lie in (0, 1]");
    return DistortionFunction(EsDistortion{alpha});
}

DistortionFunction DistortionFunction::power_tail(double alpha, double exponent) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("power_tail: alpha must lie in (0, 1]");
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw std::invalid_argument("power_tail: exponent must lie in (0, 1]");
    return DistortionFunction(PowerTailDistortion{alpha, exponent});
}

DistortionFunction DistortionFunction::wang(double shift) {
    if (!std::isfinite(shift))
        throw std::invalid_argument("wang: shift must be finite");
    return DistortionFunction(WangDistortion{shift});
}

DistortionFunction DistortionFunction::identity() {
    return DistortionFunction(IdentityDistortion{});
}

DistortionFunction DistortionFunction::piecewise_linear(std::vector<double> knots,
                                                        std::vector<double> values) {
    if (knots.size() != values.size() || knots.size() < 2)
        throw std::invalid_argument(
            "piecewise_linear: knots and values must have equal length >= 2");
    if (knots.front() != 0.0 || knots.back() != 1.0)
        throw std::invalid_argument("piecewise_linear: knots must start at 0 and end at 1");
    if (values.front() != 0.0 || values.back() != 1.0)
        throw std::invalid_argument("piecewise_linear: values must start at 0 and end at 1");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("piecewise_linear: knots must be strictly increasing");
        if (values[i] < values[i - 1])
            throw std::invalid_argument("piecewise_linear: values must be non-decreasing");
    }
    return DistortionFunction(PiecewiseLinearDistortion{std::move(knots), std::move(values)});
}

DistortionFunction DistortionFunction::mixture(std::vector<DistortionFunction> components,
                                               std::vector<double> weights) {
    if (components.empty() || components.size() != weights.size())
        throw std::invalid_argument("mixture: components and weights must match and be non-empty");
    double sum = 0.0;
    for (double w : weights) {
        if (w < -simplex_tol)
            throw std::invalid_argument("mixture: weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > simplex_tol)
        throw std::invalid_argument("mixture: weights must sum to 1");
    return DistortionFunction(MixtureDistortion{std::move(components), std::move(weights)});
}

double DistortionFunction::operator()(double t) const {
    if (t < -domain_slack || t > 1.0 + domain_slack)
        throw std::domain_error("DistortionFunction: argument outside [0, 1]");
    t = std::clamp(t, 0.0, 1.0);

    struct Eval {
        double t;
        double operator()(const EsDistortion& d) const {
            return t >= d.alpha ? 1.0 : t / d.alpha;
        }
        double operator()(const PowerTailDistortion& d) const {
            return t >= d.alpha ? 1.0 : std::pow(t / d.alpha, d.exponent);
        }
        double operator()(const WangDistortion& d) const {
            if (t <= 0.0) return 0.0;
            if (t >= 1.0) return 1.0;
            return norm_cdf(norm_quantile(t) + d.shift);
        }
        double operator()(const IdentityDistortion&) const { return t; }
        double operator()(const PiecewiseLinearDistortion& d) const {
            auto it = std::upper_bound(d.knots.begin(), d.knots.end(), t);
            if (it == d.knots.begin()) return d.values.front();
            if (it == d.knots.end()) return d.values.back();
            std::size_t hi = static_cast<std::size_t>(it - d.knots.begin());
            std::size_t lo = hi - 1;
            double u = (t - d.knots[lo]) / (d.knots[hi] - d.knots[lo]);
            return d.values[lo] + u * (d.values[hi] - d.values[lo]);
        }
        double operator()(const MixtureDistortion& d) const {
            double acc = 0.0;
            for (std::size_t i = 0; i < d.components.size(); ++i)
                acc += d.weights[i] * d.components[i](t);
            return acc;
        }
    };
    return std::visit(Eval{t}, impl_);
}

std::vector<double> DistortionFunction::kinks() const {
    struct Kinks {
        std::vector<double> operator()(const EsDistortion& d) const {
            if (d.alpha < 1.0) return {d.alpha};
            return {};
        }
        std::vector<double> operator()(const PowerTailDistortion& d) const {
            if (d.alpha < 1.0) return {d.alpha};
            return {};
        }
        std::vector<double> operator()(const WangDistortion&) const { return {}; }
        std::vector<double> operator()(const IdentityDistortion&) const { return {}; }
        std::vector<double> operator()(const PiecewiseLinearDistortion& d) const {
            return {d.knots.begin() + 1, d.knots.end() - 1};
        }
        std::vector<double> operator()(const MixtureDistortion& d) const {
            std::vector<double> all;
            for (const auto& c : d.components) {
                auto k = c.kinks();
                all.insert(all.end(), k.begin(), k.end());
            }
            return all;
        }
    };
    auto ks = std::visit(Kinks{}, impl_);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

bool DistortionFunction::is_concave(std::size_t grid_size) const {
    if (grid_size < 3)
        throw std::invalid_argument("is_concave: grid_size must be at least 3");
    const std::size_t n = grid_size;
    std::vector<double> val(n);
    for (std::size_t i = 0; i < n; ++i)
        val[i] = (*this)(static_cast<double>(i) / static_cast<double>(n - 1));

    // Midpoint concavity over every grid pair. Even-index sums reuse grid
    // values; odd sums need one off-grid evaluation.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double mid_val;
            if (((i + j) & 1u) == 0)
                mid_val = val[(i + j) / 2];
            else {
                double tm = static_cast<double>(i + j) / (2.0 * static_cast<double>(n - 1));
                mid_val = (*this)(tm);
            }
            if (mid_val < 0.5 * (val[i] + val[j]) - concavity_tol) return false;
        }
    }
    return true;
}

std::string DistortionFunction::describe() const {
    struct Desc {
        std::string operator()(const DistortionFunction::EsDistortion& d) const {
            return "es(alpha=" + fmt(d.alpha) + ")";
        }
        std::string operator()(const DistortionFunction::PowerTailDistortion& d) const {
            return "power(alpha=" + fmt(d.alpha) + ", exponent=" + fmt(d.exponent) + ")";
        }
        std::string operator()(const DistortionFunction::WangDistortion& d) const {
            return "wang(shift=" + fmt(d.shift) + ")";
        }
        std::string operator()(const DistortionFunction::IdentityDistortion&) const {
            return "identity";
        }
        std::string operator()(const DistortionFunction::PiecewiseLinearDistortion& d) const {
            return "piecewise(knots=" + fmt_list(d.knots) + ", values=" + fmt_list(d.values) + ")";
        }
        std::string operator()(const MixtureDistortion& d) const {
            std::string out = "mix(";
            for (std::size_t i = 0; i < d.components.size(); ++i) {
                if (i) out += " + ";
                out += fmt(d.weights[i]) + "*" + d.components[i].describe();
            }
            out += ")";
            return out;
        }
    };
    return std::visit(Desc{}, impl_);
}

DistortionSet::DistortionSet(std::vector<DistortionFunction> generators, std::string label)
    : generators_(std::move(generators)), label_(std::move(label)) {
    if (generators_.empty())
        throw std::invalid_argument("DistortionSet: at least one generator required");
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        if (!generators_[i].is_concave())
            throw std::invalid_argument("DistortionSet '" + label_ + "': generator " +
                                        std::to_string(i) + " is not concave");
    }
}

DistortionFunction DistortionSet::mix(std::span<const double> weights) const {
    if (weights.size() != generators_.size())
        throw std::invalid_argument("DistortionSet::mix: weight count must match generators");
    double sum = 0.0;
    for (double w : weights) {
        if (w < -simplex_tol)
            throw std::invalid_argument("DistortionSet::mix: weights must be non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > simplex_tol)
        throw std::invalid_argument("DistortionSet::mix: weights must sum to 1");

    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] == 1.0) return generators_[i];

    return DistortionFunction::mixture(generators_,
                                       std::vector<double>(weights.begin(), weights.end()));
}

} // namespace riskshare
