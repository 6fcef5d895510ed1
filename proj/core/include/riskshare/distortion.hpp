#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace riskshare {

class DistortionFunction;

/// Convex combination of other distortion functions. Weights lie on the
/// simplex and match components in length.
struct MixtureDistortion {
    std::vector<DistortionFunction> components;
    std::vector<double> weights;
};

/// A concave distortion function T: [0,1] -> [0,1] with T(0) = 0, T(1) = 1,
/// non-decreasing. Instances are immutable value types; evaluation is pure
/// and thread-safe.
///
/// Families:
///   expected_shortfall(alpha)      min(t / alpha, 1)
///   power_tail(alpha, exponent)    min((t / alpha)^exponent, 1)
///   wang(shift)                    Phi(Phi^{-1}(t) + shift), 0 and 1 fixed
///   identity()                     t  (expectation)
///   piecewise_linear(knots, vals)  linear interpolation through the knots
class DistortionFunction {
  public:
    struct EsDistortion {
        double alpha; // in (0, 1]
    };
    struct PowerTailDistortion {
        double alpha;    // in (0, 1]
        double exponent; // in (0, 1]
    };
    struct WangDistortion {
        double shift; // concave iff shift >= 0; checked at set construction
    };
    struct IdentityDistortion {};
    struct PiecewiseLinearDistortion {
        std::vector<double> knots;  // strictly increasing, 0 = first, 1 = last
        std::vector<double> values; // non-decreasing, 0 = first, 1 = last
    };

    static DistortionFunction expected_shortfall(double alpha);
    static DistortionFunction power_tail(double alpha, double exponent);
    static DistortionFunction wang(double shift);
    static DistortionFunction identity();
    static DistortionFunction piecewise_linear(std::vector<double> knots,
                                               std::vector<double> values);
    static DistortionFunction mixture(std::vector<DistortionFunction> components,
                                      std::vector<double> weights);

    /// Evaluate T(t). Arguments within 1e-12 of [0,1] are clamped; anything
    /// further out throws std::domain_error.
    double operator()(double t) const;

    /// Interior points of (0,1) where T is not differentiable
    /// (family kinks and piecewise-linear knots), sorted ascending.
    [[nodiscard]] std::vector<double> kinks() const;

    /// Midpoint concavity test over all pairs of a uniform grid on [0,1]
    /// with tolerance 1e-10. Exact families pass; the check exists to gate
    /// user-supplied piecewise-linear inputs and mixtures.
    [[nodiscard]] bool is_concave(std::size_t grid_size = 1001) const;

    /// Human-readable description, e.g. "es(alpha=0.025)". Uses 12
    /// significant digits so report output is reproducible.
    [[nodiscard]] std::string describe() const;

  private:
    using Impl = std::variant<EsDistortion, PowerTailDistortion, WangDistortion,
                              IdentityDistortion, PiecewiseLinearDistortion,
                              MixtureDistortion>;
    explicit DistortionFunction(Impl impl) : impl_(std::move(impl)) {}
    Impl impl_;
};

/// A finitely generated convex set of concave distortions: the risk measure
/// it induces is the upper Choquet envelope over the generators' hull.
/// Construction rejects non-concave generators.
class DistortionSet {
  public:
    DistortionSet(std::vector<DistortionFunction> generators, std::string label);

    [[nodiscard]] const std::vector<DistortionFunction>& generators() const {
        return generators_;
    }
    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] std::size_t size() const { return generators_.size(); }

    /// Convex combination of the generators. Weights must lie on the simplex
    /// (non-negative within 1e-12, summing to 1 within 1e-12) and match the
    /// generator count.
    [[nodiscard]] DistortionFunction mix(std::span<const double> weights) const;
    [[nodiscard]] DistortionFunction mix(std::initializer_list<double> weights) const {
        return mix(std::span<const double>(weights.begin(), weights.size()));
    }

  private:
    std::vector<DistortionFunction> generators_;
    std::string label_;
};

} // namespace riskshare
