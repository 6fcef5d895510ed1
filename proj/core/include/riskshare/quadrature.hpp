#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace riskshare {

/// Tolerances for the adaptive integrator. abs_tol is per unit length and is
/// scaled by max(1, b - a) at integration time; the effective target is
/// max(scaled abs_tol, rel_tol * |estimate|).
struct QuadratureConfig {
    double abs_tol = 1e-9;
    double rel_tol = 1e-8;
    int max_subdivisions = 1 << 16; // total adaptive splits; must be >= 8
};

/// Raised when the subdivision budget runs out before the tolerance is met.
/// Carries the best estimate and the error bound actually achieved.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(std::string msg, double estimate, double achieved_error)
        : std::runtime_error(std::move(msg)), estimate_(estimate),
          achieved_error_(achieved_error) {}
    [[nodiscard]] double estimate() const { return estimate_; }
    [[nodiscard]] double achieved_error() const { return achieved_error_; }

  private:
    double estimate_;
    double achieved_error_;
};

/// Adaptive Gauss-Kronrod 7-15 integration of f over [a, b]. Interior
/// breakpoints (kink locations) seed the initial cells; the worst cell by
/// error estimate is split until the tolerance holds. Deterministic: fixed
/// node set, worst-first splitting with position tie-break, left-to-right
/// final summation.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const QuadratureConfig& cfg = {});

} // namespace riskshare
