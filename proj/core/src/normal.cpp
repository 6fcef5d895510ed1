#include "riskshare/normal.hpp"

#include <cmath>
#include <stdexcept>

namespace riskshare {

namespace {
constexpr double sqrt2 = 1.41421356237309504880168872420969808;
constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934381868;
} // namespace

double norm_cdf(double z) { return 0.5 * std::erfc(-z / sqrt2); }

double norm_pdf(double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z); }

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("norm_quantile: p must lie in (0, 1)");

    // Reflect the upper half onto the lower: 1 - p is exact there (Sterbenz),
    // and the Halley correction below needs the absolute cdf accuracy that
    // erfc only delivers away from 1.
    if (p > 0.5) return -norm_quantile(1.0 - p);

    // Acklam's rational minimax approximation, tail region below 0.02425.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // One Halley refinement; takes the raw approximation (|err| ~ 1e-9)
    // to machine-level accuracy.
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

} // namespace riskshare
