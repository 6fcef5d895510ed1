#pragma once

namespace riskshare {

/// Standard normal CDF, evaluated via erfc for full-tail accuracy.
double norm_cdf(double z);

/// Standard normal density.
double norm_pdf(double z);

/// Inverse standard normal CDF on (0, 1).
///
/// Rational approximation (Acklam) refined by one Halley step against
/// norm_cdf, with p > 0.5 reflected onto the lower tail so the refinement
/// keeps its absolute accuracy. Error is at machine level relative to the
/// p actually passed; near p = 1 the double spacing itself limits the
/// recoverable z to about 2^-53 / norm_pdf(z).
/// Throws std::domain_error outside (0, 1).
double norm_quantile(double p);

} // namespace riskshare
