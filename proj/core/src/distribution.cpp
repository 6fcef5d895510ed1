#include "riskshare/distribution.hpp"

#include "riskshare/normal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace riskshare {

namespace {

constexpr double prob_sum_tol = 1e-12;

double gamma_q_series_complement(double a, double x) {
    // P(a, x) by power series, returned as Q = 1 - P.
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
}

double gamma_q_continued_fraction(double a, double x) {
    // Modified Lentz evaluation of the continued fraction for Q(a, x).
    constexpr double fpmin = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_q: a must be positive");
    if (x <= 0.0) return 1.0;

    double k = std::round(a);
    if (std::abs(a - k) < 1e-12 && k >= 1.0 && k <= 200.0 && x < 200.0) {
        // Exact truncated Poisson sum for integer shape.
        double term = std::exp(-x);
        double sum = term;
        for (int j = 1; j < static_cast<int>(k); ++j) {
            term *= x / static_cast<double>(j);
            sum += term;
        }
        return std::min(sum, 1.0);
    }
    double q = (x < a + 1.0) ? gamma_q_series_complement(a, x) : gamma_q_continued_fraction(a, x);
    return std::clamp(q, 0.0, 1.0);
}

RiskDistribution RiskDistribution::gamma(double shape, double scale, double truncation_mass) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("gamma: shape and scale must be positive");
    if (!(truncation_mass > 0.0 && truncation_mass <= 0.01))
        throw std::invalid_argument("gamma: truncation_mass must lie in (0, 0.01]");

    // Truncation point: solve Q(shape, x / scale) = truncation_mass by
    // bracketed bisection; x-tolerance 1e-12 relative to the bracket scale.
    double hi = scale * std::max(shape, 1.0);
    while (regularized_gamma_q(shape, hi / scale) > truncation_mass && hi < 1e300) hi *= 2.0;
    double lo = 0.0;
    double tol = 1e-12 * std::max(1.0, hi);
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (regularized_gamma_q(shape, mid / scale) > truncation_mass)
            lo = mid;
        else
            hi = mid;
    }
    return RiskDistribution(GammaDist{shape, scale, truncation_mass, 0.5 * (lo + hi)});
}

RiskDistribution RiskDistribution::lognormal(double mu, double sigma, double truncation_mass) {
    if (!(sigma > 0.0)) throw std::invalid_argument("lognormal: sigma must be positive");
    if (!std::isfinite(mu)) throw std::invalid_argument("lognormal: mu must be finite");
    if (!(truncation_mass > 0.0 && truncation_mass <= 0.01))
        throw std::invalid_argument("lognormal: truncation_mass must lie in (0, 0.01]");
    double ess_sup = std::exp(mu + sigma * norm_quantile(1.0 - truncation_mass));
    return RiskDistribution(LognormalDist{mu, sigma, truncation_mass, ess_sup});
}

RiskDistribution RiskDistribution::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("uniform: lo must be below hi");
    return RiskDistribution(UniformDist{lo, hi});
}

RiskDistribution RiskDistribution::empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical: samples must be non-empty");
    for (double s : samples)
        if (!std::isfinite(s)) throw std::invalid_argument("empirical: samples must be finite");
    std::sort(samples.begin(), samples.end());

    AtomicDist d;
    d.from_samples = true;
    d.sample_count = samples.size();
    double n = static_cast<double>(samples.size());
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        d.atoms.push_back(samples[i]);
        d.probs.push_back(static_cast<double>(j - i) / n);
        i = j;
    }
    d.tail_probs.assign(d.atoms.size(), 0.0);
    for (std::size_t j = d.atoms.size(); j-- > 1;)
        d.tail_probs[j - 1] = d.tail_probs[j] + d.probs[j];
    return RiskDistribution(std::move(d));
}

RiskDistribution RiskDistribution::discrete(std::vector<double> atoms,
                                            std::vector<double> probabilities) {
    if (atoms.empty() || atoms.size() != probabilities.size())
        throw std::invalid_argument("discrete: atoms and probabilities must match and be non-empty");
    double sum = 0.0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        if (!std::isfinite(atoms[j])) throw std::invalid_argument("discrete: atoms must be finite");
        if (j > 0 && !(atoms[j] > atoms[j - 1]))
            throw std::invalid_argument("discrete: atoms must be strictly increasing");
        if (!(probabilities[j] > 0.0))
            throw std::invalid_argument("discrete: probabilities must be positive");
        sum += probabilities[j];
    }
    if (std::abs(sum - 1.0) > prob_sum_tol)
        throw std::invalid_argument("discrete: probabilities must sum to 1 within 1e-12");

    AtomicDist d;
    d.from_samples = false;
    d.sample_count = 0;
    d.atoms = std::move(atoms);
    d.probs = std::move(probabilities);
    d.tail_probs.assign(d.atoms.size(), 0.0);
    for (std::size_t j = d.atoms.size(); j-- > 1;)
        d.tail_probs[j - 1] = d.tail_probs[j] + d.probs[j];
    return RiskDistribution(std::move(d));
}

double RiskDistribution::survival(double x) const {
    struct Survival {
        double x;
        double operator()(const GammaDist& d) const {
            if (x <= 0.0) return 1.0;
            if (x >= d.ess_sup) return 0.0;
            return regularized_gamma_q(d.shape, x / d.scale);
        }
        double operator()(const LognormalDist& d) const {
            if (x <= 0.0) return 1.0;
            if (x >= d.ess_sup) return 0.0;
            return norm_cdf(-(std::log(x) - d.mu) / d.sigma);
        }
        double operator()(const UniformDist& d) const {
            if (x <= d.lo) return 1.0;
            if (x >= d.hi) return 0.0;
            return (d.hi - x) / (d.hi - d.lo);
        }
        double operator()(const AtomicDist& d) const {
            // First atom strictly above x; tail mass from there.
            auto it = std::upper_bound(d.atoms.begin(), d.atoms.end(), x);
            if (it == d.atoms.end()) return 0.0;
            std::size_t j = static_cast<std::size_t>(it - d.atoms.begin());
            return j == 0 ? 1.0 : d.tail_probs[j - 1];
        }
    };
    return std::visit(Survival{x}, impl_);
}

double RiskDistribution::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("RiskDistribution::quantile: p must lie in (0, 1)");
    struct Quantile {
        double p;
        double operator()(const GammaDist& d) const {
            double target = 1.0 - p;
            double hi = d.scale * std::max(d.shape, 1.0);
            while (regularized_gamma_q(d.shape, hi / d.scale) > target && hi < 1e300) hi *= 2.0;
            double lo = 0.0;
            double tol = 1e-12 * std::max(1.0, hi);
            while (hi - lo > tol) {
                double mid = 0.5 * (lo + hi);
                if (regularized_gamma_q(d.shape, mid / d.scale) > target)
                    lo = mid;
                else
                    hi = mid;
            }
            return std::min(0.5 * (lo + hi), d.ess_sup);
        }
        double operator()(const LognormalDist& d) const {
            return std::min(std::exp(d.mu + d.sigma * norm_quantile(p)), d.ess_sup);
        }
        double operator()(const UniformDist& d) const { return d.lo + p * (d.hi - d.lo); }
        double operator()(const AtomicDist& d) const {
            // Smallest atom whose tail probability drops to 1 - p or below.
            double target = 1.0 - p;
            for (std::size_t j = 0; j < d.atoms.size(); ++j)
                if (d.tail_probs[j] <= target) return d.atoms[j];
            return d.atoms.back();
        }
    };
    return std::visit(Quantile{p}, impl_);
}

double RiskDistribution::essential_inf() const {
    struct Inf {
        double operator()(const GammaDist&) const { return 0.0; }
        double operator()(const LognormalDist&) const { return 0.0; }
        double operator()(const UniformDist& d) const { return d.lo; }
        double operator()(const AtomicDist& d) const { return d.atoms.front(); }
    };
    return std::visit(Inf{}, impl_);
}

double RiskDistribution::essential_sup() const {
    struct Sup {
        double operator()(const GammaDist& d) const { return d.ess_sup; }
        double operator()(const LognormalDist& d) const { return d.ess_sup; }
        double operator()(const UniformDist& d) const { return d.hi; }
        double operator()(const AtomicDist& d) const { return d.atoms.back(); }
    };
    return std::visit(Sup{}, impl_);
}

bool RiskDistribution::has_atoms() const {
    return std::holds_alternative<AtomicDist>(impl_);
}

const std::vector<double>& RiskDistribution::atoms() const {
    return std::get<AtomicDist>(impl_).atoms;
}

const std::vector<double>& RiskDistribution::atom_tail_probs() const {
    return std::get<AtomicDist>(impl_).tail_probs;
}

bool RiskDistribution::has_density() const {
    return !std::holds_alternative<AtomicDist>(impl_);
}

double RiskDistribution::density(double x) const {
    struct Density {
        double x;
        double operator()(const GammaDist& d) const {
            if (x <= 0.0) return 0.0;
            return std::exp((d.shape - 1.0) * std::log(x) - x / d.scale -
                            std::lgamma(d.shape) - d.shape * std::log(d.scale));
        }
        double operator()(const LognormalDist& d) const {
            if (x <= 0.0) return 0.0;
            return norm_pdf((std::log(x) - d.mu) / d.sigma) / (x * d.sigma);
        }
        double operator()(const UniformDist& d) const {
            return (x >= d.lo && x <= d.hi) ? 1.0 / (d.hi - d.lo) : 0.0;
        }
        double operator()(const AtomicDist&) const {
            throw std::logic_error("density: atomic law has no density");
        }
    };
    return std::visit(Density{x}, impl_);
}

std::string RiskDistribution::describe() const {
    struct Desc {
        std::string operator()(const GammaDist& d) const {
            return "gamma(shape=" + fmt(d.shape) + ", scale=" + fmt(d.scale) + ")";
        }
        std::string operator()(const LognormalDist& d) const {
            return "lognormal(mu=" + fmt(d.mu) + ", sigma=" + fmt(d.sigma) + ")";
        }
        std::string operator()(const UniformDist& d) const {
            return "uniform(lo=" + fmt(d.lo) + ", hi=" + fmt(d.hi) + ")";
        }
        std::string operator()(const AtomicDist& d) const {
            if (d.from_samples)
                return "empirical(n=" + std::to_string(d.sample_count) + ")";
            return "discrete(m=" + std::to_string(d.atoms.size()) + ")";
        }
    };
    return std::visit(Desc{}, impl_);
}

} // namespace riskshare
