#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfopt {

namespace detail {

/// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Complement Q(a, x) via Lentz continued fraction (x >= a + 1).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
inline double lower_regularized_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("lower_regularized_gamma: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_cf(a, x);
}

inline double chi2_cdf(double x, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
    if (x <= 0.0) return 0.0;
    return lower_regularized_gamma(0.5 * dof, 0.5 * x);
}

/// Quantile of the chi-squared distribution by bisection on the CDF.
/// No external tables; accurate to ~1e-12 relative.
inline double chi2_quantile(double p, int dof) {
    if (dof < 1) throw std::invalid_argument("chi2_quantile: dof must be >= 1");
    if (!(p >= 0.0 && p < 1.0))
        throw std::invalid_argument("chi2_quantile: p must lie in [0,1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = static_cast<double>(dof);
    while (chi2_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// log N(x; mean, var) with the variance floored at a denormal-safe minimum,
/// so collapsed particles yield a large finite density instead of infinity.
inline double normal_log_pdf(double x, double mean, double var) {
    constexpr double kVarFloor = 1e-300;
    const double v = var > kVarFloor ? var : kVarFloor;
    const double d = x - mean;
    return -0.5 * (std::log(2.0 * 3.14159265358979323846 * v) + d * d / v);
}

}  // namespace pfopt
