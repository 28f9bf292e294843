#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace affmap::stats {

namespace detail {

/// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 3.0e-16;
    constexpr double fpmin = 1.0e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta: a, b must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                             + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_cont_frac(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

/// Inverse of I_x(a, b) in x. Newton iteration safeguarded by bisection.
inline double incomplete_beta_inv(double a, double b, double y) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("incomplete_beta_inv: a, b must be positive");
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;

    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double lo = 0.0, hi = 1.0;
    double x = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double fx = incomplete_beta(a, b, x) - y;
        if (fx > 0.0) hi = x; else lo = x;
        const double log_pdf = (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta;
        double next = x;
        if (std::isfinite(log_pdf)) {
            next = x - fx * std::exp(-log_pdf);
        }
        if (!(next > lo) || !(next < hi)) {
            next = 0.5 * (lo + hi);  // Newton left the bracket
        }
        if (std::fabs(next - x) <= 1e-16 * (std::fabs(x) + 1e-300)) {
            return next;
        }
        x = next;
    }
    return x;
}

/// Quantile of the Fisher F(d1, d2) distribution at probability prob.
inline double fisher_quantile(double prob, int d1, int d2) {
    if (d1 < 1 || d2 < 1) throw std::domain_error("fisher_quantile: degrees of freedom must be positive");
    if (!(prob > 0.0) || !(prob < 1.0)) throw std::domain_error("fisher_quantile: prob must be in (0,1)");
    const double z = incomplete_beta_inv(0.5 * d1, 0.5 * d2, prob);
    if (z >= 1.0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(d2) * z / (static_cast<double>(d1) * (1.0 - z));
}

}  // namespace affmap::stats
