#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "certdel/common.hpp"

namespace certdel {

namespace detail {

// Regularized upper incomplete gamma Q(a, x) by series / continued fraction
// split at x = a + 1.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw DomainError("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double log_gamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P.
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
        return 1.0 - p;
    }
    // Q(a,x) by Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

} // namespace detail

// Upper-tail p-value of a chi-squared statistic with `dof` degrees of freedom.
inline double chi_squared_pvalue(double statistic, std::size_t dof) {
    if (dof == 0) throw DomainError("chi_squared_pvalue: zero degrees of freedom");
    return detail::gamma_q(static_cast<double>(dof) / 2.0, statistic / 2.0);
}

// One-sample goodness-of-fit p-value: observed counts against expected
// probabilities (must sum to ~1). Bins with negligible expectation are
// pooled into the last non-negligible one.
inline double chi_squared_gof_pvalue(const std::vector<std::size_t>& observed,
                                     const std::vector<double>& expected_prob) {
    if (observed.size() != expected_prob.size())
        throw LengthMismatch("chi_squared_gof_pvalue: size mismatch");
    std::size_t total = 0;
    for (auto c : observed) total += c;
    double statistic = 0.0;
    std::size_t dof = 0;
    double pooled_expect = 0.0;
    double pooled_observed = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expect = expected_prob[i] * static_cast<double>(total);
        if (expect < 5.0) {
            pooled_expect += expect;
            pooled_observed += static_cast<double>(observed[i]);
            continue;
        }
        const double diff = static_cast<double>(observed[i]) - expect;
        statistic += diff * diff / expect;
        ++dof;
    }
    if (pooled_expect > 0.0) {
        const double diff = pooled_observed - pooled_expect;
        statistic += diff * diff / pooled_expect;
        ++dof;
    }
    if (dof < 2) throw DomainError("chi_squared_gof_pvalue: too few usable bins");
    return chi_squared_pvalue(statistic, dof - 1);
}

// Standard error of a Bernoulli frequency estimate.
inline double binomial_std_error(double p, std::size_t trials) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

} // namespace certdel
