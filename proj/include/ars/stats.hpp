#pragma once

#include <cstdint>

namespace ars {

// Standard normal CDF, computed through erfc so the tails keep relative
// accuracy. Non-decreasing in x; absolute error around 1e-15.
double std_normal_cdf(double x);

// Inverse standard normal CDF on the open interval (0, 1). Absolute error
// at most 1e-12 on [1e-12, 1 - 1e-12]. Throws std::domain_error for
// arguments outside (0, 1), including NaN.
double std_normal_quantile(double p);

// One-sided Clopper-Pearson lower confidence bound for a binomial
// proportion: the p that solves P[Bin(trials, p) >= successes] = alpha,
// and 0 when successes == 0. Conservative by construction, so coverage is
// at least 1 - alpha. Throws std::invalid_argument when successes > trials
// or alpha lies outside (0, 1).
double binomial_lower_bound(std::uint64_t successes, std::uint64_t trials,
                            double alpha);

// One-sided upper companion, via tail symmetry:
// 1 - binomial_lower_bound(trials - successes, trials, alpha).
double binomial_upper_bound(std::uint64_t successes, std::uint64_t trials,
                            double alpha);

namespace detail {

// Rational-approximation initializer (relative error ~1.2e-9). This is the
// sampler-grade path; std_normal_quantile adds one Halley correction step
// against the CDF on top of it.
double fast_normal_quantile(double p);

// Regularized incomplete beta I_x(a, b), continued fraction with Lentz
// scaling. Requires a > 0, b > 0, 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace detail

}  // namespace ars
