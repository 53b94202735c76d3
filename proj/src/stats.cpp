#include "ars/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ars {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

}  // namespace

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

namespace detail {

double fast_normal_quantile(double p) {
  // Acklam's rational approximation: central region plus two tail maps.
  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete beta: a and b must be positive");
  }
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  // Continued fraction for the region x < (a+1)/(a+b+2); the complement
  // identity covers the rest.
  const auto continued_fraction = [](double aa, double bb, double xx) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 3e-16;
    const double qab = aa + bb;
    const double qap = aa + 1.0;
    const double qam = aa - 1.0;
    double cc = 1.0;
    double dd = 1.0 - qab * xx / qap;
    if (std::fabs(dd) < kTiny) dd = kTiny;
    dd = 1.0 / dd;
    double h = dd;
    for (int m = 1; m <= 400; ++m) {
      const int m2 = 2 * m;
      double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
      dd = 1.0 + num * dd;
      if (std::fabs(dd) < kTiny) dd = kTiny;
      cc = 1.0 + num / cc;
      if (std::fabs(cc) < kTiny) cc = kTiny;
      dd = 1.0 / dd;
      h *= dd * cc;
      num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
      dd = 1.0 + num * dd;
      if (std::fabs(dd) < kTiny) dd = kTiny;
      cc = 1.0 + num / cc;
      if (std::fabs(cc) < kTiny) cc = kTiny;
      dd = 1.0 / dd;
      const double del = dd * cc;
      h *= del;
      if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
  };

  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * continued_fraction(b, a, 1.0 - x) / b;
}

}  // namespace detail

namespace {

// p in (0, 0.5]. The erfc-based CDF keeps relative accuracy in this tail,
// so the Halley residual stays meaningful however small p gets.
double quantile_lower_half(double p) {
  double x = detail::fast_normal_quantile(p);
  // One Halley step against the CDF tightens the initializer to full
  // double precision. The pdf underflows only past |x| ~ 38.6, where the
  // initializer is already the best available answer.
  const double pdf = std_normal_pdf(x);
  if (pdf > 0.0) {
    const double err = std_normal_cdf(x) - p;
    const double u = err / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  }
  // The CDF near 1 carries only absolute precision, which the Halley step
  // would amplify by 1/pdf. For p above one half the subtraction 1 - p is
  // exact, so reflection keeps the tight tail on both sides.
  if (p > 0.5) return -quantile_lower_half(1.0 - p);
  return quantile_lower_half(p);
}

double binomial_lower_bound(std::uint64_t successes, std::uint64_t trials,
                            double alpha) {
  if (successes > trials) {
    throw std::invalid_argument(
        "binomial_lower_bound: successes exceeds trials");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("binomial_lower_bound: alpha outside (0, 1)");
  }
  if (successes == 0) return 0.0;

  // P[Bin(n, p) >= k] = I_p(k, n - k + 1) is increasing in p; bisect to
  // the adjacent-double bracket and return the lower end, which keeps the
  // bound conservative.
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  double lo = 0.0;
  double hi = 1.0;
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double tail = detail::regularized_incomplete_beta(k, n - k + 1.0, mid);
    if (tail >= alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

double binomial_upper_bound(std::uint64_t successes, std::uint64_t trials,
                            double alpha) {
  if (successes > trials) {
    throw std::invalid_argument(
        "binomial_upper_bound: successes exceeds trials");
  }
  return 1.0 - binomial_lower_bound(trials - successes, trials, alpha);
}

}  // namespace ars
