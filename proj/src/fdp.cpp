#include "ars/fdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ars/stats.hpp"

namespace ars {

TradeoffCurve TradeoffCurve::gaussian(double mu) {
  if (!(mu >= 0.0)) {
    throw std::invalid_argument("TradeoffCurve: mu must be non-negative");
  }
  return TradeoffCurve(mu);
}

double TradeoffCurve::operator()(double alpha) const {
  return gaussian_tradeoff(mu_, alpha);
}

double gaussian_tradeoff(double mu, double alpha) {
  if (!(mu >= 0.0)) {
    throw std::invalid_argument("gaussian_tradeoff: mu must be non-negative");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("gaussian_tradeoff: alpha outside [0, 1]");
  }
  // mu = 0 is exactly the identity curve; endpoints are limits of the
  // general expression and dodge the quantile's open-domain restriction.
  if (mu == 0.0) return 1.0 - alpha;
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;
  return std_normal_cdf(std_normal_quantile(1.0 - alpha) - mu);
}

GdpBudget compose_gdp(std::span<const GdpBudget> budgets) {
  if (budgets.empty()) {
    throw std::invalid_argument("compose_gdp: empty budget list");
  }
  std::vector<double> squares;
  squares.reserve(budgets.size());
  for (const GdpBudget& b : budgets) {
    if (!(b.mu >= 0.0)) {
      throw std::invalid_argument("compose_gdp: negative budget");
    }
    if (b.mu > 0.0) squares.push_back(b.mu * b.mu);
  }
  if (squares.empty()) return GdpBudget{0.0};
  if (squares.size() == 1) {
    // Return the sole contributor bit-exactly instead of sqrt(mu^2).
    for (const GdpBudget& b : budgets) {
      if (b.mu > 0.0) return b;
    }
  }
  // Sorted summation makes the result independent of input order.
  std::sort(squares.begin(), squares.end());
  double total = 0.0;
  for (double s : squares) total += s;
  return GdpBudget{std::sqrt(total)};
}

GdpBudget compose_gdp(std::initializer_list<GdpBudget> budgets) {
  return compose_gdp(std::span<const GdpBudget>(budgets.begin(), budgets.size()));
}

bool robustness_gate(const TradeoffCurve& f, double p_plus_lb,
                     double p_minus_ub) {
  if (!(p_minus_ub >= 0.0 && p_plus_lb <= 1.0 && p_minus_ub <= p_plus_lb)) {
    throw std::invalid_argument(
        "robustness_gate: need 0 <= p_minus_ub <= p_plus_lb <= 1");
  }
  return f(1.0 - p_plus_lb) >= 1.0 - f(p_minus_ub);
}

double max_certified_mu(double p_plus_lb, double p_minus_ub) {
  if (!(p_minus_ub <= p_plus_lb)) {
    throw std::invalid_argument("max_certified_mu: bounds out of order");
  }
  if (!(p_plus_lb > 0.0 && p_plus_lb < 1.0 && p_minus_ub > 0.0 &&
        p_minus_ub < 1.0)) {
    throw std::domain_error("max_certified_mu: bounds must lie in (0, 1)");
  }
  return 0.5 * (std_normal_quantile(p_plus_lb) - std_normal_quantile(p_minus_ub));
}

}  // namespace ars
