#pragma once

#include <span>
#include <vector>

namespace ars {

// Privacy budget of a Gaussian trade-off curve. mu = 0 is the identity
// curve (a blind test); larger mu means more distinguishable outputs.
struct GdpBudget {
  double mu = 0.0;
};

// Trade-off function f(alpha): the least achievable type-II error of any
// test at type-I level alpha. Only the Gaussian family (plus the identity
// curve) is representable; that family is closed under the composition
// rule used here.
class TradeoffCurve {
 public:
  static TradeoffCurve identity() noexcept { return TradeoffCurve(0.0); }
  static TradeoffCurve gaussian(double mu);

  // Evaluates f(alpha) for alpha in [0, 1].
  double operator()(double alpha) const;

  double mu() const noexcept { return mu_; }
  bool is_identity() const noexcept { return mu_ == 0.0; }

 private:
  explicit TradeoffCurve(double mu) noexcept : mu_(mu) {}
  double mu_;
};

// G_mu(alpha) = Phi(Phi^{-1}(1 - alpha) - mu). Requires mu >= 0 and
// 0 <= alpha <= 1; throws std::invalid_argument otherwise.
double gaussian_tradeoff(double mu, double alpha);

// Adaptive composition: n Gaussian steps compose to a single Gaussian
// budget with mu = sqrt(sum mu_i^2). Rejects empty input and negative
// entries. Exact for single-element input and invariant under permutation.
GdpBudget compose_gdp(std::span<const GdpBudget> budgets);
GdpBudget compose_gdp(std::initializer_list<GdpBudget> budgets);

// Certification gate: with class-probability bounds p_plus_lb >= p_minus_ub,
// the prediction is robust when f(1 - p_plus_lb) >= 1 - f(p_minus_ub).
// Requires 0 <= p_minus_ub <= p_plus_lb <= 1.
bool robustness_gate(const TradeoffCurve& f, double p_plus_lb,
                     double p_minus_ub);

// Largest mu for which the Gaussian gate still passes:
// (Phi^{-1}(p_plus_lb) - Phi^{-1}(p_minus_ub)) / 2.
// Requires 0 < p_minus_ub <= p_plus_lb < 1; throws std::domain_error when
// either bound sits on {0, 1}.
double max_certified_mu(double p_plus_lb, double p_minus_ub);

}  // namespace ars
