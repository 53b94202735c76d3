"""Certified-robustness primitives.

Thin Python face of the C++ core: Gaussian trade-off calculus, certified
radii for single-step, adaptive, and two-step masked smoothing, the
Clopper-Pearson bounds used by Monte-Carlo certification, and the
counter-based sampler that makes every run reproducible.
"""

from arscert._core import (
    SeededRng,
    binomial_lower_bound,
    binomial_upper_bound,
    compose_gdp,
    fusion_coefficients,
    gaussian_tradeoff,
    max_certified_mu,
    radius_l2_adaptive,
    radius_l2_rs,
    radius_linf_rs,
    radius_linf_two_step,
    robustness_gate,
    split_budget,
    std_normal_cdf,
    std_normal_quantile,
)

__all__ = [
    "SeededRng",
    "binomial_lower_bound",
    "binomial_upper_bound",
    "compose_gdp",
    "fusion_coefficients",
    "gaussian_tradeoff",
    "max_certified_mu",
    "radius_l2_adaptive",
    "radius_l2_rs",
    "radius_linf_rs",
    "radius_linf_two_step",
    "robustness_gate",
    "split_budget",
    "std_normal_cdf",
    "std_normal_quantile",
]

__version__ = "0.1.0"
