#include <cstdint>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ars/fdp.hpp"
#include "ars/pipeline.hpp"
#include "ars/radius.hpp"
#include "ars/rng.hpp"
#include "ars/stats.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Certified-robustness primitives: Gaussian trade-off calculus, "
      "noise-budget radii, and the counter-based sampler.";

  m.def("std_normal_cdf", &ars::std_normal_cdf, py::arg("x"),
        "Standard normal CDF.");
  m.def("std_normal_quantile", &ars::std_normal_quantile, py::arg("p"),
        "Inverse standard normal CDF on the open interval (0, 1).");
  m.def("binomial_lower_bound", &ars::binomial_lower_bound,
        py::arg("successes"), py::arg("trials"), py::arg("alpha"),
        "One-sided Clopper-Pearson lower confidence bound.");
  m.def("binomial_upper_bound", &ars::binomial_upper_bound,
        py::arg("successes"), py::arg("trials"), py::arg("alpha"),
        "One-sided Clopper-Pearson upper confidence bound.");

  m.def("gaussian_tradeoff", &ars::gaussian_tradeoff, py::arg("mu"),
        py::arg("alpha"),
        "Gaussian trade-off curve G_mu(alpha) = Phi(Phi^-1(1 - alpha) - mu).");
  m.def(
      "compose_gdp",
      [](const std::vector<double>& mus) {
        std::vector<ars::GdpBudget> budgets;
        budgets.reserve(mus.size());
        for (double mu : mus) budgets.push_back(ars::GdpBudget{mu});
        return ars::compose_gdp(budgets).mu;
      },
      py::arg("mus"),
      "Composes per-step Gaussian budgets into one: sqrt(sum mu_i^2).");
  m.def(
      "robustness_gate",
      [](double mu, double p_plus_lb, double p_minus_ub) {
        return ars::robustness_gate(ars::TradeoffCurve::gaussian(mu),
                                    p_plus_lb, p_minus_ub);
      },
      py::arg("mu"), py::arg("p_plus_lb"), py::arg("p_minus_ub"),
      "True when the Gaussian curve at mu certifies the probability pair.");
  m.def("max_certified_mu", &ars::max_certified_mu, py::arg("p_plus_lb"),
        py::arg("p_minus_ub"),
        "Largest mu for which the Gaussian gate still passes.");

  m.def("radius_l2_rs", &ars::radius_l2_rs, py::arg("sigma"),
        py::arg("p_plus_lb"), py::arg("p_minus_ub"),
        "L2 certified radius of one isotropic Gaussian step.");
  m.def(
      "radius_l2_adaptive",
      [](const std::vector<double>& sigmas, double p_plus_lb,
         double p_minus_ub) {
        return ars::radius_l2_adaptive(sigmas, p_plus_lb, p_minus_ub);
      },
      py::arg("sigmas"), py::arg("p_plus_lb"), py::arg("p_minus_ub"),
      "L2 certified radius of an adaptive chain of Gaussian steps.");
  m.def("radius_linf_rs", &ars::radius_linf_rs, py::arg("sigma"), py::arg("d"),
        py::arg("p_plus_lb"), py::arg("p_minus_ub"),
        "L-infinity certified radius of one isotropic step in d dimensions.");
  m.def("radius_linf_two_step", &ars::radius_linf_two_step, py::arg("sigma1"),
        py::arg("sigma2"), py::arg("d"), py::arg("p_plus_lb"),
        py::arg("p_minus_ub"),
        "L-infinity certified radius of the two-step masked mechanism.");

  m.def("split_budget", &ars::split_budget, py::arg("sigma"),
        py::arg("sigma1"),
        "Second-step scale that completes a total per-coordinate budget.");
  m.def(
      "fusion_coefficients",
      [](double w, double step2_var, double sigma1) {
        const ars::FusionCoefficients c =
            ars::fusion_coefficients(w, step2_var, sigma1);
        return py::make_tuple(c.c1, c.c2);
      },
      py::arg("w"), py::arg("step2_var"), py::arg("sigma1"),
      "Minimum-variance unbiased fusion weights (c1, c2) for one coordinate.");

  py::class_<ars::SeededRng>(m, "SeededRng",
                             "Counter-based splittable generator; output i of "
                             "a stream depends only on (seed, stream_id, i).")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
           py::arg("stream_id") = 0)
      .def_property_readonly("seed", &ars::SeededRng::seed)
      .def_property_readonly("stream_id", &ars::SeededRng::stream_id)
      .def("stream", &ars::SeededRng::stream, py::arg("substream"),
           "Derives an independent child stream starting at position 0.")
      .def("next_u64", &ars::SeededRng::next_u64)
      .def("next_uniform", &ars::SeededRng::next_uniform)
      .def("next_normal", &ars::SeededRng::next_normal)
      .def(
          "normals",
          [](ars::SeededRng& rng, std::size_t n) {
            return ars::sample_standard_normal(rng, n);
          },
          py::arg("n"), "Draws n standard normal deviates.");
}
