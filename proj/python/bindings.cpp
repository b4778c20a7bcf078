#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/estimators.hpp"
#include "horseshoe/hierarchical.hpp"
#include "horseshoe/posterior_core.hpp"
#include "horseshoe/simulation.hpp"
#include "horseshoe/special_integrals.hpp"

namespace py = pybind11;
using namespace horseshoe;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("observations must be a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

py::dict summarize(const std::vector<CoordinatePosterior>& fit) {
  Array mean(fit.size()), var(fit.size());
  auto m = mean.mutable_unchecked<1>();
  auto v = var.mutable_unchecked<1>();
  for (std::size_t i = 0; i < fit.size(); ++i) {
    m(i) = fit[i].mean;
    v(i) = fit[i].variance;
  }
  py::dict d;
  d["mean"] = mean;
  d["variance"] = var;
  return d;
}

quad::Tolerance tolerance(double rel) {
  quad::Tolerance t;
  t.rel = rel;
  return t;
}

}  // namespace

PYBIND11_MODULE(_horseshoe, m) {
  m.doc() = "Horseshoe prior posterior summaries and estimators of the global scale";
  m.attr("__version__") = library_version();

  py::register_exception<AccuracyError>(m, "AccuracyError", PyExc_RuntimeError);

  auto pointwise = [&](const char* name, double (*f)(double, double, const quad::Tolerance&), const char* doc) {
    m.def(
        name, [f](double y, double tau, double rel) { return f(y, tau, tolerance(rel)); }, py::arg("y"),
        py::arg("tau"), py::arg("rel_tol") = 1e-10, doc);
  };
  pointwise("posterior_mean", posterior_mean, "E[theta | y, tau]");
  pointwise("posterior_variance", posterior_variance, "Var[theta | y, tau]");
  pointwise("posterior_cumulant4", posterior_cumulant4, "Fourth cumulant of theta given y, tau");
  pointwise("m_tau", m_tau, "tau * d/dtau log psi_tau(y)");
  pointwise("log_marginal_density", log_marginal_density, "log psi_tau(y)");
  pointwise("prior_density", prior_density, "Horseshoe prior density of theta at scale tau");

  m.def(
      "posterior_interval",
      [](double y, double tau, double level, double rel) { return posterior_interval(y, tau, level, tolerance(rel)); },
      py::arg("y"), py::arg("tau"), py::arg("level") = 0.95, py::arg("rel_tol") = 1e-10,
      "Equal-tailed credible interval for theta");
  m.def(
      "expected_m_tau_null", [](double tau, double rel) { return expected_m_tau_null(tau, tolerance(rel)); },
      py::arg("tau"), py::arg("rel_tol") = 1e-10, "E_0 m_tau(Y) for Y ~ N(0, 1)");
  m.def(
      "log_marginal_likelihood",
      [](const Array& ys, double tau, double rel) { return log_marginal_likelihood(to_vector(ys), tau, tolerance(rel)); },
      py::arg("ys"), py::arg("tau"), py::arg("rel_tol") = 1e-10);
  m.def(
      "score", [](const Array& ys, double tau, double rel) { return score(to_vector(ys), tau, tolerance(rel)); },
      py::arg("ys"), py::arg("tau"), py::arg("rel_tol") = 1e-10, "d/dtau of the log marginal likelihood");

  m.def(
      "simple_estimator",
      [](const Array& ys, double c1, double c2) { return simple_estimator(to_vector(ys), {c1, c2}); }, py::arg("ys"),
      py::arg("c1") = 2.0, py::arg("c2") = 1.0);

  m.def(
      "mmle",
      [](const Array& ys, std::size_t grid_points) {
        MMLEOptions opt;
        opt.grid_points = grid_points;
        const auto r = mmle(to_vector(ys), opt);
        py::dict d;
        d["tau_hat"] = r.tau_hat;
        d["log_likelihood"] = r.log_likelihood_at_max;
        d["boundary"] = std::string(to_string(r.boundary));
        d["refined"] = r.refined;
        return d;
      },
      py::arg("ys"), py::arg("grid_points") = 200, "Marginal maximum likelihood estimate of tau on [1/n, 1]");

  m.def(
      "eb_fit", [](const Array& ys, double tau_hat) { return summarize(eb_fit(to_vector(ys), tau_hat)); },
      py::arg("ys"), py::arg("tau_hat"), "Coordinate-wise posterior means and variances at a plug-in tau");

  m.def(
      "hb_fit",
      [](const Array& ys, const std::string& prior, std::size_t grid_size) {
        const auto data = to_vector(ys);
        const auto tp = tau_posterior(data, TauPrior::standard(parse_prior_family(prior), data.size()), grid_size);
        auto d = summarize(hb_fit(data, tp));
        d["tau_mean"] = tp.mean();
        d["tau_grid"] = tp.grid;
        d["tau_weights"] = tp.weights();
        d["log_evidence"] = tp.normalizer;
        return d;
      },
      py::arg("ys"), py::arg("prior") = "truncated_cauchy", py::arg("grid_size") = 400,
      "Posterior means and variances with tau integrated against its posterior");

  m.def("tau_n", tau_n, py::arg("p"), py::arg("n"));
  m.def("kappa", kappa, py::arg("tau"));
  m.def("zeta", zeta, py::arg("tau"));
}
