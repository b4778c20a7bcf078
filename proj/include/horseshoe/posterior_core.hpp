#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "horseshoe/quadrature.hpp"

namespace horseshoe {

/// Posterior summary of one coordinate theta_i given Y_i = y and a fixed tau
/// (or, for hierarchical fits, mixed over the tau posterior).
struct CoordinatePosterior {
  double y = 0.0;
  double tau = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> cumulant4;
  std::vector<std::pair<double, double>> quantiles;
};

/// Moments of the mixing variable z = 1 - 1/(1 + lambda^2 tau^2) given y.
/// Given z, theta is N(y z, z); everything below is built from these.
struct ShrinkageMoments {
  double log_scaled_i = 0.0;  ///< log(e^{-y^2/2} I_{-1/2}(y))
  double mu = 0.0;            ///< E z = I_{1/2} / I_{-1/2}
  double one_minus_mu = 0.0;  ///< E(1 - z), integrated directly
  double d = 0.0;             ///< E z(1 - z) = (I_{1/2} - I_{3/2}) / I_{-1/2}
  double est_rel_error = 0.0;
};

/// Throws AccuracyError if the quadrature does not converge.
ShrinkageMoments shrinkage_moments(double y, double tau, const quad::Tolerance& tol = {});

double posterior_mean(double y, double tau, const quad::Tolerance& tol = {});
double posterior_variance(double y, double tau, const quad::Tolerance& tol = {});
double posterior_cumulant4(double y, double tau, const quad::Tolerance& tol = {});

/// Mean and variance (and optionally the fourth cumulant) in one pass.
CoordinatePosterior coordinate_posterior(double y, double tau, const quad::Tolerance& tol = {},
                                         bool with_cumulant4 = false);

/// Per-observation score: tau * d/dtau log psi_tau(y).
double m_tau(double y, double tau, const quad::Tolerance& tol = {});

/// M_tau(Y) = sum_i log psi_tau(y_i).
double log_marginal_likelihood(std::span<const double> ys, double tau, const quad::Tolerance& tol = {});

/// dM_tau(Y)/dtau = (1/tau) sum_i m_tau(y_i).
double score(std::span<const double> ys, double tau, const quad::Tolerance& tol = {});

/// E_0 m_tau(Y) for Y ~ N(0, 1); requires 0 < tau < 1.
double expected_m_tau_null(double tau, const quad::Tolerance& tol = {});

/// Posterior CDF P(theta <= t | y, tau).
double posterior_cdf(double t, double y, double tau, const quad::Tolerance& tol = {});

double posterior_quantile(double prob, double y, double tau, const quad::Tolerance& tol = {});

/// Equal-tailed credible interval at the given level.
std::pair<double, double> posterior_interval(double y, double tau, double level,
                                             const quad::Tolerance& tol = {});

struct MTauBounds {
  /// Estimate of C_u = sup m_tau(y); never below the limit 1 of m_tau(y) as |y| grows.
  double c_u_estimate = 1.0;
  /// Largest m_tau seen on the grid.
  double grid_max = 0.0;
  double grid_min = 0.0;
  std::string grid_spec;
};

MTauBounds estimate_m_tau_bounds(int max_j = 30, int y_points = 400);

/// Computed once per process and cached.
const MTauBounds& m_tau_bounds();

}  // namespace horseshoe
