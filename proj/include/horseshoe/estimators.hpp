#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "horseshoe/posterior_core.hpp"
#include "horseshoe/quadrature.hpp"

namespace horseshoe {

struct SimpleEstimatorParams {
  double c1 = 2.0;
  double c2 = 1.0;
};

/// max(#{|y_i| >= sqrt(c1 log n)} / (c2 n), 1/n).
double simple_estimator(std::span<const double> ys, const SimpleEstimatorParams& params = {});

enum class BoundaryFlag { interior, at_lower, at_upper };

std::string_view to_string(BoundaryFlag f);

struct MMLEOptions {
  std::size_t grid_points = 200;
  bool keep_profile = false;
  /// Absolute tolerance on log tau for the Brent refinement.
  double log_tau_tol = 1e-7;
  quad::Tolerance quadrature{};
};

struct MMLEResult {
  double tau_hat = 0.0;
  double log_likelihood_at_max = 0.0;
  std::size_t n_evaluations = 0;
  /// (tau, M_tau) at the coarse grid points, when requested.
  std::vector<std::pair<double, double>> profile;
  BoundaryFlag boundary = BoundaryFlag::interior;
  /// False when the refinement did not converge and the best grid point was returned.
  bool refined = true;
};

/// Maximizer of M_tau(Y) over [1/n, 1]: log-uniform grid scan, then Brent
/// (golden section with parabolic steps) in log tau around the best grid
/// point. Ties go to the smaller tau.
MMLEResult mmle(std::span<const double> ys, const MMLEOptions& options = {});

/// The log-uniform grid used by mmle.
std::vector<double> mmle_grid(std::size_t n, std::size_t points);

/// Plug-in posterior at a fixed tau_hat in [1/n, 1].
std::vector<CoordinatePosterior> eb_fit(std::span<const double> ys, double tau_hat, const quad::Tolerance& tol = {});

}  // namespace horseshoe
