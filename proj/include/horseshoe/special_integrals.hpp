#pragma once

#include <optional>

#include "horseshoe/quadrature.hpp"

namespace horseshoe {

/// log(e^{-y^2/2} I_k(y)) for I_k(y) = int_0^1 z^k e^{y^2 z/2} / (tau^2 + (1 - tau^2) z) dz.
struct ScaledIk {
  double k = 0.0;
  double y = 0.0;
  double tau = 0.0;
  double log_value = 0.0;
  double est_rel_error = 0.0;
  /// False when the quadrature stopped before reaching the tolerance.
  bool accurate = true;
};

/// k must be one of -1/2, 1/2, 3/2, 5/2, 7/2.
ScaledIk scaled_ik(double y, double tau, double k, const quad::Tolerance& tol = {});

/// log psi_tau(y), the log density of Y_i after integrating out theta_i.
double log_marginal_density(double y, double tau, const quad::Tolerance& tol = {});

/// Marginal horseshoe prior density g_tau(theta). Throws PoleError at theta = 0.
double prior_density(double theta, double tau, const quad::Tolerance& tol = {});

/// int_1^y u^k e^u du, for y >= 1.
double incomplete_exp_integral(double y, double k);

/// zeta_tau = sqrt(2 log(1/tau)); DomainError unless 0 < tau < 1.
double zeta(double tau);

/// kappa_tau, the root kappa >= sqrt(2) of e^{kappa^2/2} = kappa^2 / (2 tau).
/// Exists exactly when tau <= 1/e; DomainError otherwise.
double kappa(double tau);

/// tau_n(p) = (p/n) sqrt(log(n/p)).
double tau_n(double p, double n);

/// t_n = C_u pi^{3/2} tau_n(p).
double t_n(double p, double n, double c_u);

struct ShrinkageScales {
  double tau = 0.0;
  double zeta = 0.0;
  std::optional<double> kappa;

  static ShrinkageScales at(double tau);
};

}  // namespace horseshoe
