#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "horseshoe/posterior_core.hpp"
#include "horseshoe/quadrature.hpp"

namespace horseshoe {

enum class PriorFamily { truncated_cauchy, uniform, reciprocal, half_cauchy };

std::string_view to_string(PriorFamily f);
/// Accepts the family names above; throws InvalidArgument otherwise.
PriorFamily parse_prior_family(std::string_view name);

/// Hyperprior on tau. The first three families live on a bounded interval
/// (default [1/n, 1]); half_cauchy lives on (0, inf).
class TauPrior {
 public:
  static TauPrior standard(PriorFamily family, std::size_t n);
  static TauPrior on_support(PriorFamily family, double lower, double upper);

  PriorFamily family() const { return family_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool bounded() const { return family_ != PriorFamily::half_cauchy; }
  bool in_support(double tau) const;

  /// Normalized log density; -inf outside the support.
  double log_density(double tau) const;

 private:
  TauPrior(PriorFamily family, double lower, double upper);

  PriorFamily family_;
  double lower_;
  double upper_;
  double log_norm_ = 0.0;
};

struct TauPosterior {
  std::vector<double> grid;
  /// Normalized log masses (quadrature weight included), one per grid point.
  std::vector<double> log_weights;
  /// Log marginal evidence: log of the integral of pi(tau) e^{M_tau(Y)}.
  double normalizer = 0.0;

  std::vector<double> weights() const;
  double mean() const;
};

/// log pi(tau) + M_tau(Y); -inf outside the prior support.
double log_tau_posterior_unnorm(double tau, std::span<const double> ys, const TauPrior& prior,
                                const quad::Tolerance& tol = {});

/// The transformed coordinate x and the map back to tau used by tau_posterior.
/// Bounded supports use x = log tau. The half-Cauchy uses u = arctan tau and
/// x = logit(2u / pi), which is log-uniform in tau near both ends.
std::vector<double> tau_grid(const TauPrior& prior, std::size_t grid_size);

/// Deterministic quadrature over tau with trapezoidal weights in the transformed coordinate.
TauPosterior tau_posterior(std::span<const double> ys, const TauPrior& prior, std::size_t grid_size = 400,
                           const quad::Tolerance& tol = {});

/// Coordinate posteriors mixed over the tau posterior (law of total variance).
std::vector<CoordinatePosterior> hb_fit(std::span<const double> ys, const TauPosterior& posterior,
                                        const quad::Tolerance& tol = {});
std::vector<CoordinatePosterior> hb_fit(std::span<const double> ys, const TauPrior& prior, std::size_t grid_size = 400,
                                        const quad::Tolerance& tol = {});

/// Equal-tailed credible interval for theta_i mixed over the tau posterior.
std::pair<double, double> hb_interval(double y, const TauPosterior& posterior, double level,
                                      const quad::Tolerance& tol = {});

/// Posterior probability that tau exceeds the threshold.
double tau_tail_mass(const TauPosterior& posterior, double threshold);

}  // namespace horseshoe
