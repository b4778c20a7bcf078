#include "horseshoe/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "horseshoe/errors.hpp"
#include "horseshoe/parallel.hpp"

namespace horseshoe {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Logit range for the compactified half-Cauchy grid: tau from about 1e-9 to 1e6.
constexpr double kHalfCauchyXLo = -20.7;
constexpr double kHalfCauchyXHi = 14.3;

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct GridPoint {
  double tau;
  double log_jacobian;  // log dtau/dx
};

std::vector<GridPoint> transformed_grid(const TauPrior& prior, std::size_t grid_size) {
  if (grid_size < 2) throw InvalidArgument("tau grid needs at least two points");
  std::vector<GridPoint> pts(grid_size);
  const double last = static_cast<double>(grid_size - 1);
  if (prior.bounded()) {
    const double a = std::log(prior.lower());
    const double b = std::log(prior.upper());
    for (std::size_t j = 0; j < grid_size; ++j) {
      const double x = a + (b - a) * static_cast<double>(j) / last;
      pts[j] = {std::exp(x), x};
    }
    pts.front().tau = prior.lower();
    pts.back().tau = prior.upper();
  } else {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    for (std::size_t j = 0; j < grid_size; ++j) {
      const double x = kHalfCauchyXLo + (kHalfCauchyXHi - kHalfCauchyXLo) * static_cast<double>(j) / last;
      const double s = logistic(x);
      const double u = half_pi * s;
      const double c = std::cos(u);
      // dtau/dx = sec^2(u) * (pi/2) s (1 - s)
      pts[j] = {std::tan(u), std::log(half_pi * s * (1.0 - s)) - 2.0 * std::log(c)};
    }
  }
  return pts;
}

struct ActiveWeights {
  std::vector<double> tau;
  std::vector<double> w;
};

// Grid points carrying less than 1e-15 of the mass are skipped; the rest are renormalized.
ActiveWeights active_weights(const TauPosterior& posterior) {
  ActiveWeights a;
  double kept = 0.0;
  for (std::size_t j = 0; j < posterior.grid.size(); ++j) {
    const double wj = std::exp(posterior.log_weights[j]);
    if (wj >= 1e-15) {
      a.tau.push_back(posterior.grid[j]);
      a.w.push_back(wj);
      kept += wj;
    }
  }
  for (double& x : a.w) x /= kept;
  return a;
}

double grid_step(const TauPrior& prior, std::size_t grid_size) {
  const double last = static_cast<double>(grid_size - 1);
  if (prior.bounded()) return (std::log(prior.upper()) - std::log(prior.lower())) / last;
  return (kHalfCauchyXHi - kHalfCauchyXLo) / last;
}

}  // namespace

std::string_view to_string(PriorFamily f) {
  switch (f) {
    case PriorFamily::truncated_cauchy:
      return "truncated_cauchy";
    case PriorFamily::uniform:
      return "uniform";
    case PriorFamily::reciprocal:
      return "reciprocal";
    case PriorFamily::half_cauchy:
      return "half_cauchy";
  }
  return "truncated_cauchy";
}

PriorFamily parse_prior_family(std::string_view name) {
  for (auto f : {PriorFamily::truncated_cauchy, PriorFamily::uniform, PriorFamily::reciprocal,
                 PriorFamily::half_cauchy}) {
    if (name == to_string(f)) return f;
  }
  throw InvalidArgument("unknown prior family '" + std::string(name) +
                        "' (expected truncated_cauchy, uniform, reciprocal or half_cauchy)");
}

TauPrior::TauPrior(PriorFamily family, double lower, double upper) : family_(family), lower_(lower), upper_(upper) {
  switch (family_) {
    case PriorFamily::truncated_cauchy:
      log_norm_ = -std::log(std::atan(upper_) - std::atan(lower_));
      break;
    case PriorFamily::uniform:
      log_norm_ = -std::log(upper_ - lower_);
      break;
    case PriorFamily::reciprocal:
      log_norm_ = -std::log(std::log(upper_ / lower_));
      break;
    case PriorFamily::half_cauchy:
      log_norm_ = std::log(2.0 / std::numbers::pi);
      break;
  }
}

TauPrior TauPrior::standard(PriorFamily family, std::size_t n) {
  if (n == 0) throw InvalidArgument("n must be positive");
  if (family == PriorFamily::half_cauchy) return TauPrior(family, 0.0, std::numeric_limits<double>::infinity());
  if (n == 1) throw InvalidArgument("the support [1/n, 1] is degenerate for n = 1");
  return TauPrior(family, 1.0 / static_cast<double>(n), 1.0);
}

TauPrior TauPrior::on_support(PriorFamily family, double lower, double upper) {
  if (family == PriorFamily::half_cauchy) {
    if (lower == 0.0 && std::isinf(upper)) return TauPrior(family, lower, upper);
    throw InvalidArgument("half_cauchy has support (0, inf); use truncated_cauchy for a bounded support");
  }
  if (!(lower > 0.0) || !(upper > lower) || !std::isfinite(upper)) {
    throw InvalidArgument("prior support must satisfy 0 < lower < upper < inf");
  }
  return TauPrior(family, lower, upper);
}

bool TauPrior::in_support(double tau) const {
  if (family_ == PriorFamily::half_cauchy) return tau > 0.0 && std::isfinite(tau);
  return tau >= lower_ && tau <= upper_;
}

double TauPrior::log_density(double tau) const {
  if (!in_support(tau)) return kNegInf;
  switch (family_) {
    case PriorFamily::truncated_cauchy:
    case PriorFamily::half_cauchy:
      return log_norm_ - std::log1p(tau * tau);
    case PriorFamily::uniform:
      return log_norm_;
    case PriorFamily::reciprocal:
      return log_norm_ - std::log(tau);
  }
  return kNegInf;
}

std::vector<double> TauPosterior::weights() const {
  std::vector<double> w(log_weights.size());
  std::transform(log_weights.begin(), log_weights.end(), w.begin(), [](double l) { return std::exp(l); });
  return w;
}

double TauPosterior::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) m += grid[j] * std::exp(log_weights[j]);
  return m;
}

double log_tau_posterior_unnorm(double tau, std::span<const double> ys, const TauPrior& prior,
                                const quad::Tolerance& tol) {
  const double lp = prior.log_density(tau);
  if (!std::isfinite(lp)) return kNegInf;
  return lp + log_marginal_likelihood(ys, tau, tol);
}

std::vector<double> tau_grid(const TauPrior& prior, std::size_t grid_size) {
  const auto pts = transformed_grid(prior, grid_size);
  std::vector<double> g(pts.size());
  std::transform(pts.begin(), pts.end(), g.begin(), [](const GridPoint& p) { return p.tau; });
  return g;
}

TauPosterior tau_posterior(std::span<const double> ys, const TauPrior& prior, std::size_t grid_size,
                           const quad::Tolerance& tol) {
  if (ys.empty()) throw InvalidArgument("observation vector is empty");
  if (grid_size < 50) throw InvalidArgument("grid_size must be at least 50");
  const auto pts = transformed_grid(prior, grid_size);
  const double log_dx = std::log(grid_step(prior, grid_size));

  std::vector<double> lw(pts.size());
  parallel_for(pts.size(), [&](std::size_t j) {
    const double trap = (j == 0 || j + 1 == pts.size()) ? std::log(0.5) : 0.0;
    lw[j] = log_tau_posterior_unnorm(pts[j].tau, ys, prior, tol) + pts[j].log_jacobian + log_dx + trap;
  });

  TauPosterior post;
  post.grid.resize(pts.size());
  std::transform(pts.begin(), pts.end(), post.grid.begin(), [](const GridPoint& p) { return p.tau; });
  post.normalizer = log_sum_exp(lw);
  if (!std::isfinite(post.normalizer)) throw AccuracyError("tau posterior has no finite mass on the grid");
  post.log_weights.resize(lw.size());
  std::transform(lw.begin(), lw.end(), post.log_weights.begin(), [&](double l) { return l - post.normalizer; });
  return post;
}

std::vector<CoordinatePosterior> hb_fit(std::span<const double> ys, const TauPosterior& posterior,
                                        const quad::Tolerance& tol) {
  if (ys.empty()) throw InvalidArgument("observation vector is empty");
  const auto [taus, w] = active_weights(posterior);
  const double tau_mean = posterior.mean();

  std::vector<CoordinatePosterior> out(ys.size());
  parallel_for(ys.size(), [&](std::size_t i) {
    const double y = ys[i];
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t a = 0; a < taus.size(); ++a) {
      const auto p = coordinate_posterior(y, taus[a], tol);
      mean += w[a] * p.mean;
      second += w[a] * (p.variance + p.mean * p.mean);
    }
    CoordinatePosterior& c = out[i];
    c.y = y;
    c.tau = tau_mean;
    c.mean = y == 0.0 ? 0.0 : mean;
    c.variance = std::max(second - mean * mean, 0.0);
  });
  return out;
}

std::vector<CoordinatePosterior> hb_fit(std::span<const double> ys, const TauPrior& prior, std::size_t grid_size,
                                        const quad::Tolerance& tol) {
  return hb_fit(ys, tau_posterior(ys, prior, grid_size, tol), tol);
}

std::pair<double, double> hb_interval(double y, const TauPosterior& posterior, double level,
                                      const quad::Tolerance& tol) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  if (!std::isfinite(y)) throw InvalidArgument("observation must be finite");
  const auto [taus, w] = active_weights(posterior);
  auto cdf = [&](double t) {
    double c = 0.0;
    for (std::size_t a = 0; a < taus.size(); ++a) c += w[a] * posterior_cdf(t, y, taus[a], tol);
    return c;
  };
  const double lo = std::min(0.0, y) - 10.0;
  const double hi = std::max(0.0, y) + 10.0;
  const double c_lo = cdf(lo), c_hi = cdf(hi);
  if (c_lo > 1e-4 || c_hi < 1.0 - 1e-4) throw AccuracyError("posterior mass not captured by the integration range");
  auto quantile = [&](double prob) {
    std::uintmax_t max_iter = 200;
    const auto r = boost::math::tools::toms748_solve([&](double t) { return cdf(t) - prob; }, lo, hi, c_lo - prob,
                                                     c_hi - prob, boost::math::tools::eps_tolerance<double>(40),
                                                     max_iter);
    return 0.5 * (r.first + r.second);
  };
  const double alpha = 0.5 * (1.0 - level);
  if (y == 0.0) {
    const double a = quantile(1.0 - alpha);
    return {-a, a};
  }
  return {quantile(alpha), quantile(1.0 - alpha)};
}

double tau_tail_mass(const TauPosterior& posterior, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  double mass = 0.0;
  for (std::size_t j = 0; j < posterior.grid.size(); ++j) {
    if (posterior.grid[j] > threshold) mass += std::exp(posterior.log_weights[j]);
  }
  return std::min(mass, 1.0);
}

}  // namespace horseshoe
