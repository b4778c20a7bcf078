#include "horseshoe/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/tools/minima.hpp>

#include "horseshoe/errors.hpp"
#include "horseshoe/parallel.hpp"

namespace horseshoe {

namespace {

void check_observations(std::span<const double> ys) {
  if (ys.empty()) throw InvalidArgument("observation vector is empty");
  for (double y : ys) {
    if (!std::isfinite(y)) throw InvalidArgument("observations must be finite");
  }
}

}  // namespace

double simple_estimator(std::span<const double> ys, const SimpleEstimatorParams& params) {
  check_observations(ys);
  if (!(params.c1 > 0.0) || !(params.c2 > 0.0)) throw InvalidArgument("c1 and c2 must be positive");
  const double n = static_cast<double>(ys.size());
  const double threshold = std::sqrt(params.c1 * std::log(n));
  const auto count = std::count_if(ys.begin(), ys.end(), [&](double y) { return std::abs(y) >= threshold; });
  return std::max(static_cast<double>(count) / (params.c2 * n), 1.0 / n);
}

std::string_view to_string(BoundaryFlag f) {
  switch (f) {
    case BoundaryFlag::interior:
      return "interior";
    case BoundaryFlag::at_lower:
      return "at_lower";
    case BoundaryFlag::at_upper:
      return "at_upper";
  }
  return "interior";
}

std::vector<double> mmle_grid(std::size_t n, std::size_t points) {
  if (n == 0) throw InvalidArgument("n must be positive");
  if (points == 0) throw InvalidArgument("grid needs at least one point");
  const double lo = std::log(1.0 / static_cast<double>(n));
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = std::exp(lo);
    return grid;
  }
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::exp(lo * (1.0 - static_cast<double>(i) / static_cast<double>(points - 1)));
  }
  grid.back() = 1.0;
  return grid;
}

MMLEResult mmle(std::span<const double> ys, const MMLEOptions& options) {
  check_observations(ys);
  const std::size_t n = ys.size();
  const double tau_lo = 1.0 / static_cast<double>(n);
  const auto grid = mmle_grid(n, options.grid_points);

  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = log_marginal_likelihood(ys, grid[i], options.quadrature); });

  MMLEResult out;
  out.n_evaluations = grid.size();
  if (options.keep_profile) {
    out.profile.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.profile.emplace_back(grid[i], values[i]);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  double tau_hat = grid[best];
  double m_hat = values[best];

  if (n > 1) {
    const double a = best > 0 ? grid[best - 1] : tau_lo;
    const double b = best + 1 < grid.size() ? grid[best + 1] : 1.0;
    // Shift log tau so the search variable is >= 1; Brent's tolerance is then
    // effectively absolute in log tau.
    const double shift = 1.0 - std::log(tau_lo);
    std::size_t evals = 0;
    auto objective = [&](double u) {
      ++evals;
      return -log_marginal_likelihood(ys, std::exp(u - shift), options.quadrature);
    };
    const int bits = std::clamp(static_cast<int>(std::ceil(1.0 - std::log2(options.log_tau_tol))), 8, 40);
    std::uintmax_t max_iter = 200;
    const auto [u_min, f_min] =
        boost::math::tools::brent_find_minima(objective, std::log(a) + shift, std::log(b) + shift, bits, max_iter);
    out.n_evaluations += evals;
    out.refined = max_iter < 200;
    const double m_ref = -f_min;
    if (m_ref > m_hat) {
      m_hat = m_ref;
      tau_hat = std::clamp(std::exp(u_min - shift), tau_lo, 1.0);
    }
  }

  out.tau_hat = tau_hat;
  out.log_likelihood_at_max = m_hat;
  const double edge = 10.0 * options.log_tau_tol;
  if (std::log(tau_hat) - std::log(tau_lo) <= edge) {
    out.boundary = BoundaryFlag::at_lower;
  } else if (-std::log(tau_hat) <= edge) {
    out.boundary = BoundaryFlag::at_upper;
  }
  return out;
}

std::vector<CoordinatePosterior> eb_fit(std::span<const double> ys, double tau_hat, const quad::Tolerance& tol) {
  check_observations(ys);
  const double n = static_cast<double>(ys.size());
  if (!(tau_hat >= (1.0 / n) * (1.0 - 1e-12) && tau_hat <= 1.0 + 1e-12)) {
    throw InvalidArgument("tau_hat must lie in [1/n, 1]");
  }
  std::vector<CoordinatePosterior> out(ys.size());
  parallel_for(ys.size(), [&](std::size_t i) {
    out[i] = coordinate_posterior(ys[i], tau_hat, tol);
    if (ys[i] == 0.0) out[i].mean = 0.0;
  });
  return out;
}

}  // namespace horseshoe
