#pragma once

// Integrals over the shrinkage variable z in [0, 1] against the kernel
//
//   z^{-1/2} exp(-y^2 (1 - z) / 2) / (tau^2 (1 - z) + z),
//
// which is e^{-y^2/2} times the integrand of I_{-1/2}. Every posterior
// quantity is a ratio of such integrals with a polynomial-type weight q(z).
//
// The integral is evaluated in s = log z. In that coordinate the Lorentzian
// spike of width tau^2 becomes a logistic step of unit width and the boundary
// layer at z = 1 (width 2/y^2) is resolved with 1 - z = -expm1(s), so neither
// small tau nor large |y| loses precision. The piece [0, z_min] is added in
// closed form using the leading-order behaviour of the integrand.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "horseshoe/quadrature.hpp"

namespace horseshoe::detail {

inline std::vector<double> z_breakpoints(double y, double tau, double s_min) {
  std::vector<double> bp{s_min, 0.0};
  auto add = [&](double s) {
    if (std::isfinite(s) && s > s_min && s < 0.0) bp.push_back(s);
  };
  constexpr double s_half = -0.6931471805599453;
  double s_lo = s_half;
  if (tau < 1.0) {
    // Logistic step of 1/N(z) sits at tau^2 = (1 - tau^2) z.
    const double s_t = 2.0 * std::log(tau) - std::log1p(-tau * tau);
    for (double off : {-5.0, -1.7, 1.7, 5.0}) add(s_t + off);
    for (double s = s_t + 9.0; s < s_half - 2.0; s += 4.0) add(s);
    s_lo = std::min(s_lo, s_t - 5.0);
  }
  add(s_half);
  for (double s = s_lo - 16.0; s > s_min + 4.0; s -= 16.0) add(s);
  const double half_y2 = 0.5 * y * y;
  if (half_y2 > 1.0) {
    for (double c : {1.0, 4.0, 12.0, 30.0}) {
      const double omz = c / half_y2;
      if (omz < 0.5) add(std::log1p(-omz));
    }
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

/// Integrates z^{-1/2} q(z) e^{-y^2(1-z)/2} / N(z) over [0, 1], where
/// `weights(z, one_minus_z)` returns q for N components. Weights must be
/// bounded near z = 0.
template <std::size_t N, class Weights>
quad::Result<N> integrate_z(double y, double tau, Weights&& weights, const quad::Tolerance& tol) {
  const double y2 = y * y;
  const double tau2 = tau * tau;
  const double z_min = 1e-8 * std::min(1.0, tau2);
  const double s_min = std::log(z_min);

  auto f = [&](double s) {
    const double root = std::exp(0.5 * s);
    const double z = root * root;
    const double omz = s > -0.75 ? -std::expm1(s) : 1.0 - z;
    const double n_z = z + tau2 * omz;
    const double base = root * std::exp(-0.5 * y2 * omz) / n_z;
    std::array<double, N> q = weights(z, omz);
    for (auto& v : q) v *= base;
    return q;
  };

  const auto bp = z_breakpoints(y, tau, s_min);
  auto res = quad::integrate<N>(f, bp, tol);

  // Head [0, z_min]: z^{-1/2} integrates to 2 sqrt(z_min); the weight is
  // sampled at z_min / 3, which is exact for weights linear in z.
  const double zh = z_min / 3.0;
  const std::array<double, N> qh = weights(zh, 1.0 - zh);
  const double head_scale = 2.0 * std::sqrt(z_min) * std::exp(-0.5 * y2) / (zh + tau2 * (1.0 - zh));
  for (std::size_t c = 0; c < N; ++c) {
    const double h = head_scale * qh[c];
    res.value[c] += h;
    res.l1[c] += std::abs(h);
  }
  return res;
}

}  // namespace horseshoe::detail
