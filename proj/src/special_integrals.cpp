#include "horseshoe/special_integrals.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/z_integral.hpp"

namespace horseshoe {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void check_y_tau(double y, double tau) {
  if (!std::isfinite(y)) throw InvalidArgument("observation must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive and finite");
}

double ipow(double z, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

}  // namespace

ScaledIk scaled_ik(double y, double tau, double k, const quad::Tolerance& tol) {
  check_y_tau(y, tau);
  // z^k = z^{-1/2} z^{k + 1/2}; admissible k give integer exponents 0..4.
  const double e = k + 0.5;
  const int power = static_cast<int>(std::lround(e));
  if (std::abs(e - power) > 1e-12 || power < 0 || power > 4) {
    throw InvalidArgument("k must be one of -1/2, 1/2, 3/2, 5/2, 7/2");
  }
  const auto res = detail::integrate_z<1>(
      std::abs(y), tau, [power](double z, double) { return std::array<double, 1>{ipow(z, power)}; }, tol);
  ScaledIk out;
  out.k = k;
  out.y = y;
  out.tau = tau;
  out.log_value = std::log(res.value[0]);
  out.est_rel_error = res.rel_error(0);
  out.accurate = res.converged && out.est_rel_error <= tol.rel;
  return out;
}

double log_marginal_density(double y, double tau, const quad::Tolerance& tol) {
  const ScaledIk i = scaled_ik(y, tau, -0.5, tol);
  if (!i.accurate) throw AccuracyError("I_{-1/2} quadrature did not converge");
  return std::log(tau / std::numbers::pi) + i.log_value - kLogSqrt2Pi;
}

double prior_density(double theta, double tau, const quad::Tolerance& tol) {
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive and finite");
  if (theta == 0.0) throw PoleError("horseshoe prior density has a pole at theta = 0");
  const double a = std::abs(theta);
  const double ratio = a / tau;
  constexpr double quarter_pi = 0.25 * std::numbers::pi;

  // lambda = tan(u) maps the half-Cauchy mixing measure to (2/pi) du, and
  // theta / (lambda tau) = ratio / tan(u). The half u > pi/4 is integrated in
  // v = pi/2 - u, where the same quantity is ratio * tan(v) and stays resolved
  // when the mass sits next to u = pi/2.
  auto integrand = [a](double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi) * x / a; };
  auto lower = [&](double u) { return integrand(ratio / std::tan(u)); };
  auto upper = [&](double v) { return integrand(ratio * std::tan(v)); };

  // Geometric breakpoints in tan-space around the peak at x ~ 1.
  auto breakpoints = [&](double scale) {
    std::vector<double> bp{0.0};
    for (double c = 0.05; c * scale < 1.0; c *= 4.0) {
      const double u = std::atan(c * scale);
      if (u > 0.0) bp.push_back(u);
    }
    bp.push_back(quarter_pi);
    return bp;
  };
  const auto r1 = quad::integrate_scalar(lower, breakpoints(ratio), tol);
  const auto r2 = quad::integrate_scalar(upper, breakpoints(1.0 / ratio), tol);
  if (!r1.converged || !r2.converged) throw AccuracyError("prior density quadrature did not converge");
  return (2.0 / std::numbers::pi) * (r1.value[0] + r2.value[0]);
}

double incomplete_exp_integral(double y, double k) {
  if (!(y >= 1.0) || !std::isfinite(y)) throw InvalidArgument("incomplete_exp_integral requires finite y >= 1");
  if (y == 1.0) return 0.0;
  auto f = [&](double u) { return std::pow(u, k) * std::exp(u - y); };
  std::vector<double> bp{1.0};
  for (double c : {64.0, 16.0, 4.0, 1.0}) {
    if (y - c > 1.0) bp.push_back(y - c);
  }
  bp.push_back(y);
  const auto res = quad::integrate_scalar(f, bp, quad::Tolerance{1e-13, 60, 4000});
  return res.value[0] * std::exp(y);
}

double zeta(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("zeta_tau is defined for 0 < tau < 1");
  return std::sqrt(-2.0 * std::log(tau));
}

double kappa(double tau) {
  constexpr double inv_e = 0.36787944117144233;
  if (!(tau > 0.0 && tau <= inv_e)) throw DomainError("kappa_tau is defined for 0 < tau <= 1/e");
  // With x = kappa^2/2 the defining equation reads x - log x = log(1/tau).
  const double target = -std::log(tau);
  auto f = [&](double x) { return x - std::log(x) - target; };

  double lo = 1.0;
  double hi = 2.0 * target + 2.0;
  const double z = std::sqrt(2.0 * target);
  double x = z > 1.0 ? 0.5 * std::pow(z + 2.0 * std::log(z) / z, 2) : 1.0 + target;
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);

  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= 1e-15 * target) break;
    if (fx > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = 1.0 - 1.0 / x;
    double next = d > 0.0 ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return std::sqrt(2.0 * x);
}

double tau_n(double p, double n) {
  if (!(p > 0.0 && p <= n)) throw InvalidArgument("tau_n requires 0 < p <= n");
  return (p / n) * std::sqrt(std::log(n / p));
}

double t_n(double p, double n, double c_u) {
  return c_u * std::pow(std::numbers::pi, 1.5) * tau_n(p, n);
}

ShrinkageScales ShrinkageScales::at(double tau) {
  ShrinkageScales s;
  s.tau = tau;
  s.zeta = horseshoe::zeta(tau);
  if (tau <= 0.36787944117144233) s.kappa = horseshoe::kappa(tau);
  return s;
}

}  // namespace horseshoe
