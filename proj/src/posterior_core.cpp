#include "horseshoe/posterior_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "horseshoe/errors.hpp"
#include "horseshoe/special_integrals.hpp"
#include "horseshoe/z_integral.hpp"

namespace horseshoe {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void check_inputs(double y, double tau) {
  if (!std::isfinite(y)) throw InvalidArgument("observation must be finite");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive and finite");
}

template <std::size_t N>
void require_converged(const quad::Result<N>& r, const char* what) {
  if (!r.converged) throw AccuracyError(std::string(what) + ": quadrature did not reach tolerance");
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct CentralMoments {
  double c2, c3, c4;
};

CentralMoments central_moments(double y, double tau, const ShrinkageMoments& m, const quad::Tolerance& tol) {
  // z - mu written as (1 - mu) - (1 - z) keeps precision when mu is close to 1.
  const double omm = m.one_minus_mu;
  auto r = detail::integrate_z<4>(
      std::abs(y), tau,
      [omm](double, double omz) {
        const double c = omm - omz;
        const double c2 = c * c;
        return std::array<double, 4>{1.0, c2, c2 * c, c2 * c2};
      },
      tol);
  require_converged(r, "central moments");
  return {r.value[1] / r.value[0], r.value[2] / r.value[0], r.value[3] / r.value[0]};
}

}  // namespace

ShrinkageMoments shrinkage_moments(double y, double tau, const quad::Tolerance& tol) {
  check_inputs(y, tau);
  auto r = detail::integrate_z<4>(
      std::abs(y), tau, [](double z, double omz) { return std::array<double, 4>{1.0, z, omz, z * omz}; }, tol);
  require_converged(r, "shrinkage moments");
  ShrinkageMoments m;
  m.log_scaled_i = std::log(r.value[0]);
  m.mu = r.value[1] / r.value[0];
  m.one_minus_mu = r.value[2] / r.value[0];
  m.d = r.value[3] / r.value[0];
  m.est_rel_error = 0.0;
  for (std::size_t c = 0; c < 4; ++c) m.est_rel_error = std::max(m.est_rel_error, r.rel_error(c));
  return m;
}

double posterior_mean(double y, double tau, const quad::Tolerance& tol) {
  if (y == 0.0) {
    check_inputs(y, tau);
    return 0.0;
  }
  return y * shrinkage_moments(y, tau, tol).mu;
}

double posterior_variance(double y, double tau, const quad::Tolerance& tol) {
  const auto m = shrinkage_moments(y, tau, tol);
  // var = E z + y^2 var(z), and var(z) = E z (1 - E z) - E z(1 - z).
  const double var_z = m.mu * m.one_minus_mu - m.d;
  return m.mu + y * y * var_z;
}

double posterior_cumulant4(double y, double tau, const quad::Tolerance& tol) {
  const auto m = shrinkage_moments(y, tau, tol);
  const auto c = central_moments(y, tau, m, tol);
  // theta | z ~ N(y z, z): its cumulant generating function is K_z(s y + s^2/2),
  // so the fourth cumulant is 3 k2 + 6 y^2 k3 + y^4 k4 in the cumulants of z.
  const double k2 = c.c2;
  const double k3 = c.c3;
  const double k4 = c.c4 - 3.0 * c.c2 * c.c2;
  const double y2 = y * y;
  return 3.0 * k2 + 6.0 * y2 * k3 + y2 * y2 * k4;
}

CoordinatePosterior coordinate_posterior(double y, double tau, const quad::Tolerance& tol, bool with_cumulant4) {
  const auto m = shrinkage_moments(y, tau, tol);
  CoordinatePosterior p;
  p.y = y;
  p.tau = tau;
  p.mean = y * m.mu;
  p.variance = m.mu + y * y * (m.mu * m.one_minus_mu - m.d);
  if (with_cumulant4) {
    const auto c = central_moments(y, tau, m, tol);
    const double y2 = y * y;
    p.cumulant4 = 3.0 * c.c2 + 6.0 * y2 * c.c3 + y2 * y2 * (c.c4 - 3.0 * c.c2 * c.c2);
  }
  return p;
}

double m_tau(double y, double tau, const quad::Tolerance& tol) {
  // m = y^2 E z(1-z) - E z equals 1 - 2 tau^2 E[(1-z)/N(z)]; the second form
  // keeps full precision as m approaches its limit 1 for large |y|.
  check_inputs(y, tau);
  const double tau2 = tau * tau;
  auto r = detail::integrate_z<2>(
      std::abs(y), tau,
      [tau2](double z, double omz) { return std::array<double, 2>{1.0, 2.0 * tau2 * omz / (z + tau2 * omz)}; }, tol);
  require_converged(r, "m_tau");
  return 1.0 - r.value[1] / r.value[0];
}

double log_marginal_likelihood(std::span<const double> ys, double tau, const quad::Tolerance& tol) {
  if (ys.empty()) throw InvalidArgument("observation vector is empty");
  double total = 0.0;
  for (double y : ys) total += log_marginal_density(y, tau, tol);
  return total;
}

double score(std::span<const double> ys, double tau, const quad::Tolerance& tol) {
  if (ys.empty()) throw InvalidArgument("observation vector is empty");
  double total = 0.0;
  for (double y : ys) total += m_tau(y, tau, tol);
  return total / tau;
}

double expected_m_tau_null(double tau, const quad::Tolerance& tol) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("expected_m_tau_null requires 0 < tau < 1");
  constexpr double cutoff = 40.0;
  const double z = zeta(tau);
  std::vector<double> bp{0.0};
  for (double f : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    if (f * z < cutoff) bp.push_back(f * z);
  }
  if (tau <= std::exp(-1.0)) {
    const double k = kappa(tau);
    if (k < cutoff) bp.push_back(k);
  }
  for (double y : {1.0, 2.0, 4.0, 8.0}) bp.push_back(y);
  bp.push_back(cutoff);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto f = [&](double y) {
    const double phi = std::exp(-0.5 * y * y - kLogSqrt2Pi);
    return 2.0 * m_tau(y, tau, tol) * phi;
  };
  quad::Tolerance outer = tol;
  outer.rel = std::max(tol.rel, 1e-9);
  const auto r = quad::integrate_scalar(f, bp, outer);
  require_converged(r, "E_0 m_tau");
  // Beyond the cutoff m_tau <= C_u bounds the contribution by C_u times the tail mass.
  const double tail = m_tau_bounds().c_u_estimate * std::erfc(cutoff / std::numbers::sqrt2);
  return r.value[0] + tail;
}

double posterior_cdf(double t, double y, double tau, const quad::Tolerance& tol) {
  check_inputs(y, tau);
  if (!std::isfinite(t)) return t > 0 ? 1.0 : 0.0;
  auto r = detail::integrate_z<2>(
      std::abs(y), tau,
      [t, y](double z, double) {
        const double sd = std::sqrt(z);
        return std::array<double, 2>{1.0, std_normal_cdf((t - y * z) / sd)};
      },
      tol);
  require_converged(r, "posterior cdf");
  return std::clamp(r.value[1] / r.value[0], 0.0, 1.0);
}

double posterior_quantile(double prob, double y, double tau, const quad::Tolerance& tol) {
  if (!(prob > 0.0 && prob < 1.0)) throw InvalidArgument("probability must lie in (0, 1)");
  check_inputs(y, tau);
  // Given z, theta ~ N(y z, z) with z in [0, 1]; ten standard deviations
  // beyond [min(0, y), max(0, y)] carry negligible mass.
  double lo = std::min(0.0, y) - 10.0;
  double hi = std::max(0.0, y) + 10.0;
  const double c_lo = posterior_cdf(lo, y, tau, tol);
  const double c_hi = posterior_cdf(hi, y, tau, tol);
  if (c_lo > 1e-4 || c_hi < 1.0 - 1e-4) throw AccuracyError("posterior mass not captured by the integration range");
  const double f_lo = c_lo - prob;
  const double f_hi = c_hi - prob;
  std::uintmax_t max_iter = 200;
  auto res = boost::math::tools::toms748_solve([&](double t) { return posterior_cdf(t, y, tau, tol) - prob; }, lo, hi,
                                               f_lo, f_hi, boost::math::tools::eps_tolerance<double>(45), max_iter);
  return 0.5 * (res.first + res.second);
}

std::pair<double, double> posterior_interval(double y, double tau, double level, const quad::Tolerance& tol) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  const double alpha = 0.5 * (1.0 - level);
  if (y == 0.0) {
    // The posterior is symmetric about zero.
    const double a = posterior_quantile(1.0 - alpha, 0.0, tau, tol);
    return {-a, a};
  }
  return {posterior_quantile(alpha, y, tau, tol), posterior_quantile(1.0 - alpha, y, tau, tol)};
}

MTauBounds estimate_m_tau_bounds(int max_j, int y_points) {
  MTauBounds b;
  b.grid_max = -std::numeric_limits<double>::infinity();
  b.grid_min = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= max_j; ++j) {
    const double tau = std::ldexp(1.0, -j);
    const double y_max = 50.0 * zeta(tau);
    for (int i = 0; i < y_points; ++i) {
      const double y = y_max * i / (y_points - 1);
      const double m = m_tau(y, tau);
      b.grid_max = std::max(b.grid_max, m);
      b.grid_min = std::min(b.grid_min, m);
    }
  }
  b.c_u_estimate = std::max(1.0, b.grid_max);
  std::ostringstream os;
  os << "tau = 2^-j, j = 1.." << max_j << "; y uniform on [0, 50 zeta_tau], " << y_points << " points";
  b.grid_spec = os.str();
  return b;
}

const MTauBounds& m_tau_bounds() {
  static const MTauBounds bounds = estimate_m_tau_bounds();
  return bounds;
}

}  // namespace horseshoe
