#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "horseshoe/errors.hpp"
#include "horseshoe/posterior_core.hpp"
#include "horseshoe/special_integrals.hpp"
#include "oracles.hpp"

using namespace horseshoe;

namespace {

const std::vector<double> kTaus{1e-8, 1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.99};

std::vector<double> y_grid(double step = 0.25, double hi = 20.0) {
  std::vector<double> ys;
  for (double y = 0.0; y <= hi + 1e-12; y += step) ys.push_back(y);
  return ys;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("I_{-1/2}(0) matches the arctan closed form") {
  for (double tau : {1e-6, 1e-3, 0.1, 0.5, 0.9}) {
    const auto r = scaled_ik(0.0, tau, -0.5);
    CHECK(r.accurate);
    CHECK(rel(std::exp(r.log_value), oracle::i_minus_half_at_zero(tau)) < 1e-11);
  }
  CHECK(std::exp(scaled_ik(0.0, 0.1, -0.5).log_value) == doctest::Approx(29.561).epsilon(1e-4));
}

TEST_CASE("I_{1/2}(0) tends to 2 as tau shrinks") {
  CHECK(std::exp(scaled_ik(0.0, 1e-8, 0.5).log_value) == doctest::Approx(2.0).epsilon(1e-6));
  for (double tau : {1e-3, 0.1, 0.7}) {
    CHECK(rel(std::exp(scaled_ik(0.0, tau, 0.5).log_value), oracle::ik_direct(0.0, tau, 0.5)) < 1e-11);
  }
}

TEST_CASE("scaled I_k agrees with direct quadrature in w = sqrt(z)") {
  for (double tau : {1e-3, 0.05, 0.5, 1.0}) {
    for (double y : {0.0, 0.7, 2.5, 6.0, 11.0}) {
      for (double k : {-0.5, 0.5, 1.5, 2.5, 3.5}) {
        const auto r = scaled_ik(y, tau, k);
        const double want = std::log(oracle::ik_direct(y, tau, k)) - 0.5 * y * y;
        CHECK(std::abs(r.log_value - want) < 1e-10);
        CHECK(r.est_rel_error <= 1e-10);
      }
    }
  }
}

TEST_CASE("y = 10, tau = 1e-3: scaled I_{-1/2} is about pi/tau e^{-y^2/2} + (y^2/2)^{-1}") {
  const double v = std::exp(scaled_ik(10.0, 1e-3, -0.5).log_value);
  const double direct = oracle::ik_direct(10.0, 1e-3, -0.5) * std::exp(-50.0);
  CHECK(rel(v, direct) < 1e-9);
  const double approx = std::numbers::pi / 1e-3 * std::exp(-50.0) + 1.0 / 50.0;
  CHECK(approx == doctest::Approx(0.02).epsilon(1e-9));
  // The remainder is O(1/y^4) relative to the leading terms.
  CHECK(rel(v, approx) < 0.1);
}

TEST_CASE("I_k is nonincreasing in k and even in y") {
  for (double tau : kTaus) {
    for (double y : y_grid(0.5)) {
      double prev = std::numeric_limits<double>::infinity();
      for (double k : {-0.5, 0.5, 1.5, 2.5, 3.5}) {
        const auto r = scaled_ik(y, tau, k);
        CHECK(std::isfinite(r.log_value));
        CHECK(r.log_value <= prev + 1e-12);
        prev = r.log_value;
        CHECK(scaled_ik(-y, tau, k).log_value == r.log_value);
      }
    }
  }
}

TEST_CASE("scaled I_k for k > 0 is at most 10 (1 ^ y^-2)") {
  for (double tau : kTaus) {
    for (double y : y_grid()) {
      const double bound = 10.0 * std::min(1.0, 1.0 / (y * y));
      for (double k : {0.5, 1.5, 2.5, 3.5}) CHECK(std::exp(scaled_ik(y, tau, k).log_value) <= bound);
    }
  }
}

TEST_CASE("derivative identity I_k'(y) = y I_{k+1}(y)") {
  quad::Tolerance tol{1e-13};
  for (double tau : {1e-4, 1e-2, 0.5}) {
    for (double y = 0.5; y <= 10.0; y += 0.5) {
      for (double k : {-0.5, 0.5, 1.5}) {
        // d/dy log I_k = y + d/dy log(scaled I_k); five-point stencil.
        const double h = 1e-3;
        auto L = [&](double x) { return scaled_ik(x, tau, k, tol).log_value; };
        const double dlog = y + (L(y - 2 * h) - 8 * L(y - h) + 8 * L(y + h) - L(y + 2 * h)) / (12 * h);
        const double want = y * std::exp(scaled_ik(y, tau, k + 1, tol).log_value - scaled_ik(y, tau, k, tol).log_value);
        CHECK(rel(dlog, want) < 1e-5);
      }
    }
  }
}

TEST_CASE("small-tau expansion of I_{-1/2} on [0, 2 zeta]") {
  // I_{-1/2}(y) ~ pi/tau + sqrt(y^2/2) int_1^{y^2/2} v^{-3/2} e^v dv, within 5 sqrt(tau).
  for (double tau : {1e-4, 1e-6, 1e-8}) {
    const double zmax = 2.0 * zeta(tau);
    for (double y = 0.0; y <= zmax; y += zmax / 40.0) {
      const double a = 0.5 * y * y;
      double tail;
      if (a >= 1.0) {
        tail = incomplete_exp_integral(a, -1.5);
      } else if (a > 0.0) {
        tail = -oracle::gk([](double v) { return std::pow(v, -1.5) * std::exp(v); }, a, 1.0);
      } else {
        tail = 0.0;
      }
      const double approx = std::numbers::pi / tau + std::sqrt(a) * tail;
      const double got = std::exp(scaled_ik(y, tau, -0.5).log_value + a);
      CHECK(rel(got, approx) <= 5.0 * std::sqrt(tau));
    }
  }
}

TEST_CASE("I_{1/2} - I_{3/2} ~ e^{y^2/2} / (y^2/2)^2 for large y") {
  const double y = 12.0;
  const auto m = shrinkage_moments(y, 1e-6);
  const double scaled_diff = m.d * std::exp(m.log_scaled_i);
  CHECK(rel(scaled_diff, 1.0 / std::pow(0.5 * y * y, 2)) <= 0.1);
}

TEST_CASE("marginal density: symmetry, normalization and the convolution oracle") {
  for (double y : {0.3, 2.0, 7.5}) CHECK(log_marginal_density(y, 0.2) == log_marginal_density(-y, 0.2));

  // Half-line integral of psi in y = e^s beyond 1; psi(y) ~ 1/y^2 in the tails.
  const double tau = 0.05;
  auto psi = [&](double y) { return std::exp(log_marginal_density(y, tau)); };
  const double inner = oracle::gk(psi, 0.0, 1.0, 1e-13);
  const double outer = oracle::gk([&](double s) { return psi(std::exp(s)) * std::exp(s); }, 0.0, 40.0, 1e-13);
  CHECK(std::abs(2.0 * (inner + outer) - 1.0) < 1e-6);

  const double conv = oracle::convolution(2.0, 0.1, [](double) { return 1.0; });
  CHECK(rel(std::exp(log_marginal_density(2.0, 0.1)), conv) < 1e-8);
}

TEST_CASE("prior density: symmetry, pole, change-of-variables oracle") {
  CHECK(prior_density(0.7, 0.3) == prior_density(-0.7, 0.3));
  CHECK_THROWS_AS(prior_density(0.0, 0.3), PoleError);
  CHECK(rel(prior_density(1.0, 0.1), oracle::prior_density_u(1.0, 0.1)) < 1e-7);
  for (double th : {1e-6, 0.01, 0.5, 3.0, 40.0}) {
    for (double tau : {0.01, 0.3, 1.0}) CHECK(rel(prior_density(th, tau), oracle::prior_density_u(th, tau)) < 1e-7);
  }
}

TEST_CASE("prior density integrates to one") {
  for (double tau : {0.01, 0.1, 1.0}) {
    // theta = tau e^s; the integrand decays like e^{-|s|} at both ends.
    auto f = [&](double s) {
      const double th = tau * std::exp(s);
      return prior_density(th, tau) * th;
    };
    const double total = 2.0 * (oracle::gk(f, -60.0, 0.0, 1e-12) + oracle::gk(f, 0.0, 60.0, 1e-12));
    CHECK(std::abs(total - 1.0) < 1e-5);
  }
}

TEST_CASE("incomplete exponential integral") {
  for (double y : {1.0, 2.5, 10.0, 40.0}) {
    CHECK(rel(incomplete_exp_integral(y, 0.0) + std::numbers::e, std::exp(y)) < 1e-12);
    if (y > 1.0) CHECK(rel(incomplete_exp_integral(y, 1.0), (y - 1.0) * std::exp(y)) < 1e-12);
  }
  const double y = 50.0, k = -1.5;
  const double lead = std::pow(y, k) * std::exp(y) * (1.0 - k / y);
  // The remainder is O(1/y^2); k(k-1)/y^2 = 3.75/2500.
  CHECK(rel(incomplete_exp_integral(y, k), lead) < 4.0 / (y * y));
  CHECK_THROWS_AS(incomplete_exp_integral(0.5, 1.0), InvalidArgument);
}

TEST_CASE("zeta and kappa") {
  CHECK(zeta(1e-4) == doctest::Approx(std::sqrt(2.0 * std::log(1e4))));
  CHECK_THROWS_AS(zeta(1.0), DomainError);
  CHECK_THROWS_AS(zeta(0.0), DomainError);
  for (double tau : {1e-12, 1e-8, 1e-4, 0.01, 0.1, 0.3, std::exp(-1.0)}) {
    const double k = kappa(tau);
    // e^{kappa^2/2} = kappa^2 / (2 tau), compared in logs.
    const double lhs = 0.5 * k * k;
    const double rhs = std::log(k * k / (2.0 * tau));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
    CHECK(k >= std::sqrt(2.0) - 1e-7);
    if (tau < 0.1) CHECK(k > zeta(tau));
  }
  // kappa >= 2 exactly when tau <= 2/e^2.
  CHECK(kappa(2.0 * std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(kappa(0.5), DomainError);
  const auto s = ShrinkageScales::at(0.5);
  CHECK_FALSE(s.kappa.has_value());
  CHECK(ShrinkageScales::at(0.01).kappa.has_value());
}

TEST_CASE("tau_n and t_n") {
  CHECK(tau_n(20, 400) == doctest::Approx(0.05 * std::sqrt(std::log(20.0))));
  CHECK(tau_n(20, 400) == doctest::Approx(0.0865).epsilon(1e-3));
  CHECK(t_n(20, 400, 1.0) == doctest::Approx(std::pow(std::numbers::pi, 1.5) * tau_n(20, 400)));
  CHECK_THROWS_AS(tau_n(0, 10), InvalidArgument);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(scaled_ik(1.0, 0.1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(scaled_ik(1.0, 0.1, 4.5), InvalidArgument);
  CHECK_THROWS_AS(scaled_ik(std::nan(""), 0.1, 0.5), InvalidArgument);
  CHECK_THROWS_AS(scaled_ik(1.0, 0.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(log_marginal_density(1.0, -1.0), InvalidArgument);
}

TEST_CASE("tau = 1 and tau > 1 are handled") {
  // N(z) = 1 at tau = 1: I_{-1/2}(0) = 2.
  CHECK(std::exp(scaled_ik(0.0, 1.0, -0.5).log_value) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isfinite(scaled_ik(3.0, 5.0, -0.5).log_value));
}

TEST_CASE("large |y| stays finite") {
  for (double y : {50.0, 300.0, 700.0, 1e4}) {
    const auto r = scaled_ik(y, 1e-3, -0.5);
    CHECK(std::isfinite(r.log_value));
    CHECK(r.accurate);
    // Leading behaviour 1/(y^2/2).
    CHECK(rel(std::exp(r.log_value), 2.0 / (y * y)) < 10.0 / (y * y));
  }
}
