#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature for vector-valued
// integrands. All components share the abscissae; an interval is refined
// until every component meets its tolerance relative to the integral of its
// absolute value.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace horseshoe::quad {

struct Tolerance {
  double rel = 1e-10;
  int max_levels = 60;
  int max_intervals = 4000;

  Tolerance tightened(double factor) const {
    Tolerance t = *this;
    t.rel /= factor;
    return t;
  }
};

template <std::size_t N>
struct Result {
  std::array<double, N> value{};
  std::array<double, N> abs_error{};
  std::array<double, N> l1{};
  bool converged = false;
  int intervals = 0;
  int evaluations = 0;

  double rel_error(std::size_t i) const {
    const double v = std::abs(value[i]);
    return v > 0.0 ? abs_error[i] / v : (abs_error[i] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
};

namespace detail {

// QUADPACK qk21 abscissae and weights. xgk[1], xgk[3], ... are the 10-point
// Gauss nodes.
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Segment {
  double a = 0.0;
  double b = 0.0;
  int level = 0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  std::array<double, N> l1{};
};

template <std::size_t N, class F>
Segment<N> gk21(F& f, double a, double b, int level) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<std::array<double, N>, 21> fv;
  fv[0] = f(centr);
  for (std::size_t j = 0; j < 10; ++j) {
    const double absc = hlgth * kXgk[j];
    fv[1 + 2 * j] = f(centr - absc);
    fv[2 + 2 * j] = f(centr + absc);
  }

  Segment<N> s;
  s.a = a;
  s.b = b;
  s.level = level;
  for (std::size_t c = 0; c < N; ++c) {
    const double fc = fv[0][c];
    double resk = kWgk[10] * fc;
    double resabs = std::abs(resk);
    double resg = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      const double f1 = fv[1 + 2 * j][c];
      const double f2 = fv[2 + 2 * j][c];
      resk += kWgk[j] * (f1 + f2);
      resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
      if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = kWgk[10] * std::abs(fc - reskh);
    for (std::size_t j = 0; j < 10; ++j) {
      resasc += kWgk[j] * (std::abs(fv[1 + 2 * j][c] - reskh) + std::abs(fv[2 + 2 * j][c] - reskh));
    }
    const double result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double err = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    s.value[c] = result;
    s.error[c] = err;
    s.l1[c] = resabs;
  }
  return s;
}

}  // namespace detail

/// Integrates `f` over [breakpoints.front(), breakpoints.back()].
///
/// `f(x)` returns a `std::array<double, N>`. Interior breakpoints seed the
/// initial partition; they must be nondecreasing (duplicates are dropped).
/// Refinement bisects the interval with the largest normalized error until
/// the summed error of every component is below `tol.rel` times its L1 norm,
/// or no interval can be split further (then `converged` is false).
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> breakpoints, const Tolerance& tol = {}) {
  Result<N> out;
  std::vector<detail::Segment<N>> segs;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    segs.push_back(detail::gk21<N>(f, a, b, 0));
    out.evaluations += 21;
  }
  if (segs.empty()) {
    out.converged = true;
    return out;
  }

  auto totals = [&](std::array<double, N>& err, std::array<double, N>& l1) {
    err.fill(0.0);
    l1.fill(0.0);
    for (const auto& s : segs) {
      for (std::size_t c = 0; c < N; ++c) {
        err[c] += s.error[c];
        l1[c] += s.l1[c];
      }
    }
  };

  std::array<double, N> err{};
  std::array<double, N> l1{};
  for (;;) {
    totals(err, l1);
    bool done = true;
    for (std::size_t c = 0; c < N; ++c) {
      if (err[c] > tol.rel * l1[c]) done = false;
    }
    if (done) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(segs.size()) >= tol.max_intervals) break;

    std::size_t worst = segs.size();
    double worst_score = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].level >= tol.max_levels) continue;
      double score = 0.0;
      for (std::size_t c = 0; c < N; ++c) {
        if (l1[c] > 0.0) score = std::max(score, segs[i].error[c] / l1[c]);
      }
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    if (worst == segs.size()) break;

    const auto parent = segs[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b)) {
      segs[worst].level = tol.max_levels;
      continue;
    }
    segs[worst] = detail::gk21<N>(f, parent.a, mid, parent.level + 1);
    segs.push_back(detail::gk21<N>(f, mid, parent.b, parent.level + 1));
    out.evaluations += 42;
  }

  out.value.fill(0.0);
  for (const auto& s : segs) {
    for (std::size_t c = 0; c < N; ++c) out.value[c] += s.value[c];
  }
  out.abs_error = err;
  out.l1 = l1;
  out.intervals = static_cast<int>(segs.size());
  return out;
}

/// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, std::span<const double> breakpoints, const Tolerance& tol = {}) {
  return integrate<1>([&f](double x) { return std::array<double, 1>{f(x)}; }, breakpoints, tol);
}

}  // namespace horseshoe::quad
