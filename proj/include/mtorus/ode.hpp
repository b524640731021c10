#pragma once

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step-size control
// and a terminal event located by bisection on the step length.

#include "mtorus/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mtorus::ode {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  long max_steps = 1'000'000;
  double h_max = std::numeric_limits<double>::infinity();
  double event_t_tol = 1e-9;
  // A DomainError thrown by the right-hand side (a stage left the chart) rejects
  // the step and shrinks it instead of propagating.
  bool reject_on_domain_error = true;
};

enum class Status { completed, event, step_limit };

template <int N>
struct Result {
  Status status = Status::completed;
  double t = 0.0;
  Eigen::Matrix<double, N, 1> y;
  long steps = 0;
};

namespace detail {

// Dormand-Prince tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;

template <int N>
struct Step {
  Eigen::Matrix<double, N, 1> y;
  Eigen::Matrix<double, N, 1> k7;  // f(t + h, y), reused as the next k1
  Eigen::Matrix<double, N, 1> err;
};

template <int N, class Rhs>
Step<N> dp_step(Rhs& f, double t, const Eigen::Matrix<double, N, 1>& y, const Eigen::Matrix<double, N, 1>& k1,
                double h) {
  using State = Eigen::Matrix<double, N, 1>;
  const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
  const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
  const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
  const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
  const State k6 = f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
  Step<N> s;
  s.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  s.k7 = f(t + h, s.y);
  s.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.k7);
  return s;
}

template <int N>
double error_norm(const Eigen::Matrix<double, N, 1>& err, const Eigen::Matrix<double, N, 1>& y0,
                  const Eigen::Matrix<double, N, 1>& y1, const Options& opt) {
  double worst = 0.0;
  for (int i = 0; i < N; ++i) {
    const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return worst;
}

// Starting step from Hairer, Norsett & Wanner, "Solving ODEs I", II.4.
template <int N, class Rhs>
double initial_step(Rhs& f, double t0, const Eigen::Matrix<double, N, 1>& y0, const Eigen::Matrix<double, N, 1>& f0,
                    double span, const Options& opt) {
  using State = Eigen::Matrix<double, N, 1>;
  State sc;
  for (int i = 0; i < N; ++i) sc[i] = opt.abs_tol + opt.rel_tol * std::abs(y0[i]);
  const double d0 = std::sqrt((y0.cwiseQuotient(sc)).squaredNorm() / N);
  const double d1 = std::sqrt((f0.cwiseQuotient(sc)).squaredNorm() / N);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  double h1 = h0;
  try {
    const State f1 = f(t0 + h0, State(y0 + h0 * f0));
    const double d2 = std::sqrt(((f1 - f0).cwiseQuotient(sc)).squaredNorm() / N) / h0;
    const double dmax = std::max(d1, d2);
    h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
  } catch (const DomainError&) {
    if (!opt.reject_on_domain_error) throw;
    h1 = h0 * 1e-2;
  }
  return std::min({100.0 * h0, h1, span, opt.h_max});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 > t0.
///
/// `event(t, y)` is watched after every accepted step; once it is <= 0 the
/// crossing is bracketed by bisection on the step length to within
/// opt.event_t_tol, and the integration stops at the bracket end where the
/// event has fired. `observe(t, y)` sees the initial state and every accepted
/// state, including the final one.
template <int N, class Rhs, class Event, class Observer>
Result<N> integrate(Rhs&& f, double t0, const Eigen::Matrix<double, N, 1>& y0, double t1, const Options& opt,
                    Event&& event, Observer&& observe) {
  using State = Eigen::Matrix<double, N, 1>;
  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0;
  constexpr double kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0;

  Result<N> res;
  res.t = t0;
  res.y = y0;
  observe(t0, y0);
  if (!(t1 > t0)) return res;

  State k1 = f(t0, y0);
  double h = detail::initial_step<N>(f, t0, y0, k1, t1 - t0, opt);
  double err_prev = 1e-4;
  bool last_rejected = false;
  double t = t0;
  State y = y0;

  while (t < t1) {
    if (res.steps >= opt.max_steps) {
      res.status = Status::step_limit;
      break;
    }
    ++res.steps;
    if (t + h > t1 || t + 1.01 * h >= t1) h = t1 - t;
    if (!(h > 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))) {
      // Step collapsed; this is a stall, not a completed run.
      res.status = Status::step_limit;
      break;
    }

    detail::Step<N> s;
    bool stage_failed = false;
    try {
      s = detail::dp_step<N>(f, t, y, k1, h);
      stage_failed = !s.y.allFinite() || !s.err.allFinite();
    } catch (const DomainError&) {
      if (!opt.reject_on_domain_error) throw;
      stage_failed = true;
    }
    if (stage_failed) {
      h *= 0.25;
      last_rejected = true;
      continue;
    }

    const double err = detail::error_norm<N>(s.err, y, s.y, opt);
    if (err > 1.0) {
      h *= std::max(kFacMin, kSafety * std::pow(err, -kAlpha));
      last_rejected = true;
      continue;
    }

    const double t_new = (h == t1 - t) ? t1 : t + h;
    if (event(t_new, s.y) <= 0.0) {
      // Bracket [lo, hi] in step length: event positive at lo, fired at hi.
      double lo = 0.0, hi = h;
      State y_hi = s.y;
      while (hi - lo > opt.event_t_tol) {
        const double mid = 0.5 * (lo + hi);
        bool fired = false;
        State y_mid;
        try {
          y_mid = detail::dp_step<N>(f, t, y, k1, mid).y;
          fired = !y_mid.allFinite() || event(t + mid, y_mid) <= 0.0;
        } catch (const DomainError&) {
          fired = true;
        }
        if (fired) {
          hi = mid;
          if (y_mid.allFinite()) y_hi = y_mid;
        } else {
          lo = mid;
        }
      }
      res.status = Status::event;
      res.t = t + hi;
      res.y = y_hi;
      observe(res.t, res.y);
      return res;
    }

    t = t_new;
    y = s.y;
    k1 = s.k7;
    observe(t, y);

    const double e = std::max(err, 1e-10);
    double fac = kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta);
    fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
    h = std::min(h * fac, opt.h_max);
    err_prev = std::max(err, 1e-4);
    last_rejected = false;
  }
  res.t = t;
  res.y = y;
  return res;
}

template <int N, class Rhs>
Result<N> integrate(Rhs&& f, double t0, const Eigen::Matrix<double, N, 1>& y0, double t1, const Options& opt) {
  return integrate<N>(
      std::forward<Rhs>(f), t0, y0, t1, opt, [](double, const Eigen::Matrix<double, N, 1>&) { return 1.0; },
      [](double, const Eigen::Matrix<double, N, 1>&) {});
}

}  // namespace mtorus::ode
