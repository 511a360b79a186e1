#pragma once

// Explicit Runge–Kutta machinery shared by the envelope and trajectory solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "cmwave/error.hpp"

namespace cmwave::ode {

template <class Real, std::size_t N>
using Vec = std::array<Real, N>;

template <class Real, std::size_t N>
Vec<Real, N> axpy(const Vec<Real, N>& y, Real h, std::initializer_list<std::pair<Real, const Vec<Real, N>*>> terms) {
  Vec<Real, N> out = y;
  for (const auto& [c, k] : terms) {
    if (c == Real(0)) continue;
    for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

/// One classical fourth-order step. `f(t, y)` returns dy/dt.
template <class Real, std::size_t N, class F>
Vec<Real, N> rk4_step(F&& f, Real t, const Vec<Real, N>& y, Real h) {
  const Real half = h / 2;
  const Vec<Real, N> k1 = f(t, y);
  const Vec<Real, N> k2 = f(t + half, axpy<Real, N>(y, h, {{Real(0.5), &k1}}));
  const Vec<Real, N> k3 = f(t + half, axpy<Real, N>(y, h, {{Real(0.5), &k2}}));
  const Vec<Real, N> k4 = f(t + h, axpy<Real, N>(y, h, {{Real(1), &k3}}));
  Vec<Real, N> out = y;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] += h * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6;
  }
  return out;
}

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// 0 selects the starting step automatically.
  double h_init = 0.0;
  double h_min = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
};

/// Dormand–Prince 5(4) with FSAL and an elementary controller.
///
/// `rhs(t, y, dy)` fills dy and returns false when y lies outside the domain of
/// the right-hand side; the step is then rejected and retried smaller, and
/// `domain_error` is thrown once h falls below h_min.
///
/// The integration marches from t0 through every time in `stops` (sorted, all
/// > t0) and lands on each exactly. `observe(t, y, dy, is_stop)` is called for
/// every accepted step.
template <std::size_t N, class Rhs, class Observer>
void integrate_dopri5(Rhs&& rhs, double t0, Vec<double, N> y, std::span<const double> stops,
                      const StepControl& ctl, ErrorCode domain_error, Observer&& observe) {
  using V = Vec<double, N>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (stops.empty()) return;
  const double t_end = stops.back();

  V k1{};
  if (!rhs(t0, y, k1)) {
    throw Error(domain_error, "integrate", "initial state outside the domain");
  }

  auto error_norm = [&](const V& y0, const V& y1, const V& err) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      const double r = err[i] / sc;
      acc += r * r;
    }
    return std::sqrt(acc / N);
  };

  double t = t0;
  double h = ctl.h_init;
  if (!(h > 0.0)) {
    // Hairer–Nørsett–Wanner starting step.
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.atol + ctl.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end - t0);
    V y1 = y, k2{};
    for (std::size_t i = 0; i < N; ++i) y1[i] += h0 * k1[i];
    double d2 = 0.0;
    if (rhs(t0 + h0, y1, k2)) {
      for (std::size_t i = 0; i < N; ++i) {
        const double sc = ctl.atol + ctl.rtol * std::abs(y[i]);
        d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
      }
      d2 = std::sqrt(d2 / N) / h0;
    }
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5);
    h = std::min(100 * h0, h1);
  }
  h = std::min(h, ctl.h_max);

  std::size_t next_stop = 0;
  std::size_t steps = 0;
  while (next_stop < stops.size()) {
    if (++steps > ctl.max_steps) {
      throw Error(ErrorCode::StepSizeUnderflow, "integrate", "maximum number of steps exceeded");
    }
    const double target = stops[next_stop];
    const double h_floor = std::max(ctl.h_min, 16 * std::numeric_limits<double>::epsilon() * std::abs(t));
    bool hits_stop = false;
    double h_try = h;
    if (t + h_try >= target || target - (t + h_try) < h_floor) {
      h_try = target - t;
      hits_stop = true;
    }

    V k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y_new{}, err{};
    bool in_domain = true;
    auto stage = [&](double tt, const V& yy, V& kk) {
      if (in_domain && !rhs(tt, yy, kk)) in_domain = false;
    };
    auto combine = [&](std::initializer_list<std::pair<double, const V*>> terms) {
      V out = y;
      for (const auto& [c, k] : terms) {
        for (std::size_t i = 0; i < N; ++i) out[i] += h_try * c * (*k)[i];
      }
      return out;
    };
    stage(t + c2 * h_try, combine({{a21, &k1}}), k2);
    if (in_domain) stage(t + c3 * h_try, combine({{a31, &k1}, {a32, &k2}}), k3);
    if (in_domain) stage(t + c4 * h_try, combine({{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4);
    if (in_domain) {
      stage(t + c5 * h_try, combine({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5);
    }
    if (in_domain) {
      stage(t + h_try, combine({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
    }
    const double t_new = hits_stop ? target : t + h_try;
    if (in_domain) {
      y_new = combine({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      stage(t_new, y_new, k7);
    }
    if (!in_domain) {
      h = h_try * 0.25;
      if (h < h_floor) throw Error(domain_error, "integrate", "state left the domain of the right-hand side");
      continue;
    }
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      if (!std::isfinite(y_new[i])) {
        throw Error(ErrorCode::NonFiniteState, "integrate", "state became non-finite");
      }
    }
    const double en = error_norm(y, y_new, err);
    if (!std::isfinite(en)) {
      throw Error(ErrorCode::NonFiniteState, "integrate", "error estimate became non-finite");
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en > 1.0) {
      h = h_try * std::max(0.2, factor);
      if (h < h_floor) throw Error(ErrorCode::StepSizeUnderflow, "integrate", "adaptive step fell below h_min");
      continue;
    }
    t = t_new;
    y = y_new;
    k1 = k7;
    observe(t, y, k1, hits_stop);
    if (hits_stop) {
      ++next_stop;
      // Keep the step that was proposed before clipping to the stop.
      h = std::max(h, h_try * factor);
    } else {
      h = h_try * factor;
    }
    h = std::min(h, ctl.h_max);
  }
}

}  // namespace cmwave::ode
