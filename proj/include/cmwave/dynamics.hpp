#pragma once

// Envelope reduction of the measured Gaussian packet: centre q, width δ and the
// phase offset S₀ obey
//
//   q̈ + Ω²(t) q + (λ/m) X(t) = 0
//   δ̈ + δ̇/τ + [Ω²(t) + 1/(4τ²)] δ = ħ²/(4 m² δ³)
//   Ṡ₀ = [½ m q̇² − ½ m Ω² q² − λ q X − ħ²/(4 m δ²)] / ħ
//
// S₀ is a dimensionless phase (Ψ = φ·e^{iS}).

#include <cstddef>
#include <optional>
#include <vector>

#include "cmwave/core.hpp"
#include "cmwave/ode.hpp"

namespace cmwave {

inline constexpr double kDefaultDeltaMin = 1e-8;

template <class Real>
struct BasicEnvelopeState {
  Real t{};
  Real q{};
  Real qdot{};
  Real delta{};
  Real deltadot{};
  Real s0{};

  template <class Other>
  BasicEnvelopeState<Other> cast() const {
    return {Other(t), Other(q), Other(qdot), Other(delta), Other(deltadot), Other(s0)};
  }
  bool operator==(const BasicEnvelopeState&) const = default;
};

/// Time derivative of an envelope state.
template <class Real>
struct BasicEnvelopeRate {
  Real qdot{};
  Real qddot{};
  Real deltadot{};
  Real deltaddot{};
  Real s0dot{};
  bool operator==(const BasicEnvelopeRate&) const = default;
};

using EnvelopeState = BasicEnvelopeState<double>;
using EnvelopeRate = BasicEnvelopeRate<double>;

/// Right-hand side without the width guard; callers must ensure delta > 0.
template <class Real>
BasicEnvelopeRate<Real> envelope_rate(const BasicEnvelopeState<Real>& s, const PhysicalParams& p) {
  const Real m = p.m;
  const Real hbar = p.hbar;
  const Real inv_tau = p.inv_tau();
  const Real w = p.omega_at(double(s.t));
  const Real x = p.drive_at(double(s.t));
  const Real lambda = p.lambda;
  const Real w2 = w * w;
  const Real d2 = s.delta * s.delta;

  BasicEnvelopeRate<Real> r;
  r.qdot = s.qdot;
  r.qddot = -w2 * s.q - (lambda / m) * x;
  r.deltadot = s.deltadot;
  r.deltaddot = -s.deltadot * inv_tau - (w2 + inv_tau * inv_tau / 4) * s.delta +
                hbar * hbar / (4 * m * m * d2 * s.delta);
  r.s0dot = (m * s.qdot * s.qdot / 2 - m * w2 * s.q * s.q / 2 - lambda * s.q * x -
             hbar * hbar / (4 * m * d2)) /
            hbar;
  return r;
}

/// Throws WidthUnderflow when state.delta <= delta_min.
EnvelopeRate rhs(const EnvelopeState& state, const PhysicalParams& params,
                 double delta_min = kDefaultDeltaMin);

struct SolverControls {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;
  double h_min = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  double delta_min = kDefaultDeltaMin;
  std::size_t max_steps = 2'000'000;
  /// Number of uniformly spaced output times on [0, t_end] the integrator must hit
  /// exactly (0 or 1 means none besides the endpoints).
  std::size_t uniform_samples = 0;
};

/// Dense solution: integrator steps plus requested uniform samples, interpolated
/// by cubic Hermite polynomials built from the stored right-hand sides.
class EnvelopeSolution {
 public:
  EnvelopeSolution(PhysicalParams params, InitialConditions ic, std::vector<EnvelopeState> samples,
                   std::vector<EnvelopeRate> rates, std::vector<std::size_t> uniform_indices);

  const PhysicalParams& params() const { return params_; }
  const InitialConditions& ic() const { return ic_; }
  const std::vector<EnvelopeState>& samples() const { return samples_; }
  const std::vector<EnvelopeRate>& rates() const { return rates_; }
  /// Indices into samples() of the uniformly requested output times.
  const std::vector<std::size_t>& uniform_indices() const { return uniform_indices_; }
  std::vector<EnvelopeState> uniform_samples() const;

  double t_end() const { return samples_.back().t; }

  /// Throws OutOfRange outside [0, t_end]. Exact at sample times.
  EnvelopeState state_at(double t) const;
  EnvelopeRate rate_at(double t) const { return envelope_rate(state_at(t), params_); }

 private:
  PhysicalParams params_;
  InitialConditions ic_;
  std::vector<EnvelopeState> samples_;
  std::vector<EnvelopeRate> rates_;
  std::vector<std::size_t> uniform_indices_;
};

EnvelopeState initial_state(const PhysicalParams& params, const InitialConditions& ic);

/// Adaptive Dormand–Prince integration on [0, t_end].
EnvelopeSolution integrate(const PhysicalParams& params, const InitialConditions& ic, double t_end,
                           const SolverControls& controls = {});

/// Fixed-step classical RK4 with `steps` equal steps; used for convergence studies.
EnvelopeSolution integrate_fixed(const PhysicalParams& params, const InitialConditions& ic,
                                 double t_end, std::size_t steps,
                                 double delta_min = kDefaultDeltaMin);

/// Advances `from` to `t_to` with `substeps` RK4 steps in the state's own precision.
template <class Real>
BasicEnvelopeState<Real> advance(const PhysicalParams& p, const BasicEnvelopeState<Real>& from,
                                 Real t_to, std::size_t substeps) {
  using V = ode::Vec<Real, 5>;
  auto f = [&p](Real t, const V& y) {
    const BasicEnvelopeState<Real> s{t, y[0], y[1], y[2], y[3], y[4]};
    const auto r = envelope_rate(s, p);
    return V{r.qdot, r.qddot, r.deltadot, r.deltaddot, r.s0dot};
  };
  V y{from.q, from.qdot, from.delta, from.deltadot, from.s0};
  const Real h = (t_to - from.t) / Real(substeps);
  Real t = from.t;
  for (std::size_t i = 0; i < substeps; ++i) {
    y = ode::rk4_step<Real, 5>(f, t, y, h);
    t = from.t + h * Real(i + 1);
  }
  return {t_to, y[0], y[1], y[2], y[3], y[4]};
}

/// Stationary width for a constant Ω, or nullopt when none exists (free packet
/// without measurement) or the schedule is not constant.
std::optional<double> steady_width(const PhysicalParams& params);

}  // namespace cmwave
