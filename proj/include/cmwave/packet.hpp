#pragma once

// Closed-form fields of the measured Gaussian packet, reconstructed from an
// envelope state (q, q̇, δ, δ̇, S₀):
//
//   ρ(x)    = (2πδ²)^{-1/2} exp(−(x−q)²/(2δ²))
//   S(x)    = S₀ + (m q̇/ħ)(x−q) + (m/2ħ)[δ̇/δ + 1/(2τ)](x−q)²
//   Ψ(x)    = √ρ · e^{iS}
//   v(x)    = [δ̇/δ + 1/(2τ)](x−q) + q̇        (= (ħ/m) ∂S/∂x)
//   V_qu(x) = ħ²/(4mδ²) − ħ²(x−q)²/(8mδ⁴)
//
// The pointwise formulas are templates so the verifier can evaluate them in
// extended precision.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "cmwave/core.hpp"
#include "cmwave/dynamics.hpp"

namespace cmwave {

class SpatialGrid {
 public:
  /// Throws InvalidGrid unless x_min < x_max, both finite, and n >= 8.
  SpatialGrid(double x_min, double x_max, std::size_t n);

  /// Window centre ± half_width with n points.
  static SpatialGrid centered(double center, double half_width, std::size_t n);
  /// Window q ± window·δ with n points.
  static SpatialGrid around(const EnvelopeState& s, double window = 10.0, std::size_t n = 2001);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double spacing() const { return (x_max_ - x_min_) / double(n_ - 1); }
  double x(std::size_t i) const {
    return i + 1 == n_ ? x_max_ : x_min_ + spacing() * double(i);
  }
  std::vector<double> points() const;
  /// Same endpoints, spacing divided by `factor`.
  SpatialGrid refined(std::size_t factor = 2) const { return {x_min_, x_max_, (n_ - 1) * factor + 1}; }

  bool operator==(const SpatialGrid&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
};

struct PacketField {
  SpatialGrid grid;
  double t = 0.0;
  std::vector<std::complex<double>> values;

  /// Trapezoid ∫|Ψ|²dx.
  double norm() const;
};

/// Trapezoid rule on uniformly spaced samples.
double trapezoid(std::span<const double> f, double h);

template <class Real>
Real measurement_rate(const PhysicalParams& p) {
  return Real(p.inv_tau()) / 2;
}

/// δ̇/δ + 1/(2τ): the slope of the velocity field.
template <class Real>
Real stretch_rate(const BasicEnvelopeState<Real>& s, const PhysicalParams& p) {
  return s.deltadot / s.delta + measurement_rate<Real>(p);
}

template <class Real>
Real density(const BasicEnvelopeState<Real>& s, Real x) {
  const Real y = x - s.q;
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  return std::exp(-y * y / (2 * s.delta * s.delta)) / std::sqrt(two_pi * s.delta * s.delta);
}

/// √ρ, computed directly rather than as sqrt(density).
template <class Real>
Real amplitude(const BasicEnvelopeState<Real>& s, Real x) {
  const Real y = x - s.q;
  const Real two_pi = 2 * std::numbers::pi_v<Real>;
  return std::exp(-y * y / (4 * s.delta * s.delta)) / std::sqrt(std::sqrt(two_pi * s.delta * s.delta));
}

template <class Real>
Real phase(const BasicEnvelopeState<Real>& s, Real x, const PhysicalParams& p) {
  const Real y = x - s.q;
  const Real m_over_hbar = Real(p.m) / Real(p.hbar);
  return s.s0 + m_over_hbar * s.qdot * y + m_over_hbar / 2 * stretch_rate(s, p) * y * y;
}

template <class Real>
std::complex<Real> psi(const BasicEnvelopeState<Real>& s, Real x, const PhysicalParams& p) {
  return std::polar(amplitude(s, x), phase(s, x, p));
}

template <class Real>
Real velocity_field(const BasicEnvelopeState<Real>& s, Real x, const PhysicalParams& p) {
  return stretch_rate(s, p) * (x - s.q) + s.qdot;
}

template <class Real>
Real quantum_potential_closed(const BasicEnvelopeState<Real>& s, Real x, const PhysicalParams& p) {
  const Real y = x - s.q;
  const Real hbar2_m = Real(p.hbar) * Real(p.hbar) / Real(p.m);
  const Real d2 = s.delta * s.delta;
  return hbar2_m / (4 * d2) - hbar2_m * y * y / (8 * d2 * d2);
}

/// V = ½ m Ω²(t) x² + λ x X(t).
double classical_potential(double x, double t, const PhysicalParams& params);

/// Second-order Taylor expansion of V about `center`; identical to
/// classical_potential because V is quadratic in x.
double classical_potential_expanded(double x, double t, double center, const PhysicalParams& params);

/// Finite-difference quantum potential −(ħ²/2m)(∂²√ρ/∂x²)/√ρ from samples of √ρ.
/// Interior points use the central stencil, the two ends a four-point one-sided
/// stencil. Throws InvalidGrid for fewer than four samples.
std::vector<double> quantum_potential_fd(std::span<const double> sqrt_rho, double h,
                                         const PhysicalParams& params);

/// Same, for the packet of `state`. Throws GridTooCoarse unless the grid spans
/// q ± 6δ with spacing ≤ δ/10.
std::vector<double> quantum_potential_fd(const EnvelopeState& state, const SpatialGrid& grid,
                                         const PhysicalParams& params);

PacketField sample_packet(const EnvelopeState& state, const SpatialGrid& grid,
                          const PhysicalParams& params);

}  // namespace cmwave
