#pragma once

// Finite-difference residuals of the governing equations evaluated on the
// reconstructed packet. Time derivatives are central differences over
// t ± h_t; space derivatives are central differences on the grid. Norms cover
// interior points only (two-point margin at each end).
//
// Envelope states at t and t + h_t are obtained by advancing the interpolated
// state at t − h_t with RK4 in extended precision, so all three time levels lie
// on one exact trajectory and the differences stay above roundoff under
// refinement.

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cmwave/dynamics.hpp"
#include "cmwave/packet.hpp"

namespace cmwave {

enum class Equation {
  /// iħΨ_t + (ħ²/2m)Ψ_xx − VΨ + (iħ/4τ)BΨ, B = (x−q)²/δ² − 1
  Schrodinger,
  /// ρ_t + (ρv)_x + (ρ/2τ)B
  Continuity,
  /// v_t + v v_x + Ω²x + (λ/m)X + (1/m)∂_x V_qu
  Euler,
  /// Dv/Dt along the flow + Ω²x + (λ/m)X + (1/m)∂_x V_qu
  Newton,
  /// φ_t + (ħ/2m)(2 S_x φ_x + φ S_xx) + (1/4τ)Bφ
  MadelungImaginary,
  /// −(ħ/m)S_t + (ħ²/2m²)(φ_xx/φ − S_x²) − [½Ω²x² + (λ/m)xX]
  MadelungReal,
};

std::string_view to_string(Equation eq);

struct ResidualReport {
  Equation equation = Equation::Schrodinger;
  SpatialGrid grid{0.0, 1.0, 8};
  double t = 0.0;
  double h_t = 0.0;
  /// sqrt(h·Σ|R|²) and max|R| over interior points.
  double l2 = 0.0;
  double max = 0.0;
  /// Max over interior points of the largest single term magnitude (> 0).
  double scale = 0.0;
  /// l2 / (scale·sqrt(L)) with L the grid span; rel_max = max / scale.
  double rel_l2 = 0.0;
  double rel_max = 0.0;
  /// Empirical order relative to the next coarser level, when part of a study.
  std::optional<double> order;
};

using ResidualFunction =
    std::function<ResidualReport(const EnvelopeSolution&, const SpatialGrid&, double, double)>;

ResidualReport schrodinger_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                                    double h_t);
ResidualReport continuity_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                                   double h_t);
ResidualReport euler_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                              double h_t);
ResidualReport newton_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                               double h_t);
ResidualReport madelung_imaginary_residual(const EnvelopeSolution& sol, const SpatialGrid& grid,
                                           double t, double h_t);
ResidualReport madelung_real_residual(const EnvelopeSolution& sol, const SpatialGrid& grid,
                                      double t, double h_t);
std::pair<ResidualReport, ResidualReport> madelung_split_check(const EnvelopeSolution& sol,
                                                               const SpatialGrid& grid, double t,
                                                               double h_t);

/// Schrödinger residual of arbitrary samples of Ψ at t − h_t, t, t + h_t. The
/// measurement term uses q and δ from `center`.
ResidualReport schrodinger_residual_of(std::span<const std::complex<double>> before,
                                       std::span<const std::complex<double>> now,
                                       std::span<const std::complex<double>> after,
                                       const SpatialGrid& grid, double t, double h_t,
                                       const EnvelopeState& center, const PhysicalParams& params);

struct ConvergenceStudy {
  /// Coarsest first; levels[i].order compares against levels[i-1].
  std::vector<ResidualReport> levels;
  std::vector<double> orders() const;
};

/// Evaluates `fn` on `levels` grids, halving both h and h_t at each level.
ConvergenceStudy convergence_study(const ResidualFunction& fn, const EnvelopeSolution& sol,
                                   const SpatialGrid& grid, double t, double h_t,
                                   std::size_t levels = 3);

/// ∫ (ρ/2τ)[(x−q)²/δ² − 1] dx over the grid by the trapezoid rule.
double source_integral(const EnvelopeState& state, const SpatialGrid& grid,
                       const PhysicalParams& params);

/// min(1e−4, h²/δ · m/ħ).
double default_time_step(double h, double delta, const PhysicalParams& params);

/// q ± window·δ with spacing δ/100.
SpatialGrid reference_grid(const EnvelopeState& state, double window = 10.0);

struct FourierSpectrum {
  /// Ascending, from −n/2·Δk to (n/2 − 1)·Δk.
  std::vector<double> k;
  std::vector<std::complex<double>> amplitude;
  /// ω(k) = ħk²/(2m).
  std::vector<double> omega;
  double dk = 0.0;

  /// Σ|φ|²Δk.
  double norm() const;
};

/// Continuous-transform approximation φ(k) = (2π)^{-1/2} ∫ Ψ(x) e^{−ikx} dx on a
/// power-of-two grid. Throws InvalidGrid otherwise.
FourierSpectrum fourier_spectrum(const PacketField& field, const PhysicalParams& params);

/// Free evolution by spectral synthesis: transform, multiply by e^{−iω(k)t},
/// transform back. Requires a free-particle configuration, a power-of-two grid
/// and a packet that vanishes at the edges (AliasingRisk otherwise).
PacketField fourier_free_packet(const PacketField& psi0, double t, const PhysicalParams& params);

/// sqrt(∫|a − b|²dx); fields must share a grid.
double l2_difference(const PacketField& a, const PacketField& b);

}  // namespace cmwave
