#pragma once

// Physical parameters, the Ω(t) and X(t) schedules, and initial conditions.

#include <cmath>
#include <variant>
#include <vector>

#include "cmwave/error.hpp"

namespace cmwave {

struct Knot {
  double t = 0.0;
  double value = 0.0;
  bool operator==(const Knot&) const = default;
};

/// Piecewise-linear table, clamped outside the knot range.
class Table {
 public:
  Table() = default;
  /// Throws InvalidSchedule unless knots are non-empty, finite and strictly increasing in t.
  explicit Table(std::vector<Knot> knots);

  double operator()(double t) const;
  const std::vector<Knot>& knots() const { return knots_; }
  bool operator==(const Table&) const = default;

 private:
  std::vector<Knot> knots_;
};

struct ConstantFrequency {
  double omega0 = 0.0;
  bool operator==(const ConstantFrequency&) const = default;
};

/// Ω(t) = omega0·sqrt(max(0, 1 + epsilon·cos(omega_d·t)))
struct CosineModulatedFrequency {
  double omega0 = 0.0;
  double epsilon = 0.0;
  double omega_d = 0.0;
  bool operator==(const CosineModulatedFrequency&) const = default;
};

using FrequencySchedule = std::variant<ConstantFrequency, CosineModulatedFrequency, Table>;

struct ZeroDrive {
  bool operator==(const ZeroDrive&) const = default;
};

struct ConstantDrive {
  double x_c = 0.0;
  bool operator==(const ConstantDrive&) const = default;
};

/// X(t) = amplitude·sin(omega_x·t + phase)
struct SinusoidDrive {
  double amplitude = 0.0;
  double omega_x = 0.0;
  double phase = 0.0;
  bool operator==(const SinusoidDrive&) const = default;
};

using DriveSchedule = std::variant<ZeroDrive, ConstantDrive, SinusoidDrive, Table>;

double eval_omega(const FrequencySchedule& schedule, double t);
double eval_drive(const DriveSchedule& schedule, double t);

struct PhysicalParams {
  double m = 1.0;
  double hbar = 1.0;
  double tau = 1.0;
  /// τ → ∞: every 1/τ term is exactly zero and tau itself is ignored.
  bool measurement_off = false;
  double lambda = 0.0;
  FrequencySchedule omega = ConstantFrequency{0.0};
  DriveSchedule drive = ZeroDrive{};

  double inv_tau() const { return measurement_off ? 0.0 : 1.0 / tau; }
  double omega_at(double t) const { return eval_omega(omega, t); }
  double drive_at(double t) const { return eval_drive(drive, t); }
  /// Free particle: Ω ≡ 0, no coupling, no measurement.
  bool is_free() const;

  bool operator==(const PhysicalParams&) const = default;
};

struct InitialConditions {
  double x0 = 0.0;
  double v0 = 0.0;
  double a0 = 1.0;
  double b0 = 0.0;

  bool operator==(const InitialConditions&) const = default;
};

/// S₀(0) = m·v0·x0/ħ.
inline double initial_phase(const PhysicalParams& p, const InitialConditions& ic) {
  return p.m * ic.v0 * ic.x0 / p.hbar;
}

struct Configuration {
  PhysicalParams params;
  InitialConditions ic;
  bool operator==(const Configuration&) const = default;
};

/// Returns the configuration unchanged, or throws Error naming the offending field.
Configuration validate(const PhysicalParams& params, const InitialConditions& ic);

}  // namespace cmwave
