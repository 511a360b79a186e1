#pragma once

// Bohmian trajectories of the measured packet. Each path obeys
// dx/dt = v(x, t) = [δ̇/δ + 1/(2τ)](x − q) + q̇, whose exact solution is
//
//   x(t) = q(t) + e^{t/(2τ)} · [δ(t)/δ(0)] · [x(0) − q(0)].

#include <span>
#include <vector>

#include "cmwave/dynamics.hpp"

namespace cmwave {

enum class TrajectoryMethod { ClosedForm, Integrated };

struct TrajectoryBundle {
  std::vector<double> seeds;
  std::vector<double> times;
  /// paths[i][k] is the position of seed i at times[k].
  std::vector<std::vector<double>> paths;
  TrajectoryMethod method = TrajectoryMethod::ClosedForm;

  /// Half of the spread between the outermost paths at each time.
  std::vector<double> half_width() const;
};

/// Slope of the seed-to-position map, e^{t/(2τ)}·δ(t)/δ(0). Throws Overflow
/// when it is not representable.
double stretch_factor(const EnvelopeSolution& sol, double t);

double trajectory_closed(const EnvelopeSolution& sol, double seed, double t);

/// Integrates the velocity field against the interpolated envelope.
/// `times` must be sorted and inside [0, t_end].
std::vector<double> trajectory_integrated(const EnvelopeSolution& sol, double seed,
                                          std::span<const double> times, double rtol = 1e-10,
                                          double atol = 1e-12);

TrajectoryBundle bundle(const EnvelopeSolution& sol, std::span<const double> seeds,
                        std::span<const double> times, TrajectoryMethod method);

}  // namespace cmwave
