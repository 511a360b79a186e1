#include "cmwave/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmwave/packet.hpp"

namespace cmwave {

namespace {

constexpr double kMaxExponent = 700.0;

void check_times(const EnvelopeSolution& sol, std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0 && times[k] <= sol.t_end())) {
      throw Error(ErrorCode::OutOfRange, "times",
                  "time " + std::to_string(times[k]) + " outside the solution range");
    }
    if (k > 0 && times[k] < times[k - 1]) {
      throw Error(ErrorCode::InvalidArgument, "times", "times must be sorted");
    }
  }
}

}  // namespace

std::vector<double> TrajectoryBundle::half_width() const {
  std::vector<double> out(times.size(), 0.0);
  if (paths.empty()) return out;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double lo = paths.front()[k], hi = lo;
    for (const auto& p : paths) {
      lo = std::min(lo, p[k]);
      hi = std::max(hi, p[k]);
    }
    out[k] = (hi - lo) / 2;
  }
  return out;
}

double stretch_factor(const EnvelopeSolution& sol, double t) {
  const EnvelopeState s = sol.state_at(t);
  const double ratio = s.delta / sol.samples().front().delta;
  const double exponent = t * measurement_rate<double>(sol.params());
  if (exponent <= kMaxExponent) return std::exp(exponent) * ratio;
  const double log_factor = exponent + std::log(ratio);
  if (log_factor > kMaxExponent) {
    throw Error(ErrorCode::Overflow, "t",
                "trajectory stretch e^{t/2tau} overflows at t=" + std::to_string(t));
  }
  return std::exp(log_factor);
}

double trajectory_closed(const EnvelopeSolution& sol, double seed, double t) {
  if (!std::isfinite(seed)) throw Error(ErrorCode::NonFiniteParameter, "seed", "seed must be finite");
  const EnvelopeState s = sol.state_at(t);
  if (t == 0.0) return seed;
  const double q0 = sol.samples().front().q;
  const double offset = seed - q0;
  if (offset == 0.0) return s.q;
  const double exponent = t * measurement_rate<double>(sol.params());
  if (exponent <= kMaxExponent) {
    return s.q + std::exp(exponent) * (s.delta / sol.samples().front().delta) * offset;
  }
  // Combine the logs so a small offset can still yield a finite position.
  const double log_mag = exponent + std::log(s.delta / sol.samples().front().delta) +
                         std::log(std::abs(offset));
  if (log_mag > kMaxExponent) {
    throw Error(ErrorCode::Overflow, "t",
                "trajectory position overflows at t=" + std::to_string(t));
  }
  return s.q + std::copysign(std::exp(log_mag), offset);
}

std::vector<double> trajectory_integrated(const EnvelopeSolution& sol, double seed,
                                          std::span<const double> times, double rtol,
                                          double atol) {
  if (!std::isfinite(seed)) throw Error(ErrorCode::NonFiniteParameter, "seed", "seed must be finite");
  check_times(sol, times);
  std::vector<double> out;
  out.reserve(times.size());
  // Sample times at 0 (or repeated) are answered without integrating.
  std::vector<double> stops;
  for (double t : times) {
    if (t > 0.0 && (stops.empty() || t > stops.back())) stops.push_back(t);
  }

  const PhysicalParams& p = sol.params();
  auto f = [&](double t, const ode::Vec<double, 1>& y, ode::Vec<double, 1>& dy) {
    const EnvelopeState s = sol.state_at(std::min(t, sol.t_end()));
    dy[0] = velocity_field(s, y[0], p);
    return std::isfinite(dy[0]);
  };
  std::vector<double> at_stops;
  at_stops.reserve(stops.size());
  auto observe = [&](double, const ode::Vec<double, 1>& y, const ode::Vec<double, 1>&, bool is_stop) {
    if (is_stop) at_stops.push_back(y[0]);
  };
  ode::StepControl ctl;
  ctl.rtol = rtol;
  ctl.atol = atol;
  ode::integrate_dopri5<1>(f, 0.0, {seed}, stops, ctl, ErrorCode::NonFiniteState, observe);

  std::size_t j = 0;
  for (double t : times) {
    if (t <= 0.0) {
      out.push_back(seed);
      continue;
    }
    while (stops[j] < t) ++j;
    out.push_back(at_stops[j]);
  }
  return out;
}

TrajectoryBundle bundle(const EnvelopeSolution& sol, std::span<const double> seeds,
                        std::span<const double> times, TrajectoryMethod method) {
  check_times(sol, times);
  TrajectoryBundle b;
  b.seeds.assign(seeds.begin(), seeds.end());
  b.times.assign(times.begin(), times.end());
  b.method = method;
  b.paths.reserve(seeds.size());
  for (double seed : seeds) {
    if (!std::isfinite(seed)) throw Error(ErrorCode::NonFiniteParameter, "seed", "seed must be finite");
    if (method == TrajectoryMethod::Integrated) {
      b.paths.push_back(trajectory_integrated(sol, seed, times));
    } else {
      std::vector<double> path;
      path.reserve(times.size());
      for (double t : times) path.push_back(t == 0.0 ? seed : trajectory_closed(sol, seed, t));
      b.paths.push_back(std::move(path));
    }
  }
  return b;
}

}  // namespace cmwave
