#include "cmwave/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace cmwave {

namespace {

using State5 = ode::Vec<double, 5>;

State5 pack(const EnvelopeState& s) { return {s.q, s.qdot, s.delta, s.deltadot, s.s0}; }

EnvelopeState unpack(double t, const State5& y) { return {t, y[0], y[1], y[2], y[3], y[4]}; }

State5 pack(const EnvelopeRate& r) { return {r.qdot, r.qddot, r.deltadot, r.deltaddot, r.s0dot}; }

EnvelopeRate unpack_rate(const State5& d) { return {d[0], d[1], d[2], d[3], d[4]}; }

void check_width(const EnvelopeState& s, double delta_min) {
  if (!(s.delta > delta_min)) {
    throw Error(ErrorCode::WidthUnderflow, "delta",
                "packet width fell to " + std::to_string(s.delta) + " at t=" + std::to_string(s.t));
  }
}

void check_finite(const EnvelopeState& s) {
  for (double v : {s.q, s.qdot, s.delta, s.deltadot, s.s0}) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteState, "state", "non-finite state at t=" + std::to_string(s.t));
    }
  }
}

double hermite(double y0, double d0, double y1, double d1, double H, double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * H * d0 + h01 * y1 + h11 * H * d1;
}

}  // namespace

EnvelopeRate rhs(const EnvelopeState& state, const PhysicalParams& params, double delta_min) {
  check_width(state, delta_min);
  return envelope_rate(state, params);
}

EnvelopeState initial_state(const PhysicalParams& params, const InitialConditions& ic) {
  return {0.0, ic.x0, ic.v0, ic.a0, ic.b0, initial_phase(params, ic)};
}

EnvelopeSolution::EnvelopeSolution(PhysicalParams params, InitialConditions ic,
                                   std::vector<EnvelopeState> samples,
                                   std::vector<EnvelopeRate> rates,
                                   std::vector<std::size_t> uniform_indices)
    : params_(std::move(params)),
      ic_(ic),
      samples_(std::move(samples)),
      rates_(std::move(rates)),
      uniform_indices_(std::move(uniform_indices)) {
  if (samples_.empty() || samples_.size() != rates_.size()) {
    throw Error(ErrorCode::InvalidArgument, "EnvelopeSolution", "samples and rates must match");
  }
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t > samples_[i - 1].t)) {
      throw Error(ErrorCode::InvalidArgument, "EnvelopeSolution",
                  "sample times must be strictly increasing");
    }
  }
}

std::vector<EnvelopeState> EnvelopeSolution::uniform_samples() const {
  std::vector<EnvelopeState> out;
  out.reserve(uniform_indices_.size());
  for (auto i : uniform_indices_) out.push_back(samples_[i]);
  return out;
}

EnvelopeState EnvelopeSolution::state_at(double t) const {
  if (!(t >= 0.0 && t <= t_end())) {
    throw Error(ErrorCode::OutOfRange, "t",
                "time " + std::to_string(t) + " outside [0, " + std::to_string(t_end()) + "]");
  }
  auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                             [](double v, const EnvelopeState& s) { return v < s.t; });
  const auto k = static_cast<std::size_t>(hi - samples_.begin()) - 1;
  const EnvelopeState& a = samples_[k];
  if (t == a.t || k + 1 == samples_.size()) return a;
  const EnvelopeState& b = samples_[k + 1];
  const EnvelopeRate& ra = rates_[k];
  const EnvelopeRate& rb = rates_[k + 1];
  const double H = b.t - a.t;
  const double theta = (t - a.t) / H;
  return {t,
          hermite(a.q, ra.qdot, b.q, rb.qdot, H, theta),
          hermite(a.qdot, ra.qddot, b.qdot, rb.qddot, H, theta),
          hermite(a.delta, ra.deltadot, b.delta, rb.deltadot, H, theta),
          hermite(a.deltadot, ra.deltaddot, b.deltadot, rb.deltaddot, H, theta),
          hermite(a.s0, ra.s0dot, b.s0, rb.s0dot, H, theta)};
}

EnvelopeSolution integrate(const PhysicalParams& params, const InitialConditions& ic, double t_end,
                           const SolverControls& controls) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end", "t_end must be finite and > 0");
  }
  const Configuration cfg = validate(params, ic);
  const EnvelopeState s0 = initial_state(cfg.params, cfg.ic);
  check_width(s0, controls.delta_min);

  std::vector<double> stops;
  const std::size_t n_uniform = std::max<std::size_t>(controls.uniform_samples, 2);
  stops.reserve(n_uniform - 1);
  for (std::size_t i = 1; i < n_uniform; ++i) {
    stops.push_back(i + 1 == n_uniform ? t_end : t_end * double(i) / double(n_uniform - 1));
  }

  std::vector<EnvelopeState> samples{s0};
  std::vector<EnvelopeRate> rates{envelope_rate(s0, cfg.params)};
  std::vector<std::size_t> uniform{0};

  auto f = [&](double t, const State5& y, State5& dy) {
    const EnvelopeState s = unpack(t, y);
    if (!(s.delta > controls.delta_min)) return false;
    dy = pack(envelope_rate(s, cfg.params));
    return true;
  };
  auto observe = [&](double t, const State5& y, const State5& dy, bool is_stop) {
    const EnvelopeState s = unpack(t, y);
    check_finite(s);
    check_width(s, controls.delta_min);
    samples.push_back(s);
    rates.push_back(unpack_rate(dy));
    if (is_stop) uniform.push_back(samples.size() - 1);
  };

  ode::StepControl ctl;
  ctl.rtol = controls.rtol;
  ctl.atol = controls.atol;
  ctl.h_init = controls.h_init;
  ctl.h_min = controls.h_min;
  ctl.h_max = controls.h_max;
  ctl.max_steps = controls.max_steps;
  ode::integrate_dopri5<5>(f, 0.0, pack(s0), stops, ctl, ErrorCode::WidthUnderflow, observe);

  return EnvelopeSolution(cfg.params, cfg.ic, std::move(samples), std::move(rates),
                          std::move(uniform));
}

EnvelopeSolution integrate_fixed(const PhysicalParams& params, const InitialConditions& ic,
                                 double t_end, std::size_t steps, double delta_min) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::InvalidArgument, "t_end", "t_end must be finite and > 0");
  }
  if (steps == 0) throw Error(ErrorCode::InvalidArgument, "steps", "at least one step is required");
  const Configuration cfg = validate(params, ic);
  EnvelopeState s = initial_state(cfg.params, cfg.ic);
  check_width(s, delta_min);

  std::vector<EnvelopeState> samples{s};
  std::vector<EnvelopeRate> rates{envelope_rate(s, cfg.params)};
  std::vector<std::size_t> uniform{0};
  samples.reserve(steps + 1);
  rates.reserve(steps + 1);
  const double h = t_end / double(steps);
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t_next = i == steps ? t_end : h * double(i);
    s = advance(cfg.params, s, t_next, 1);
    check_finite(s);
    check_width(s, delta_min);
    samples.push_back(s);
    rates.push_back(envelope_rate(s, cfg.params));
    uniform.push_back(i);
  }
  return EnvelopeSolution(cfg.params, cfg.ic, std::move(samples), std::move(rates),
                          std::move(uniform));
}

std::optional<double> steady_width(const PhysicalParams& params) {
  const auto* c = std::get_if<ConstantFrequency>(&params.omega);
  if (c == nullptr) return std::nullopt;
  const double inv_tau = params.inv_tau();
  const double k = c->omega0 * c->omega0 + inv_tau * inv_tau / 4;
  if (!(k > 0.0)) return std::nullopt;
  const double d4 = params.hbar * params.hbar / (4 * params.m * params.m * k);
  const double d = std::sqrt(std::sqrt(d4));
  if (!std::isfinite(d) || !(d > 0.0)) return std::nullopt;
  return d;
}

}  // namespace cmwave
