#include "cmwave/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cmwave {

namespace {

using Real = long double;
using Complex = std::complex<Real>;
using PreciseState = BasicEnvelopeState<Real>;

constexpr std::size_t kMargin = 2;
constexpr std::size_t kSubsteps = 4;

struct TimeLevels {
  PreciseState before;
  PreciseState now;
  PreciseState after;
  Real h_t = 0;
};

TimeLevels time_levels(const EnvelopeSolution& sol, double t, double h_t) {
  if (!(h_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_t", "time step must be > 0");
  if (!(t - h_t >= 0.0 && t + h_t <= sol.t_end())) {
    throw Error(ErrorCode::OutOfRange, "t",
                "t +/- h_t must lie inside [0, " + std::to_string(sol.t_end()) + "]");
  }
  TimeLevels lv;
  lv.before = sol.state_at(t - h_t).cast<Real>();
  lv.h_t = Real(t) - lv.before.t;
  lv.now = advance(sol.params(), lv.before, Real(t), kSubsteps);
  lv.after = advance(sol.params(), lv.now, Real(t) + lv.h_t, kSubsteps);
  return lv;
}

void check_grid(const SpatialGrid& grid, double delta) {
  if (grid.spacing() > delta / 10) {
    throw Error(ErrorCode::GridTooCoarse, "grid",
                "spacing " + std::to_string(grid.spacing()) + " exceeds delta/10");
  }
}

std::vector<Real> precise_points(const SpatialGrid& grid) {
  const Real h = (Real(grid.x_max()) - Real(grid.x_min())) / Real(grid.size() - 1);
  std::vector<Real> xs(grid.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = Real(grid.x_min()) + h * Real(i);
  return xs;
}

Real precise_spacing(const SpatialGrid& grid) {
  return (Real(grid.x_max()) - Real(grid.x_min())) / Real(grid.size() - 1);
}

template <class F>
auto sample(const std::vector<Real>& xs, F&& f) {
  using T = decltype(f(xs[0]));
  std::vector<T> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
  return out;
}

/// B = (x − q)²/δ² − 1
Real localization(const PreciseState& s, Real x) {
  const Real y = (x - s.q) / s.delta;
  return y * y - 1;
}

class Norms {
 public:
  Norms(Equation eq, const SpatialGrid& grid, double t, double h_t)
      : eq_(eq), grid_(grid), t_(t), h_t_(h_t) {}

  template <class R>
  void add(R residual, std::initializer_list<Real> term_magnitudes) {
    const Real r = std::abs(residual);
    sum2_ += r * r;
    max_ = std::max(max_, r);
    for (Real m : term_magnitudes) scale_ = std::max(scale_, m);
  }

  ResidualReport finish() const {
    ResidualReport rep;
    rep.equation = eq_;
    rep.grid = grid_;
    rep.t = t_;
    rep.h_t = h_t_;
    rep.l2 = double(std::sqrt(sum2_ * precise_spacing(grid_)));
    rep.max = double(max_);
    rep.scale = scale_ > 0 ? double(scale_) : std::numeric_limits<double>::min();
    const double span = grid_.x_max() - grid_.x_min();
    rep.rel_l2 = rep.l2 / (rep.scale * std::sqrt(span));
    rep.rel_max = rep.max / rep.scale;
    return rep;
  }

 private:
  Equation eq_;
  SpatialGrid grid_;
  double t_;
  double h_t_;
  Real sum2_ = 0;
  Real max_ = 0;
  Real scale_ = 0;
};

ResidualReport schrodinger_core(std::span<const Complex> before, std::span<const Complex> now,
                                std::span<const Complex> after, const SpatialGrid& grid,
                                const std::vector<Real>& xs, double t, Real h_t,
                                const PreciseState& center, const PhysicalParams& p) {
  const std::size_t n = grid.size();
  const Real h = precise_spacing(grid);
  const Real hbar = p.hbar;
  const Real m = p.m;
  const Real w = p.omega_at(t);
  const Real drive = p.drive_at(t);
  const Real lambda = p.lambda;
  const Real meas = hbar * Real(p.inv_tau()) / 4;
  const Complex i_unit(0, 1);

  Norms norms(Equation::Schrodinger, grid, t, double(h_t));
  for (std::size_t i = kMargin; i + kMargin < n; ++i) {
    const Real x = xs[i];
    const Complex psi_t = (after[i] - before[i]) / (2 * h_t);
    const Complex psi_xx = (now[i + 1] - Real(2) * now[i] + now[i - 1]) / (h * h);
    const Real v = m * w * w * x * x / 2 + lambda * x * drive;
    const Complex t1 = i_unit * hbar * psi_t;
    const Complex t2 = hbar * hbar / (2 * m) * psi_xx;
    const Complex t3 = -v * now[i];
    const Complex t4 = i_unit * meas * localization(center, x) * now[i];
    norms.add(t1 + t2 + t3 + t4, {std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
  }
  return norms.finish();
}

Real drive_force(const PhysicalParams& p, double t) { return Real(p.lambda) / Real(p.m) * Real(p.drive_at(t)); }

}  // namespace

std::string_view to_string(Equation eq) {
  switch (eq) {
    case Equation::Schrodinger: return "schrodinger";
    case Equation::Continuity: return "continuity";
    case Equation::Euler: return "euler";
    case Equation::Newton: return "newton";
    case Equation::MadelungImaginary: return "madelung_imaginary";
    case Equation::MadelungReal: return "madelung_real";
  }
  return "unknown";
}

ResidualReport schrodinger_residual_of(std::span<const std::complex<double>> before,
                                       std::span<const std::complex<double>> now,
                                       std::span<const std::complex<double>> after,
                                       const SpatialGrid& grid, double t, double h_t,
                                       const EnvelopeState& center, const PhysicalParams& params) {
  const std::size_t n = grid.size();
  if (before.size() != n || now.size() != n || after.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "fields", "field sizes must match the grid");
  }
  if (!(h_t > 0.0)) throw Error(ErrorCode::InvalidArgument, "h_t", "time step must be > 0");
  auto widen = [](std::span<const std::complex<double>> f) {
    std::vector<Complex> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = Complex(f[i].real(), f[i].imag());
    return out;
  };
  const auto b = widen(before), c = widen(now), a = widen(after);
  return schrodinger_core(b, c, a, grid, precise_points(grid), t, h_t, center.cast<Real>(), params);
}

ResidualReport schrodinger_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                                    double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const auto before = sample(xs, [&](Real x) { return psi(lv.before, x, p); });
  const auto now = sample(xs, [&](Real x) { return psi(lv.now, x, p); });
  const auto after = sample(xs, [&](Real x) { return psi(lv.after, x, p); });
  return schrodinger_core(before, now, after, grid, xs, t, lv.h_t, lv.now, p);
}

ResidualReport continuity_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                                   double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const Real h = precise_spacing(grid);
  const Real half_rate = Real(p.inv_tau()) / 2;
  const auto rho_b = sample(xs, [&](Real x) { return density(lv.before, x); });
  const auto rho_a = sample(xs, [&](Real x) { return density(lv.after, x); });
  const auto flux = sample(xs, [&](Real x) { return density(lv.now, x) * velocity_field(lv.now, x, p); });

  Norms norms(Equation::Continuity, grid, t, double(lv.h_t));
  for (std::size_t i = kMargin; i + kMargin < grid.size(); ++i) {
    const Real rho = density(lv.now, xs[i]);
    const Real t1 = (rho_a[i] - rho_b[i]) / (2 * lv.h_t);
    const Real t2 = (flux[i + 1] - flux[i - 1]) / (2 * h);
    const Real t3 = rho * half_rate * localization(lv.now, xs[i]);
    norms.add(t1 + t2 + t3, {std::abs(t1), std::abs(t2), std::abs(t3)});
  }
  return norms.finish();
}

ResidualReport euler_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                              double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const Real h = precise_spacing(grid);
  const Real w = p.omega_at(t);
  const Real force = drive_force(p, t);
  const Real m = p.m;
  const auto v_b = sample(xs, [&](Real x) { return velocity_field(lv.before, x, p); });
  const auto v_a = sample(xs, [&](Real x) { return velocity_field(lv.after, x, p); });
  const auto v_n = sample(xs, [&](Real x) { return velocity_field(lv.now, x, p); });
  const auto vqu = sample(xs, [&](Real x) { return quantum_potential_closed(lv.now, x, p); });

  Norms norms(Equation::Euler, grid, t, double(lv.h_t));
  for (std::size_t i = kMargin; i + kMargin < grid.size(); ++i) {
    const Real t1 = (v_a[i] - v_b[i]) / (2 * lv.h_t);
    const Real t2 = v_n[i] * (v_n[i + 1] - v_n[i - 1]) / (2 * h);
    const Real t3 = w * w * xs[i];
    const Real t4 = force;
    const Real t5 = (vqu[i + 1] - vqu[i - 1]) / (2 * h * m);
    norms.add(t1 + t2 + t3 + t4 + t5,
              {std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4), std::abs(t5)});
  }
  return norms.finish();
}

ResidualReport newton_residual(const EnvelopeSolution& sol, const SpatialGrid& grid, double t,
                               double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const Real h = precise_spacing(grid);
  const Real w = p.omega_at(t);
  const Real force = drive_force(p, t);
  const Real m = p.m;
  const Real rate = Real(p.inv_tau()) / 2;
  // Flow map from (x, t) to the same Bohmian path at another time level.
  auto follow = [&](const PreciseState& to, Real x, Real dt) {
    return to.q + std::exp(rate * dt) * (to.delta / lv.now.delta) * (x - lv.now.q);
  };
  const auto vqu = sample(xs, [&](Real x) { return quantum_potential_closed(lv.now, x, p); });

  Norms norms(Equation::Newton, grid, t, double(lv.h_t));
  for (std::size_t i = kMargin; i + kMargin < grid.size(); ++i) {
    const Real x = xs[i];
    const Real x_b = follow(lv.before, x, -lv.h_t);
    const Real x_a = follow(lv.after, x, lv.h_t);
    const Real dv_dt =
        (velocity_field(lv.after, x_a, p) - velocity_field(lv.before, x_b, p)) / (2 * lv.h_t);
    const Real t2 = w * w * x;
    const Real t3 = force;
    const Real t4 = (vqu[i + 1] - vqu[i - 1]) / (2 * h * m);
    norms.add(dv_dt + t2 + t3 + t4, {std::abs(dv_dt), std::abs(t2), std::abs(t3), std::abs(t4)});
  }
  return norms.finish();
}

ResidualReport madelung_imaginary_residual(const EnvelopeSolution& sol, const SpatialGrid& grid,
                                           double t, double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const Real h = precise_spacing(grid);
  const Real hbar_m = Real(p.hbar) / Real(p.m);
  const Real quarter_rate = Real(p.inv_tau()) / 4;
  const auto phi_b = sample(xs, [&](Real x) { return amplitude(lv.before, x); });
  const auto phi_a = sample(xs, [&](Real x) { return amplitude(lv.after, x); });
  const auto phi = sample(xs, [&](Real x) { return amplitude(lv.now, x); });
  const auto s = sample(xs, [&](Real x) { return phase(lv.now, x, p); });

  Norms norms(Equation::MadelungImaginary, grid, t, double(lv.h_t));
  for (std::size_t i = kMargin; i + kMargin < grid.size(); ++i) {
    const Real s_x = (s[i + 1] - s[i - 1]) / (2 * h);
    const Real s_xx = (s[i + 1] - 2 * s[i] + s[i - 1]) / (h * h);
    const Real phi_x = (phi[i + 1] - phi[i - 1]) / (2 * h);
    const Real t1 = (phi_a[i] - phi_b[i]) / (2 * lv.h_t);
    const Real t2 = hbar_m * s_x * phi_x;
    const Real t3 = hbar_m / 2 * phi[i] * s_xx;
    const Real t4 = quarter_rate * localization(lv.now, xs[i]) * phi[i];
    norms.add(t1 + t2 + t3 + t4, {std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
  }
  return norms.finish();
}

ResidualReport madelung_real_residual(const EnvelopeSolution& sol, const SpatialGrid& grid,
                                      double t, double h_t) {
  const TimeLevels lv = time_levels(sol, t, h_t);
  check_grid(grid, double(lv.now.delta));
  const PhysicalParams& p = sol.params();
  const auto xs = precise_points(grid);
  const Real h = precise_spacing(grid);
  const Real hbar_m = Real(p.hbar) / Real(p.m);
  const Real w = p.omega_at(t);
  const Real force = drive_force(p, t);
  const auto phi = sample(xs, [&](Real x) { return amplitude(lv.now, x); });
  const auto s_b = sample(xs, [&](Real x) { return phase(lv.before, x, p); });
  const auto s_a = sample(xs, [&](Real x) { return phase(lv.after, x, p); });
  const auto s = sample(xs, [&](Real x) { return phase(lv.now, x, p); });

  Norms norms(Equation::MadelungReal, grid, t, double(lv.h_t));
  for (std::size_t i = kMargin; i + kMargin < grid.size(); ++i) {
    const Real x = xs[i];
    const Real s_x = (s[i + 1] - s[i - 1]) / (2 * h);
    const Real phi_xx = (phi[i + 1] - 2 * phi[i] + phi[i - 1]) / (h * h);
    const Real t1 = -hbar_m * (s_a[i] - s_b[i]) / (2 * lv.h_t);
    const Real t2 = hbar_m * hbar_m / 2 * phi_xx / phi[i];
    const Real t3 = -hbar_m * hbar_m / 2 * s_x * s_x;
    const Real t4 = -(w * w * x * x / 2 + force * x);
    norms.add(t1 + t2 + t3 + t4, {std::abs(t1), std::abs(t2), std::abs(t3), std::abs(t4)});
  }
  return norms.finish();
}

std::pair<ResidualReport, ResidualReport> madelung_split_check(const EnvelopeSolution& sol,
                                                               const SpatialGrid& grid, double t,
                                                               double h_t) {
  return {madelung_imaginary_residual(sol, grid, t, h_t), madelung_real_residual(sol, grid, t, h_t)};
}

std::vector<double> ConvergenceStudy::orders() const {
  std::vector<double> out;
  for (const auto& lv : levels) {
    if (lv.order) out.push_back(*lv.order);
  }
  return out;
}

ConvergenceStudy convergence_study(const ResidualFunction& fn, const EnvelopeSolution& sol,
                                   const SpatialGrid& grid, double t, double h_t,
                                   std::size_t levels) {
  ConvergenceStudy study;
  SpatialGrid g = grid;
  double dt = h_t;
  for (std::size_t k = 0; k < levels; ++k) {
    ResidualReport rep = fn(sol, g, t, dt);
    if (!study.levels.empty()) {
      const double prev = study.levels.back().l2;
      if (prev > 0.0 && rep.l2 > 0.0) rep.order = std::log2(prev / rep.l2);
    }
    study.levels.push_back(rep);
    g = g.refined(2);
    dt /= 2;
  }
  return study;
}

double source_integral(const EnvelopeState& state, const SpatialGrid& grid,
                       const PhysicalParams& params) {
  const double half_rate = params.inv_tau() / 2;
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    const double y = (x - state.q) / state.delta;
    f[i] = density(state, x) * half_rate * (y * y - 1);
  }
  return trapezoid(f, grid.spacing());
}

double default_time_step(double h, double delta, const PhysicalParams& params) {
  return std::min(1e-4, h * h / delta * params.m / params.hbar);
}

SpatialGrid reference_grid(const EnvelopeState& state, double window) {
  const auto intervals = static_cast<std::size_t>(std::llround(2 * window * 100));
  return SpatialGrid::centered(state.q, window * state.delta, intervals + 1);
}

}  // namespace cmwave
