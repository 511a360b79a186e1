#include "cmwave/packet.hpp"

#include <string>

namespace cmwave {

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
    throw Error(ErrorCode::InvalidGrid, "grid", "need finite x_min < x_max");
  }
  if (n < 8) throw Error(ErrorCode::InvalidGrid, "grid", "need at least 8 points");
}

SpatialGrid SpatialGrid::centered(double center, double half_width, std::size_t n) {
  return {center - half_width, center + half_width, n};
}

SpatialGrid SpatialGrid::around(const EnvelopeState& s, double window, std::size_t n) {
  return centered(s.q, window * s.delta, n);
}

std::vector<double> SpatialGrid::points() const {
  std::vector<double> xs(n_);
  for (std::size_t i = 0; i < n_; ++i) xs[i] = x(i);
  return xs;
}

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * h;
}

double PacketField::norm() const {
  std::vector<double> rho(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rho[i] = std::norm(values[i]);
  return trapezoid(rho, grid.spacing());
}

double classical_potential(double x, double t, const PhysicalParams& params) {
  const double w = params.omega_at(t);
  return 0.5 * params.m * w * w * x * x + params.lambda * x * params.drive_at(t);
}

double classical_potential_expanded(double x, double t, double center,
                                    const PhysicalParams& params) {
  const double w = params.omega_at(t);
  const double drive = params.drive_at(t);
  const double v0 = 0.5 * params.m * w * w * center * center + params.lambda * center * drive;
  const double v1 = params.m * w * w * center + params.lambda * drive;
  const double v2 = params.m * w * w;
  const double y = x - center;
  return v0 + v1 * y + 0.5 * v2 * y * y;
}

std::vector<double> quantum_potential_fd(std::span<const double> sqrt_rho, double h,
                                         const PhysicalParams& params) {
  const std::size_t n = sqrt_rho.size();
  if (n < 4) throw Error(ErrorCode::InvalidGrid, "grid", "need at least 4 samples");
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidGrid, "grid", "spacing must be > 0");
  const double coef = -params.hbar * params.hbar / (2 * params.m);
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d2 = (sqrt_rho[i + 1] - 2 * sqrt_rho[i] + sqrt_rho[i - 1]) * inv_h2;
    out[i] = coef * d2 / sqrt_rho[i];
  }
  const auto& f = sqrt_rho;
  const double d2_lo = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) * inv_h2;
  const double d2_hi = (2 * f[n - 1] - 5 * f[n - 2] + 4 * f[n - 3] - f[n - 4]) * inv_h2;
  out[0] = coef * d2_lo / f[0];
  out[n - 1] = coef * d2_hi / f[n - 1];
  return out;
}

std::vector<double> quantum_potential_fd(const EnvelopeState& state, const SpatialGrid& grid,
                                         const PhysicalParams& params) {
  const double h = grid.spacing();
  if (h > state.delta / 10) {
    throw Error(ErrorCode::GridTooCoarse, "grid",
                "spacing " + std::to_string(h) + " exceeds delta/10");
  }
  if (grid.x_min() > state.q - 6 * state.delta || grid.x_max() < state.q + 6 * state.delta) {
    throw Error(ErrorCode::GridTooCoarse, "grid", "grid must span q +/- 6 delta");
  }
  std::vector<double> amp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) amp[i] = amplitude(state, grid.x(i));
  return quantum_potential_fd(amp, h, params);
}

PacketField sample_packet(const EnvelopeState& state, const SpatialGrid& grid,
                          const PhysicalParams& params) {
  PacketField field{grid, state.t, {}};
  field.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) field.values[i] = psi(state, grid.x(i), params);
  return field;
}

}  // namespace cmwave
