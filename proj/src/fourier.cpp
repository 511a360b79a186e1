#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <numbers>

#include "cmwave/verify.hpp"

namespace cmwave {

namespace {

constexpr double kEdgeTolerance = 1e-12;
constexpr double kNyquistTolerance = 1e-10;

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

/// In-place transform of `data` in FFTW's sign convention.
void transform(std::vector<std::complex<double>>& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  Plan plan(fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE));
  fftw_execute(plan.get());
}

void require_power_of_two(const SpatialGrid& grid) {
  if (!std::has_single_bit(grid.size())) {
    throw Error(ErrorCode::InvalidGrid, "grid", "spectral grid needs a power-of-two point count");
  }
}

/// Wavenumber of FFT bin j.
double bin_wavenumber(std::size_t j, std::size_t n, double dk) {
  const auto signed_j = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - double(n);
  return signed_j * dk;
}

}  // namespace

double FourierSpectrum::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitude) acc += std::norm(a);
  return acc * dk;
}

FourierSpectrum fourier_spectrum(const PacketField& field, const PhysicalParams& params) {
  require_power_of_two(field.grid);
  const std::size_t n = field.grid.size();
  const double h = field.grid.spacing();
  const double dk = 2 * std::numbers::pi / (double(n) * h);
  std::vector<std::complex<double>> data = field.values;
  transform(data, FFTW_FORWARD);

  FourierSpectrum spec;
  spec.dk = dk;
  spec.k.resize(n);
  spec.amplitude.resize(n);
  spec.omega.resize(n);
  const double norm = h / std::sqrt(2 * std::numbers::pi);
  for (std::size_t j = 0; j < n; ++j) {
    // Shift so the output runs from the most negative wavenumber upwards.
    const std::size_t src = (j + n / 2) % n;
    const double k = bin_wavenumber(src, n, dk);
    spec.k[j] = k;
    spec.amplitude[j] = data[src] * norm * std::polar(1.0, -k * field.grid.x_min());
    spec.omega[j] = params.hbar * k * k / (2 * params.m);
  }
  return spec;
}

PacketField fourier_free_packet(const PacketField& psi0, double t, const PhysicalParams& params) {
  if (!params.is_free()) {
    throw Error(ErrorCode::InvalidArgument, "params",
                "spectral propagation needs Omega = 0, lambda = 0 and measurement off");
  }
  require_power_of_two(psi0.grid);
  const std::size_t n = psi0.grid.size();
  if (psi0.values.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "psi0", "field size does not match its grid");
  }
  double peak = 0.0;
  for (const auto& v : psi0.values) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(psi0.values.front()), std::abs(psi0.values.back()));
  if (edge > kEdgeTolerance * peak) {
    throw Error(ErrorCode::AliasingRisk, "psi0", "packet does not vanish at the grid edges");
  }

  const double h = psi0.grid.spacing();
  const double dk = 2 * std::numbers::pi / (double(n) * h);
  std::vector<std::complex<double>> data = psi0.values;
  transform(data, FFTW_FORWARD);

  double spec_peak = 0.0;
  for (const auto& v : data) spec_peak = std::max(spec_peak, std::abs(v));
  if (std::abs(data[n / 2]) > kNyquistTolerance * spec_peak) {
    throw Error(ErrorCode::AliasingRisk, "psi0", "spectrum is not resolved at the Nyquist wavenumber");
  }

  const double inv_n = 1.0 / double(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = bin_wavenumber(j, n, dk);
    const double omega = params.hbar * k * k / (2 * params.m);
    data[j] *= std::polar(inv_n, -omega * t);
  }
  transform(data, FFTW_BACKWARD);
  return PacketField{psi0.grid, psi0.t + t, std::move(data)};
}

double l2_difference(const PacketField& a, const PacketField& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw Error(ErrorCode::InvalidArgument, "fields", "fields must share a grid");
  }
  std::vector<double> d(a.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(a.values[i] - b.values[i]);
  return std::sqrt(trapezoid(d, a.grid.spacing()));
}

}  // namespace cmwave
