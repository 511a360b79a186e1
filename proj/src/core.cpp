#include "cmwave/core.hpp"

#include <algorithm>
#include <string>

namespace cmwave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NonPositiveHbar: return "NonPositiveHbar";
    case ErrorCode::NonPositiveTau: return "NonPositiveTau";
    case ErrorCode::NonPositiveInitialWidth: return "NonPositiveInitialWidth";
    case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::AliasingRisk: return "AliasingRisk";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::WidthUnderflow: return "WidthUnderflow";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::WidthUnderflow:
    case ErrorCode::StepSizeUnderflow:
    case ErrorCode::NonFiniteState:
    case ErrorCode::Overflow:
      return false;
    default:
      return true;
  }
}

Table::Table(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) {
    throw Error(ErrorCode::InvalidSchedule, "table", "at least one knot is required");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].value)) {
      throw Error(ErrorCode::InvalidSchedule, "table", "non-finite knot");
    }
    if (i > 0 && !(knots_[i].t > knots_[i - 1].t)) {
      throw Error(ErrorCode::InvalidSchedule, "table", "knot times must be strictly increasing");
    }
  }
}

double Table::operator()(double t) const {
  if (t <= knots_.front().t) return knots_.front().value;
  if (t >= knots_.back().t) return knots_.back().value;
  auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double v, const Knot& k) { return v < k.t; });
  auto lo = hi - 1;
  if (t == lo->t) return lo->value;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return lo->value + w * (hi->value - lo->value);
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

double eval_omega(const FrequencySchedule& schedule, double t) {
  return std::visit(
      Overloaded{
          [](const ConstantFrequency& c) { return c.omega0; },
          [t](const CosineModulatedFrequency& c) {
            return c.omega0 * std::sqrt(std::max(0.0, 1.0 + c.epsilon * std::cos(c.omega_d * t)));
          },
          [t](const Table& table) { return table(t); },
      },
      schedule);
}

double eval_drive(const DriveSchedule& schedule, double t) {
  return std::visit(
      Overloaded{
          [](const ZeroDrive&) { return 0.0; },
          [](const ConstantDrive& c) { return c.x_c; },
          [t](const SinusoidDrive& s) { return s.amplitude * std::sin(s.omega_x * t + s.phase); },
          [t](const Table& table) { return table(t); },
      },
      schedule);
}

bool PhysicalParams::is_free() const {
  const auto* c = std::get_if<ConstantFrequency>(&omega);
  return measurement_off && lambda == 0.0 && c != nullptr && c->omega0 == 0.0;
}

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFiniteParameter, field, "value must be finite");
  }
}

void validate_frequency(const FrequencySchedule& schedule) {
  std::visit(Overloaded{
                 [](const ConstantFrequency& c) {
                   require_finite(c.omega0, "omega");
                   if (c.omega0 < 0.0) {
                     throw Error(ErrorCode::InvalidSchedule, "omega", "frequency must be >= 0");
                   }
                 },
                 [](const CosineModulatedFrequency& c) {
                   require_finite(c.omega0, "omega");
                   require_finite(c.epsilon, "omega");
                   require_finite(c.omega_d, "omega");
                   if (c.omega0 < 0.0) {
                     throw Error(ErrorCode::InvalidSchedule, "omega", "frequency must be >= 0");
                   }
                 },
                 [](const Table& table) {
                   for (const auto& k : table.knots()) {
                     if (k.value < 0.0) {
                       throw Error(ErrorCode::InvalidSchedule, "omega",
                                   "tabulated frequency must be >= 0");
                     }
                   }
                 },
             },
             schedule);
}

void validate_drive(const DriveSchedule& schedule) {
  std::visit(Overloaded{
                 [](const ZeroDrive&) {},
                 [](const ConstantDrive& c) { require_finite(c.x_c, "drive"); },
                 [](const SinusoidDrive& s) {
                   require_finite(s.amplitude, "drive");
                   require_finite(s.omega_x, "drive");
                   require_finite(s.phase, "drive");
                 },
                 [](const Table&) {},
             },
             schedule);
}

}  // namespace

Configuration validate(const PhysicalParams& params, const InitialConditions& ic) {
  require_finite(params.m, "m");
  require_finite(params.hbar, "hbar");
  require_finite(params.lambda, "lambda");
  require_finite(ic.x0, "x0");
  require_finite(ic.v0, "v0");
  require_finite(ic.a0, "a0");
  require_finite(ic.b0, "b0");
  if (!(params.m > 0.0)) throw Error(ErrorCode::NonPositiveMass, "m", "mass must be > 0");
  if (!(params.hbar > 0.0)) throw Error(ErrorCode::NonPositiveHbar, "hbar", "hbar must be > 0");
  if (!params.measurement_off) {
    require_finite(params.tau, "tau");
    if (!(params.tau > 0.0)) {
      throw Error(ErrorCode::NonPositiveTau, "tau", "measurement time must be > 0");
    }
  }
  if (!(ic.a0 > 0.0)) {
    throw Error(ErrorCode::NonPositiveInitialWidth, "a0", "initial width must be > 0");
  }
  validate_frequency(params.omega);
  validate_drive(params.drive);
  // S₀(0) must be representable.
  require_finite(initial_phase(params, ic), "x0");
  return Configuration{params, ic};
}

}  // namespace cmwave
