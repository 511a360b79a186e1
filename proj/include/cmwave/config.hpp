#pragma once

// Experiment configuration documents: whitespace-separated `key=value` tokens,
// `#` starts a comment running to the end of the line. Schedules are encoded as
// `kind:arg1:arg2[:...]`, lists as comma-separated values.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cmwave/core.hpp"
#include "cmwave/dynamics.hpp"

namespace cmwave {

enum class Output { Envelope, Packet, Trajectories, Residuals, FourierCheck };

std::string_view to_string(Output output);

struct ExperimentConfig {
  PhysicalParams params;
  InitialConditions ic;
  double t_end = 10.0;
  /// Uniform output samples on [0, t_end], endpoints included.
  std::size_t samples = 201;
  /// Packet snapshots span q ± window·δ.
  double window = 10.0;
  std::size_t grid_points = 2001;
  double rtol = 1e-10;
  double atol = 1e-12;
  double delta_min = kDefaultDeltaMin;
  std::vector<Output> outputs{Output::Envelope};
  /// Empty: x0 + {−2, −1, 0, 1, 2}·a0.
  std::vector<double> seeds;
  /// Empty: {0, t_end}.
  std::vector<double> packet_times;
  /// Empty: {t_end/2}.
  std::vector<double> residual_times;
  std::string output_dir = "out";

  bool wants(Output o) const;
  SolverControls controls() const;
  std::vector<double> effective_seeds() const;
  std::vector<double> effective_packet_times() const;
  std::vector<double> effective_residual_times() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse failure with its 1-based position in the document.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string key, std::size_t line, std::size_t column,
              const std::string& message)
      : Error(code, key,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Throws ConfigError (ParseError, UnknownKey) or Error (core validation codes,
/// InvalidArgument for inconsistent settings). When a0 is absent it defaults to
/// the steady width if one exists, else 1.
ExperimentConfig parse_config(std::string_view text);

/// Canonical document; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Single schedule values in the document grammar, e.g. "cosine:1:0.2:3".
FrequencySchedule parse_frequency(std::string_view text);
DriveSchedule parse_drive(std::string_view text);

std::string format_schedule(const FrequencySchedule& schedule);
std::string format_schedule(const DriveSchedule& schedule);

/// Shortest-independent fixed format: 17 significant digits, locale-free.
std::string format_number(double value);

/// Default document printed by `print-defaults`.
std::string default_config_text();

}  // namespace cmwave
