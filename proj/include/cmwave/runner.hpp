#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cmwave/config.hpp"

namespace cmwave {

enum class RunMode {
  /// Write the requested outputs; threshold failures are reported, not fatal.
  Simulate,
  /// Always compute residuals (plus the Fourier oracle for free parameters) and
  /// fail when any check misses its threshold.
  Verify,
};

/// Thresholds applied to the verification summary.
struct Thresholds {
  double residual_rel_l2 = 1e-4;
  double order_min = 1.8;
  double order_max = 2.2;
  /// Below this relative residual the field is exact to roundoff and orders are not checked.
  double roundoff_rel_l2 = 1e-12;
  double source_integral = 1e-8;
  double norm_error = 1e-8;
  double trajectory_diff = 1e-6;
  double fourier_l2 = 1e-6;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

/// Executes `config`, writing into config.output_dir. Throws cmwave::Error.
RunResult run(const ExperimentConfig& config, RunMode mode, const Thresholds& thresholds = {});

/// 2 for validation errors, 3 for numerical failures and anything else.
int exit_code_for(const std::exception& e);

/// Full CLI path: parse, apply `output_dir_override` when non-empty, run, print
/// check lines to `out` and a one-line diagnostic to `err` on failure.
int run_document(const std::string& text, RunMode mode, const std::string& output_dir_override,
                 std::ostream& out, std::ostream& err);

}  // namespace cmwave
