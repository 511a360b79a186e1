#include "cmwave/runner.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "cmwave/packet.hpp"
#include "cmwave/svg.hpp"
#include "cmwave/trajectories.hpp"
#include "cmwave/verify.hpp"

namespace cmwave {

namespace {

using nlohmann::ordered_json;

constexpr std::size_t kStudyLevels = 3;
constexpr double kMadelungWindow = 6.0;
constexpr double kFourierMargin = 12.0;
constexpr std::size_t kFourierMaxPoints = std::size_t{1} << 20;

std::string stamp(double t) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), t, std::chars_format::fixed, 6);
  (void)ec;
  return std::string(buf, ptr);
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "plots", ec);
    if (ec) {
      throw Error(ErrorCode::InvalidArgument, "output_dir",
                  "cannot create '" + dir_.string() + "': " + ec.message());
    }
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::InvalidArgument, "output_dir", "cannot write '" + path.string() + "'");
    files_.push_back(path);
  }

  std::vector<std::filesystem::path> files() && { return std::move(files_); }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

struct Csv {
  std::ostringstream out;

  explicit Csv(std::initializer_list<std::string> header) { row_strings(header); }
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }

  template <typename Range>
  void row_strings(const Range& cells) {
    bool first = true;
    for (const auto& c : cells) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << format_number(values[i]);
    out << '\n';
  }
};

std::vector<double> times_of(const std::vector<EnvelopeState>& states) {
  std::vector<double> t;
  for (const auto& s : states) t.push_back(s.t);
  return t;
}

void write_envelope(Writer& w, const std::vector<EnvelopeState>& states) {
  Csv csv({"t", "q", "qdot", "delta", "deltadot", "s0"});
  svg::Series q{"q", {}, {}}, d{"delta", {}, {}};
  for (const auto& s : states) {
    csv.row({s.t, s.q, s.qdot, s.delta, s.deltadot, s.s0});
    q.x.push_back(s.t);
    q.y.push_back(s.q);
    d.x.push_back(s.t);
    d.y.push_back(s.delta);
  }
  w.write("envelope.csv", csv.out.str());
  w.write("plots/q.svg", svg::line_chart("packet center q(t)", "t", "q", std::span(&q, 1)));
  w.write("plots/delta.svg", svg::line_chart("packet width delta(t)", "t", "delta", std::span(&d, 1)));
}

void write_packets(Writer& w, const ExperimentConfig& cfg, const EnvelopeSolution& sol) {
  const auto& p = cfg.params;
  for (double t : cfg.effective_packet_times()) {
    const auto s = sol.state_at(t);
    const auto grid = SpatialGrid::around(s, cfg.window, cfg.grid_points);
    Csv csv({"x", "re", "im", "rho", "S", "v_qu", "V_qu"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      const auto v = psi(s, x, p);
      csv.row({x, v.real(), v.imag(), density(s, x), phase(s, x, p), velocity_field(s, x, p),
               quantum_potential_closed(s, x, p)});
    }
    w.write("packet_t" + stamp(t) + ".csv", csv.out.str());
  }
}

void write_trajectories(Writer& w, const ExperimentConfig& cfg, const EnvelopeSolution& sol,
                        const std::vector<double>& times) {
  const auto seeds = cfg.effective_seeds();
  const auto b = bundle(sol, seeds, times, TrajectoryMethod::ClosedForm);
  std::vector<std::string> header{"t"};
  for (double s : seeds) header.push_back("x(" + format_number(s) + ")");
  Csv csv(header);
  std::vector<svg::Series> fan;
  for (std::size_t i = 0; i < seeds.size(); ++i) fan.push_back({header[i + 1], times, b.paths[i]});
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row{times[k]};
    for (const auto& path : b.paths) row.push_back(path[k]);
    csv.row(row);
  }
  w.write("trajectories.csv", csv.out.str());
  w.write("plots/trajectories.svg", svg::line_chart("quantum trajectories", "t", "x", fan));
}

ordered_json report_json(const ResidualReport& r) {
  ordered_json j;
  j["h"] = r.grid.spacing();
  j["h_t"] = r.h_t;
  j["points"] = r.grid.size();
  j["l2"] = r.l2;
  j["max"] = r.max;
  j["scale"] = r.scale;
  j["rel_l2"] = r.rel_l2;
  j["rel_max"] = r.rel_max;
  if (r.order) j["order"] = *r.order;
  return j;
}

struct Verification {
  ordered_json json = ordered_json::object();
  std::vector<CheckResult> checks;

  void check(std::string name, bool pass, std::string detail) {
    checks.push_back({std::move(name), pass, std::move(detail)});
  }
};

std::string describe(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

void residual_checks(Verification& v, const ExperimentConfig& cfg, const EnvelopeSolution& sol,
                     const Thresholds& th) {
  struct Entry {
    Equation eq;
    ResidualReport (*fn)(const EnvelopeSolution&, const SpatialGrid&, double, double);
    bool narrow;
    bool check_order;
  };
  const Entry entries[] = {
      {Equation::Schrodinger, schrodinger_residual, false, true},
      {Equation::Continuity, continuity_residual, false, true},
      {Equation::Euler, euler_residual, false, true},
      {Equation::Newton, newton_residual, false, false},
      {Equation::MadelungImaginary, madelung_imaginary_residual, true, true},
      {Equation::MadelungReal, madelung_real_residual, true, true},
  };

  const auto& p = cfg.params;
  ordered_json per_time = ordered_json::array();
  for (double requested : cfg.effective_residual_times()) {
    const auto probe = sol.state_at(requested);
    const auto probe_grid = reference_grid(probe);
    const double h_t = default_time_step(probe_grid.spacing(), probe.delta, p);
    if (2 * h_t > cfg.t_end) {
      throw Error(ErrorCode::InvalidArgument, "t_end", "run too short for residual time stencils");
    }
    const double t = std::clamp(requested, h_t, cfg.t_end - h_t);
    const auto s = sol.state_at(t);
    const auto wide = reference_grid(s);
    const double h = wide.spacing();
    const auto narrow_n = static_cast<std::size_t>(std::ceil(2 * kMadelungWindow * s.delta / h)) + 1;
    const auto narrow = SpatialGrid::centered(s.q, 0.5 * h * double(narrow_n - 1), narrow_n);

    ordered_json tj;
    tj["t"] = t;
    tj["requested_t"] = requested;
    ordered_json eqs = ordered_json::object();
    for (const auto& e : entries) {
      const auto study = convergence_study(e.fn, sol, e.narrow ? narrow : wide, t, h_t, kStudyLevels);
      const auto& finest = study.levels.back();
      const auto orders = study.orders();
      const bool at_roundoff = finest.rel_l2 < th.roundoff_rel_l2;
      bool pass = finest.rel_l2 < th.residual_rel_l2;
      if (e.check_order && !at_roundoff) {
        for (double o : orders) pass = pass && o >= th.order_min && o <= th.order_max;
      }
      ordered_json ej;
      ej["levels"] = ordered_json::array();
      for (const auto& r : study.levels) ej["levels"].push_back(report_json(r));
      ej["orders"] = orders;
      ej["order_checked"] = e.check_order && !at_roundoff;
      ej["pass"] = pass;
      eqs[std::string(to_string(e.eq))] = std::move(ej);

      std::string detail = "t=" + format_number(t) + " rel_l2=" + describe(finest.rel_l2);
      if (!orders.empty()) {
        detail += " orders=";
        for (std::size_t i = 0; i < orders.size(); ++i) {
          std::ostringstream o;
          o.precision(4);
          o << std::fixed << orders[i];
          detail += (i ? "," : "") + o.str();
        }
      }
      v.check(std::string(to_string(e.eq)) + "_residual", pass, detail);
    }
    tj["equations"] = std::move(eqs);
    per_time.push_back(std::move(tj));
  }
  v.json["residuals"] = std::move(per_time);
}

void sampled_checks(Verification& v, const ExperimentConfig& cfg, const EnvelopeSolution& sol,
                    const std::vector<EnvelopeState>& states, const Thresholds& th) {
  double source_max = 0.0, norm_err = 0.0;
  for (const auto& s : states) {
    const auto grid = SpatialGrid::around(s, cfg.window, cfg.grid_points);
    source_max = std::max(source_max, std::abs(source_integral(s, grid, cfg.params)));
    norm_err = std::max(norm_err, std::abs(sample_packet(s, grid, cfg.params).norm() - 1.0));
  }
  v.json["source_integral_max"] = source_max;
  v.json["norm_error_max"] = norm_err;
  v.check("source_integral", source_max < th.source_integral, "max=" + describe(source_max));
  v.check("normalization", norm_err < th.norm_error, "max|norm-1|=" + describe(norm_err));

  const auto times = times_of(states);
  double diff = 0.0, reach = 1.0;
  for (double seed : cfg.effective_seeds()) {
    const auto integrated = trajectory_integrated(sol, seed, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double closed = trajectory_closed(sol, seed, times[k]);
      diff = std::max(diff, std::abs(closed - integrated[k]));
      reach = std::max(reach, std::abs(closed));
    }
  }
  v.json["trajectory_max_diff"] = diff;
  v.check("trajectory_equivalence", diff <= th.trajectory_diff * reach,
          "max_diff=" + describe(diff) + " scale=" + describe(reach));
}

void fourier_check(Verification& v, const ExperimentConfig& cfg, const EnvelopeSolution& sol,
                   const Thresholds& th) {
  const auto& p = cfg.params;
  const auto s0 = sol.state_at(0.0);
  const auto s1 = sol.state_at(cfg.t_end);
  const double center = 0.5 * (s0.q + s1.q);
  const double half = 0.5 * std::abs(s1.q - s0.q) + kFourierMargin * std::max(s0.delta, s1.delta);
  const double k_max = std::abs(p.m * cfg.ic.v0 / p.hbar) + kFourierMargin * std::abs(p.m * cfg.ic.b0 / p.hbar) +
                       8.0 / cfg.ic.a0;
  const double h = std::min(std::min(s0.delta, s1.delta) / 10, std::numbers::pi / k_max);
  const auto wanted = static_cast<std::size_t>(std::ceil(2 * half / h)) + 1;
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(wanted, 64));
  if (n > kFourierMaxPoints) {
    throw Error(ErrorCode::InvalidGrid, "fourier_check", "oracle grid would need more than 2^20 points");
  }
  const auto grid = SpatialGrid::centered(center, half, n);
  const auto evolved = fourier_free_packet(sample_packet(s0, grid, p), cfg.t_end, p);
  const double diff = l2_difference(evolved, sample_packet(s1, grid, p));
  ordered_json f;
  f["t"] = cfg.t_end;
  f["points"] = n;
  f["h"] = grid.spacing();
  v.json["fourier"] = std::move(f);
  v.json["fourier_l2_diff"] = diff;
  v.check("fourier_oracle", diff < th.fourier_l2, "t=" + format_number(cfg.t_end) + " l2=" + describe(diff));
}

}  // namespace

bool RunResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

RunResult run(const ExperimentConfig& cfg, RunMode mode, const Thresholds& th) {
  const bool residuals = mode == RunMode::Verify || cfg.wants(Output::Residuals);
  const bool fourier =
      cfg.wants(Output::FourierCheck) || (mode == RunMode::Verify && cfg.params.is_free());
  if (fourier && !cfg.params.is_free()) {
    throw Error(ErrorCode::InvalidArgument, "outputs", "fourier_check needs free-particle parameters");
  }

  const auto sol = integrate(cfg.params, cfg.ic, cfg.t_end, cfg.controls());
  const auto states = sol.uniform_samples();
  const auto times = times_of(states);

  Writer w(cfg.output_dir);
  if (cfg.wants(Output::Envelope)) write_envelope(w, states);
  if (cfg.wants(Output::Packet)) write_packets(w, cfg, sol);
  if (cfg.wants(Output::Trajectories)) write_trajectories(w, cfg, sol, times);

  RunResult result;
  if (residuals || fourier) {
    Verification v;
    if (residuals) {
      residual_checks(v, cfg, sol, th);
      sampled_checks(v, cfg, sol, states, th);
    }
    if (fourier) fourier_check(v, cfg, sol, th);
    ordered_json checks = ordered_json::object();
    for (const auto& c : v.checks) {
      // Several residual times share one name; a single failure marks it failed.
      checks[c.name] = checks.contains(c.name) ? (checks[c.name].get<bool>() && c.pass) : c.pass;
    }
    v.json["checks"] = std::move(checks);
    v.json["pass"] = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& c) { return c.pass; });
    w.write("residuals.json", v.json.dump(2) + "\n");
    result.checks = std::move(v.checks);
  }
  result.files = std::move(w).files();
  return result;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return is_validation_error(err->code()) ? 2 : 3;
  return 3;
}

int run_document(const std::string& text, RunMode mode, const std::string& output_dir_override,
                 std::ostream& out, std::ostream& err) {
  try {
    auto cfg = parse_config(text);
    if (!output_dir_override.empty()) cfg.output_dir = output_dir_override;
    const auto result = run(cfg, mode);
    for (const auto& c : result.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
    }
    if (mode == RunMode::Verify && !result.all_passed()) {
      const auto failed = std::count_if(result.checks.begin(), result.checks.end(),
                                        [](const CheckResult& c) { return !c.pass; });
      err << "error: verification failed: " << failed << " of " << result.checks.size()
          << " checks missed their thresholds\n";
      return 3;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace cmwave
