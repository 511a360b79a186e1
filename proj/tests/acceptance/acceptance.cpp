// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).
//
// usage: cmwave_acceptance [path-to-cmwave-cli]

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cmwave/config.hpp"
#include "cmwave/runner.hpp"
#include "cmwave/trajectories.hpp"
#include "cmwave/verify.hpp"
#include "support.hpp"

using namespace cmwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

std::vector<testing::Scenario> scenarios() {
  auto sho = testing::sho_scenario();
  return {testing::steady_scenario(1.1), testing::free_scenario(), sho, testing::driven_scenario()};
}

Outcome steady_width_limit() {
  const auto sc = testing::steady_scenario(1.1);
  const auto sol = integrate(sc.params, sc.ic, 50.0);
  const double err = std::abs(sol.state_at(50.0).delta - 1.0);
  return {err < 1e-6, "|delta(50) - 1| = " + sci(err) + " (< 1e-6)"};
}

Outcome free_spreading() {
  const auto sc = testing::free_scenario();
  SolverControls c;
  c.uniform_samples = 1001;
  const auto sol = integrate(sc.params, sc.ic, 10.0, c);
  double worst = 0.0;
  for (const auto& s : sol.samples()) {
    worst = std::max(worst, std::abs(s.delta / std::sqrt(1.0 + 0.25 * s.t * s.t) - 1.0));
  }
  return {worst < 1e-8, "max rel |delta - sqrt(1+(t/2)^2)| on [0,10] = " + sci(worst) + " (< 1e-8)"};
}

Outcome sho_center() {
  const auto sc = testing::sho_scenario();
  const auto sol = integrate(sc.params, sc.ic, std::numbers::pi);
  const double err = std::abs(sol.state_at(std::numbers::pi).q + 1.0);
  return {err < 1e-8, "|q(pi) + 1| = " + sci(err) + " (< 1e-8)"};
}

/// Reference-resolution convergence study; reports the worst rel_l2 and the
/// order range over scenarios and times.
Outcome residual_study(const std::vector<std::pair<std::string, ResidualFunction>>& equations) {
  Outcome o;
  double worst_rel = 0.0, min_order = 1e9, max_order = -1e9;
  for (const auto& sc : scenarios()) {
    const auto sol = integrate(sc.params, sc.ic, 5.0);
    for (double t : {1.0, 2.5, 4.0}) {
      const auto s = sol.state_at(t);
      const auto grid = reference_grid(s);
      const double h_t = default_time_step(grid.spacing(), s.delta, sc.params);
      for (const auto& [name, fn] : equations) {
        const auto study = convergence_study(fn, sol, grid, t, h_t, 3);
        const auto orders = study.orders();
        worst_rel = std::max(worst_rel, study.levels.front().rel_l2);
        for (double ord : orders) {
          min_order = std::min(min_order, ord);
          max_order = std::max(max_order, ord);
        }
        const bool ok = study.levels.front().rel_l2 < 1e-4 &&
                        std::all_of(orders.begin(), orders.end(),
                                    [](double v) { return v >= 1.8 && v <= 2.2; });
        if (!ok) {
          o.pass = false;
          o.detail += " [" + sc.name + " " + name + " t=" + format_number(t) + "]";
        }
      }
    }
  }
  std::ostringstream d;
  d.precision(4);
  d << "max reference rel_l2 = " << sci(worst_rel) << " (< 1e-4), orders in [" << std::fixed << min_order << ", "
    << max_order << "] (within [1.8, 2.2])";
  o.detail = d.str() + o.detail;
  return o;
}

Outcome continuity_and_euler() {
  auto o = residual_study({{"continuity", continuity_residual}, {"euler", euler_residual}});
  double worst = 0.0;
  for (const auto& sc : scenarios()) {
    SolverControls c;
    c.uniform_samples = 51;
    const auto sol = integrate(sc.params, sc.ic, 5.0, c);
    for (const auto& s : sol.uniform_samples()) {
      worst = std::max(worst, std::abs(source_integral(s, SpatialGrid::around(s), sc.params)));
    }
  }
  o.pass = o.pass && worst < 1e-8;
  o.detail += "; max |source integral| = " + sci(worst) + " (< 1e-8)";
  return o;
}

Outcome trajectory_equivalence() {
  std::vector<double> times(51);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = 0.1 * double(k);
  times.back() = 5.0;
  double worst = 0.0;
  for (const auto& sc : scenarios()) {
    const auto sol = integrate(sc.params, sc.ic, 5.0);
    std::vector<double> seeds;
    for (int j = -2; j <= 2; ++j) seeds.push_back(sc.ic.x0 + j * sc.ic.a0);
    const auto a = bundle(sol, seeds, times, TrajectoryMethod::ClosedForm);
    const auto b = bundle(sol, seeds, times, TrajectoryMethod::Integrated);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      for (std::size_t k = 0; k < times.size(); ++k) worst = std::max(worst, std::abs(a.paths[i][k] - b.paths[i][k]));
    }
  }
  const auto st = testing::steady_scenario(1.0);
  const auto sol = integrate(st.params, st.ic, 5.0);
  const std::vector<double> seeds{-2, -1, 0, 1, 2};
  double stretch = 0.0;
  for (auto method : {TrajectoryMethod::ClosedForm, TrajectoryMethod::Integrated}) {
    const auto hw = bundle(sol, seeds, times, method).half_width();
    for (std::size_t k = 0; k < times.size(); ++k) {
      stretch = std::max(stretch, std::abs(hw[k] / (2.0 * std::exp(times[k] / (2 * st.params.tau))) - 1.0));
    }
  }
  return {worst < 1e-6 && stretch < 1e-6, "closed vs integrated max diff = " + sci(worst) +
                                              " (< 1e-6); steady half-width rel err vs e^{t/2tau} = " +
                                              sci(stretch) + " (< 1e-6)"};
}

Outcome fourier_oracle() {
  const auto sc = testing::free_scenario();
  const auto sol = integrate(sc.params, sc.ic, 2.0);
  const auto grid = SpatialGrid::centered(0.0, 40.0, 2048);
  const auto evolved = fourier_free_packet(sample_packet(sol.state_at(0.0), grid, sc.params), 2.0, sc.params);
  const double diff = l2_difference(evolved, sample_packet(sol.state_at(2.0), grid, sc.params));
  return {diff < 1e-6, "L2 difference at t=2 = " + sci(diff) + " (< 1e-6)"};
}

Outcome normalization() {
  double worst = 0.0;
  for (const auto& sc : scenarios()) {
    SolverControls c;
    c.uniform_samples = 11;
    const auto sol = integrate(sc.params, sc.ic, 10.0, c);
    for (const auto& s : sol.uniform_samples()) {
      worst = std::max(worst, std::abs(sample_packet(s, SpatialGrid::around(s), sc.params).norm() - 1.0));
    }
  }
  return {worst < 1e-8, "max |norm - 1| over 11 times x 4 scenarios = " + sci(worst) + " (< 1e-8)"};
}

Outcome quantum_potential() {
  Outcome o;
  double lo = 1e9, hi = -1e9;
  std::vector<EnvelopeState> states{{0, 0, 0, 1, 0, 0}};
  for (const auto& sc : scenarios()) states.push_back(integrate(sc.params, sc.ic, 2.0).state_at(2.0));
  for (const auto& s : states) {
    const PhysicalParams p;
    auto err = [&](double h) {
      const auto n = static_cast<std::size_t>(std::ceil(12.0 * s.delta / h)) + 1;
      const auto g = SpatialGrid::centered(s.q, 0.5 * h * double(n - 1), n);
      const auto fd = quantum_potential_fd(s, g, p);
      double worst = 0.0;
      for (std::size_t i = 2; i + 2 < g.size(); ++i) {
        worst = std::max(worst, std::abs(fd[i] - quantum_potential_closed(s, g.x(i), p)));
      }
      return worst;
    };
    const double scale = std::min(1.0, s.delta);
    const double e1 = err(0.01 * scale), e2 = err(0.005 * scale), e3 = err(0.0025 * scale);
    for (double f : {e1 / e2, e2 / e3}) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
      o.pass = o.pass && f >= 3.5 && f <= 4.5;
    }
  }
  std::ostringstream d;
  d.precision(3);
  d << std::fixed << "error reduction factors in [" << lo << ", " << hi << "] (within [3.5, 4.5])";
  o.detail = d.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<fs::path> listing(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome cli_determinism(const std::string& cli) {
  const std::string text =
      "tau=2 omega=constant:1 lambda=0.5 drive=sin:1:1:0 v0=0.5 a0=0.8 b0=0.1 t_end=4 samples=81 "
      "outputs=envelope,packet,trajectories,residuals residual_times=1,3\n";
  const fs::path root = fs::temp_directory_path() / "cmwave_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg_path = root / "determinism.cfg";
  std::ofstream(cfg_path) << text;

  std::vector<fs::path> dirs{root / "run1", root / "run2"};
  std::string how;
  for (const auto& dir : dirs) {
    if (!cli.empty()) {
      const std::string cmd = "CMWAVE_OUTPUT_DIR='" + dir.string() + "' '" + cli + "' simulate '" +
                              cfg_path.string() + "' > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
      how = "via CLI";
    } else {
      auto cfg = parse_config(text);
      cfg.output_dir = dir.string();
      run(cfg, RunMode::Simulate);
      how = "in-process";
    }
  }
  const auto a = listing(dirs[0]), b = listing(dirs[1]);
  if (a != b) return {false, "file sets differ"};
  std::size_t bytes = 0;
  for (const auto& rel : a) {
    const auto x = slurp(dirs[0] / rel), y = slurp(dirs[1] / rel);
    if (x != y) return {false, rel.string() + " differs between runs"};
    bytes += x.size();
  }
  return {true, std::to_string(a.size()) + " files (" + std::to_string(bytes) + " bytes) byte-identical " + how};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"measurement steady width", steady_width_limit},
      {"free-spreading limit", free_spreading},
      {"SHO center", sho_center},
      {"Schrodinger PDE residual", [] { return residual_study({{"schrodinger", schrodinger_residual}}); }},
      {"continuity and Euler residuals", continuity_and_euler},
      {"trajectory equivalence", trajectory_equivalence},
      {"Fourier oracle", fourier_oracle},
      {"normalization", normalization},
      {"quantum-potential cross-check", quantum_potential},
      {"CLI determinism", [&] { return cli_determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1 < 10 ? " " : "") << i + 1 << ". "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed;
}
