#include <cmath>
#include <numbers>

#include "cmwave/dynamics.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cmwave;
using doctest::Approx;

namespace {

double free_width(double t) { return std::sqrt(1.0 + 0.25 * t * t); }

}  // namespace

TEST_CASE("rhs examples") {
  SUBCASE("steady width under measurement") {
    PhysicalParams p;
    const auto r = rhs({0, 0, 0, 1, 0, 0}, p);
    CHECK(r.qdot == 0.0);
    CHECK(r.qddot == 0.0);
    CHECK(r.deltadot == 0.0);
    CHECK(r.deltaddot == Approx(0.0).epsilon(1e-15));
    CHECK(r.s0dot == Approx(-0.25));
  }
  SUBCASE("oscillator ground-state width") {
    PhysicalParams p;
    p.measurement_off = true;
    p.omega = ConstantFrequency{1.0};
    const auto r = rhs({0, 1, 0, std::sqrt(0.5), 0, 0}, p);
    CHECK(r.qddot == Approx(-1.0));
    CHECK(r.deltaddot == Approx(0.0).scale(1.0).epsilon(1e-15));
  }
  SUBCASE("pure quantum pressure") {
    PhysicalParams p;
    p.measurement_off = true;
    CHECK(rhs({0, 0, 0, 1, 0, 0}, p).deltaddot == 0.25);
  }
  SUBCASE("coupling to the drive") {
    PhysicalParams p;
    p.m = 2.0;
    p.lambda = 3.0;
    p.drive = ConstantDrive{0.5};
    p.omega = ConstantFrequency{2.0};
    const auto r = rhs({0, 1, 0, 1, 0, 0}, p);
    CHECK(r.qddot == Approx(-4.0 - 0.75));
  }
  SUBCASE("width underflow") {
    PhysicalParams p;
    CHECK_THROWS_AS(rhs({0, 0, 0, 1e-9, 0, 0}, p), Error);
    try {
      rhs({0, 0, 0, 1e-9, 0, 0}, p);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WidthUnderflow);
      CHECK_FALSE(is_validation_error(e.code()));
    }
  }
}

TEST_CASE("integrate: analytic examples") {
  SUBCASE("oscillator centre") {
    const auto sc = testing::sho_scenario();
    const auto sol = integrate(sc.params, sc.ic, std::numbers::pi);
    CHECK(std::abs(sol.state_at(std::numbers::pi).q + 1.0) < 1e-8);
    CHECK(std::abs(sol.state_at(std::numbers::pi).delta - std::sqrt(0.5)) < 1e-9);
  }
  SUBCASE("free spreading") {
    const auto sc = testing::free_scenario();
    const auto sol = integrate(sc.params, sc.ic, 10.0);
    CHECK(std::abs(sol.state_at(2.0).delta - std::sqrt(2.0)) < 1e-8);
    for (const auto& s : sol.samples()) CHECK(std::abs(s.delta / free_width(s.t) - 1.0) < 1e-8);
  }
  SUBCASE("tiny horizon reproduces the initial conditions") {
    const auto sc = testing::driven_scenario();
    const auto sol = integrate(sc.params, sc.ic, 1e-12);
    const auto s = sol.state_at(0.0);
    CHECK(s.t == 0.0);
    CHECK(s.q == sc.ic.x0);
    CHECK(s.qdot == sc.ic.v0);
    CHECK(s.delta == sc.ic.a0);
    CHECK(s.deltadot == sc.ic.b0);
    CHECK(s.s0 == initial_phase(sc.params, sc.ic));
  }
  SUBCASE("initial phase carries m v0 x0 / hbar") {
    PhysicalParams p;
    p.m = 2.0;
    const auto sol = integrate(p, {1.5, 0.5, 1.0, 0.0}, 1.0);
    CHECK(sol.samples().front().s0 == 1.5);
  }
}

TEST_CASE("integrate: errors") {
  const auto sc = testing::steady_scenario();
  CHECK_THROWS_AS(integrate(sc.params, sc.ic, 0.0), Error);
  CHECK_THROWS_AS(integrate(sc.params, sc.ic, -1.0), Error);
  InitialConditions bad = sc.ic;
  bad.a0 = -1.0;
  CHECK_THROWS_AS(integrate(sc.params, bad, 1.0), Error);

  SUBCASE("collapse below delta_min") {
    const auto f = testing::free_scenario();
    SolverControls c;
    c.delta_min = 0.5;
    try {
      integrate(f.params, {0, 0, 1.0, -10.0}, 1.0, c);
      FAIL("expected WidthUnderflow");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WidthUnderflow);
    }
  }
  SUBCASE("step budget exhausted") {
    SolverControls c;
    c.max_steps = 3;
    c.uniform_samples = 2;
    CHECK_THROWS_AS(integrate(testing::driven_scenario().params, testing::driven_scenario().ic, 50.0, c), Error);
  }
}

TEST_CASE("state_at") {
  const auto sc = testing::free_scenario();
  SolverControls c;
  c.uniform_samples = 11;
  const auto sol = integrate(sc.params, sc.ic, 10.0, c);
  for (const auto& s : sol.samples()) {
    const auto r = sol.state_at(s.t);
    CHECK(r.q == s.q);
    CHECK(r.qdot == s.qdot);
    CHECK(r.delta == s.delta);
    CHECK(r.deltadot == s.deltadot);
    CHECK(r.s0 == s.s0);
  }
  const auto& nodes = sol.samples();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double mid = 0.5 * (nodes[i].t + nodes[i + 1].t);
    CHECK(std::abs(sol.state_at(mid).delta - free_width(mid)) < 1e-7);
  }
  const auto uniform = sol.uniform_samples();
  REQUIRE(uniform.size() == 11);
  CHECK(uniform.front().t == 0.0);
  CHECK(uniform.back().t == 10.0);
  CHECK(uniform[5].t == Approx(5.0).epsilon(1e-15));
  for (std::size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i].t > nodes[i - 1].t);

  CHECK_THROWS_AS(sol.state_at(-1e-3), Error);
  CHECK_THROWS_AS(sol.state_at(10.001), Error);
  try {
    sol.state_at(11.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfRange);
  }
}

TEST_CASE("steady_width") {
  PhysicalParams p;
  CHECK(steady_width(p).value() == Approx(1.0).epsilon(1e-15));
  p.measurement_off = true;
  p.omega = ConstantFrequency{1.0};
  CHECK(steady_width(p).value() == Approx(0.7071067812).epsilon(1e-10));
  p.omega = ConstantFrequency{0.0};
  CHECK_FALSE(steady_width(p).has_value());
  p.omega = CosineModulatedFrequency{1.0, 0.1, 1.0};
  CHECK_FALSE(steady_width(p).has_value());
  PhysicalParams q;
  q.m = 2.0;
  q.hbar = 3.0;
  q.tau = 0.5;
  q.omega = ConstantFrequency{1.5};
  const double d = steady_width(q).value();
  CHECK(rhs({0, 0, 0, d, 0, 0}, q).deltaddot == Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("property: every stored step satisfies the envelope ODE") {
  // Re-integrate each accepted step with a fine extended-precision RK4 and
  // compare with the stored end point.
  for (const auto& sc : testing::all_scenarios()) {
    CAPTURE(sc.name);
    const auto sol = integrate(sc.params, sc.ic, 5.0);
    const auto& nodes = sol.samples();
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const auto from = nodes[i].cast<long double>();
      const auto to = advance(sc.params, from, static_cast<long double>(nodes[i + 1].t), 64);
      worst = std::max({worst, double(std::abs(to.q - nodes[i + 1].q)),
                        double(std::abs(to.qdot - nodes[i + 1].qdot)),
                        double(std::abs(to.delta - nodes[i + 1].delta)),
                        double(std::abs(to.deltadot - nodes[i + 1].deltadot))});
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("property: perturbed widths decay to the steady width") {
  testing::Gen g(99);
  for (int trial = 0; trial < 6; ++trial) {
    PhysicalParams p;
    p.tau = g.uniform(0.5, 2.0);
    p.omega = ConstantFrequency{g.uniform(0.0, 1.5)};
    const double ss = steady_width(p).value();
    const double t_end = 30.0 * p.tau;
    SolverControls c;
    c.uniform_samples = 601;
    const auto sol = integrate(p, {0, 0, 1.1 * ss, 0}, t_end, c);
    const auto u = sol.uniform_samples();
    // The damped width equation has the Lyapunov function
    // E = ½δ̇² + ½κδ² + c/(2δ²) with dE/dt = −δ̇²/τ, so E never increases.
    const double w = std::get<ConstantFrequency>(p.omega).omega0;
    const double kappa = w * w + 0.25 / (p.tau * p.tau);
    const double c2 = p.hbar * p.hbar / (4 * p.m * p.m);
    auto energy = [&](const EnvelopeState& s) {
      return 0.5 * s.deltadot * s.deltadot + 0.5 * kappa * s.delta * s.delta + 0.5 * c2 / (s.delta * s.delta);
    };
    for (std::size_t k = 1; k < u.size(); ++k) CHECK(energy(u[k]) <= energy(u[k - 1]) + 1e-13);
    for (const auto& s : u) {
      if (s.t > 25.0 * p.tau) CHECK(std::abs(s.delta / ss - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("property: fixed points stay put") {
  testing::Gen g(5);
  for (int trial = 0; trial < 8; ++trial) {
    PhysicalParams p;
    p.m = g.uniform(0.5, 2.0);
    p.hbar = g.uniform(0.5, 2.0);
    p.measurement_off = trial % 2 == 0;
    p.tau = g.uniform(0.5, 2.0);
    p.omega = ConstantFrequency{g.uniform(0.2, 2.0)};
    const double ss = steady_width(p).value();
    const auto sol = integrate(p, {0, 0, ss, 0}, 20.0);
    for (const auto& s : sol.samples()) {
      CHECK(s.q == 0.0);
      CHECK(std::abs(s.delta - ss) < 1e-9 * ss);
    }
  }
}

TEST_CASE("property: fixed-step RK4 converges at fourth order") {
  for (const auto& sc : testing::all_scenarios()) {
    CAPTURE(sc.name);
    SolverControls tight;
    tight.rtol = 1e-13;
    tight.atol = 1e-15;
    const double t_end = 4.0;
    const auto ref = integrate(sc.params, sc.ic, t_end, tight).state_at(t_end);
    auto err = [&](std::size_t n) {
      const auto s = integrate_fixed(sc.params, sc.ic, t_end, n).samples().back();
      return std::max({std::abs(s.q - ref.q), std::abs(s.qdot - ref.qdot), std::abs(s.delta - ref.delta),
                       std::abs(s.deltadot - ref.deltadot), std::abs(s.s0 - ref.s0)});
    };
    const double e1 = err(40), e2 = err(80);
    CHECK(std::log2(e1 / e2) >= 3.8);
  }
}

TEST_CASE("property: action rate bounded by the kinetic term when lambda = 0") {
  testing::Gen g(314);
  for (int trial = 0; trial < 25; ++trial) {
    auto p = g.params();
    p.lambda = 0.0;
    const auto ic = g.ic();
    const auto sol = integrate(p, ic, 5.0);
    for (std::size_t i = 0; i < sol.samples().size(); ++i) {
      const auto& s = sol.samples()[i];
      const auto& r = sol.rates()[i];
      CHECK(r.s0dot <= 0.5 * p.m * s.qdot * s.qdot / p.hbar);
    }
  }
}

TEST_CASE("property: action agrees with trapezoid quadrature of its rate") {
  for (const auto& sc : testing::all_scenarios()) {
    CAPTURE(sc.name);
    SolverControls c;
    c.uniform_samples = 4001;
    const auto sol = integrate(sc.params, sc.ic, 4.0, c);
    const auto u = sol.uniform_samples();
    double acc = u.front().s0;
    for (std::size_t k = 1; k < u.size(); ++k) {
      const double f0 = envelope_rate(u[k - 1], sc.params).s0dot;
      const double f1 = envelope_rate(u[k], sc.params).s0dot;
      acc += 0.5 * (u[k].t - u[k - 1].t) * (f0 + f1);
    }
    CHECK(std::abs(acc - u.back().s0) < 1e-6);
  }
}
