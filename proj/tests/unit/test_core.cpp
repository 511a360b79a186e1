#include <bit>
#include <limits>

#include "cmwave/core.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cmwave;
using doctest::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected cmwave::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("frequency schedules") {
  CHECK(eval_omega(ConstantFrequency{2.0}, 13.7) == 2.0);
  CHECK(eval_omega(CosineModulatedFrequency{1.0, 0.0, 5.0}, 0.3) == 1.0);
  CHECK(eval_omega(Table({{0, 1}, {2, 3}}), 1.0) == Approx(2.0).epsilon(1e-15));

  SUBCASE("cosine modulation clamps at zero") {
    const CosineModulatedFrequency f{2.0, 3.0, 1.0};
    CHECK(eval_omega(f, std::numbers::pi) == 0.0);
    CHECK(eval_omega(f, 0.0) == Approx(4.0));
  }
  SUBCASE("table clamps outside its knots") {
    const Table t({{1, 5}, {2, 7}});
    CHECK(t(0.0) == 5.0);
    CHECK(t(100.0) == 7.0);
    CHECK(Table({{0.5, 3}})(9.0) == 3.0);
  }
}

TEST_CASE("drive schedules") {
  CHECK(eval_drive(ZeroDrive{}, 5.0) == 0.0);
  CHECK(eval_drive(SinusoidDrive{2.0, std::numbers::pi, 0.0}, 0.0) == 0.0);
  CHECK(eval_drive(ConstantDrive{0.5}, 9.0) == 0.5);
  CHECK(eval_drive(SinusoidDrive{2.0, 1.0, std::numbers::pi / 2}, 0.0) == Approx(2.0));
  CHECK(eval_drive(Table({{0, -1}, {4, 1}}), 3.0) == Approx(0.5));
}

TEST_CASE("table construction errors") {
  CHECK(code_of([] { Table(std::vector<Knot>{}); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { Table({{0, 1}, {0, 2}}); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { Table({{1, 1}, {0, 2}}); }) == ErrorCode::InvalidSchedule);
  CHECK(code_of([] { Table({{0, std::numeric_limits<double>::quiet_NaN()}}); }) ==
        ErrorCode::InvalidSchedule);
}

TEST_CASE("validate") {
  PhysicalParams p;
  InitialConditions ic;
  const auto cfg = validate(p, ic);
  CHECK(cfg.params == p);
  CHECK(cfg.ic == ic);

  auto fails = [&](auto mutate, ErrorCode code, const std::string& field) {
    PhysicalParams pp;
    InitialConditions ii;
    mutate(pp, ii);
    try {
      validate(pp, ii);
      FAIL("validation should have failed");
    } catch (const Error& e) {
      CHECK(e.code() == code);
      CHECK(e.field() == field);
      CHECK(is_validation_error(e.code()));
    }
  };
  fails([](auto&, auto& i) { i.a0 = 0.0; }, ErrorCode::NonPositiveInitialWidth, "a0");
  fails([](auto& q, auto&) { q.tau = -1.0; }, ErrorCode::NonPositiveTau, "tau");
  fails([](auto& q, auto&) { q.m = 0.0; }, ErrorCode::NonPositiveMass, "m");
  fails([](auto& q, auto&) { q.hbar = -1.0; }, ErrorCode::NonPositiveHbar, "hbar");
  fails([](auto&, auto& i) { i.v0 = std::numeric_limits<double>::infinity(); },
        ErrorCode::NonFiniteParameter, "v0");
  fails([](auto& q, auto&) { q.lambda = std::numeric_limits<double>::quiet_NaN(); },
        ErrorCode::NonFiniteParameter, "lambda");
  fails([](auto& q, auto&) { q.omega = ConstantFrequency{-1.0}; }, ErrorCode::InvalidSchedule, "omega");
  fails([](auto& q, auto&) { q.omega = Table({{0, 1}, {1, -1}}); }, ErrorCode::InvalidSchedule, "omega");

  SUBCASE("tau is ignored when measurement is off") {
    PhysicalParams q;
    q.measurement_off = true;
    q.tau = -1.0;
    CHECK_NOTHROW(validate(q, ic));
    CHECK(q.inv_tau() == 0.0);
  }
}

TEST_CASE("error codes classify into validation and numerical") {
  CHECK(is_validation_error(ErrorCode::ParseError));
  CHECK(is_validation_error(ErrorCode::GridTooCoarse));
  CHECK_FALSE(is_validation_error(ErrorCode::WidthUnderflow));
  CHECK_FALSE(is_validation_error(ErrorCode::StepSizeUnderflow));
  CHECK_FALSE(is_validation_error(ErrorCode::NonFiniteState));
  CHECK_FALSE(is_validation_error(ErrorCode::Overflow));
  const Error e(ErrorCode::NonPositiveTau, "tau", "bad");
  CHECK(std::string(e.what()).find("NonPositiveTau") != std::string::npos);
  CHECK(std::string(e.what()).find("tau") != std::string::npos);
}

TEST_CASE("initial phase is m v0 x0 / hbar") {
  PhysicalParams p;
  p.m = 2.0;
  p.hbar = 4.0;
  CHECK(initial_phase(p, {3.0, 5.0, 1.0, 0.0}) == 7.5);
  testing::Gen g(11);
  for (int i = 0; i < 200; ++i) {
    const auto q = g.params();
    const auto ic = g.ic();
    CHECK(initial_phase(q, ic) == q.m * ic.v0 * ic.x0 / q.hbar);
  }
}

TEST_CASE("property: table is exact at knots and bounded between them") {
  testing::Gen g(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const Table t = g.table(-5.0, 5.0);
    const auto& k = t.knots();
    double lo = k.front().value, hi = lo;
    for (const auto& knot : k) {
      CHECK(t(knot.t) == knot.value);
      lo = std::min(lo, knot.value);
      hi = std::max(hi, knot.value);
    }
    for (int s = 0; s < 20; ++s) {
      const double x = g.uniform(0.0, k.back().t + 2.0);
      const double v = t(x);
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
    for (std::size_t i = 0; i + 1 < k.size(); ++i) {
      const double x = g.uniform(k[i].t, k[i + 1].t);
      const double v = t(x);
      CHECK(v >= std::min(k[i].value, k[i + 1].value) - 1e-15);
      CHECK(v <= std::max(k[i].value, k[i + 1].value) + 1e-15);
    }
  }
}

TEST_CASE("property: schedules are pure and finite") {
  testing::Gen g(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = g.frequency();
    const auto d = g.drive();
    const double t = g.uniform(0.0, 50.0);
    const double w1 = eval_omega(f, t), w2 = eval_omega(f, t);
    const double x1 = eval_drive(d, t), x2 = eval_drive(d, t);
    CHECK(std::bit_cast<std::uint64_t>(w1) == std::bit_cast<std::uint64_t>(w2));
    CHECK(std::bit_cast<std::uint64_t>(x1) == std::bit_cast<std::uint64_t>(x2));
    CHECK(std::isfinite(w1));
    CHECK(w1 >= 0.0);
    CHECK(std::isfinite(x1));
  }
}

TEST_CASE("free-particle detection") {
  PhysicalParams p;
  CHECK_FALSE(p.is_free());
  p.measurement_off = true;
  CHECK(p.is_free());
  p.lambda = 0.1;
  CHECK_FALSE(p.is_free());
  p.lambda = 0.0;
  p.omega = ConstantFrequency{0.5};
  CHECK_FALSE(p.is_free());
}
