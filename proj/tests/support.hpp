#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cmwave/core.hpp"
#include "cmwave/dynamics.hpp"

namespace cmwave::testing {

struct Scenario {
  std::string name;
  PhysicalParams params;
  InitialConditions ic;
};

/// Measurement on, free, relaxing towards the steady width 1.
inline Scenario steady_scenario(double a0 = 1.1) {
  PhysicalParams p;
  p.tau = 1.0;
  return {"steady", p, {0.0, 0.0, a0, 0.0}};
}

inline Scenario free_scenario() {
  PhysicalParams p;
  p.measurement_off = true;
  return {"free", p, {0.0, 0.0, 1.0, 0.0}};
}

inline Scenario sho_scenario() {
  PhysicalParams p;
  p.measurement_off = true;
  p.omega = ConstantFrequency{1.0};
  return {"sho", p, {1.0, 0.0, std::sqrt(0.5), 0.0}};
}

inline Scenario driven_scenario() {
  PhysicalParams p;
  p.tau = 2.0;
  p.omega = ConstantFrequency{1.0};
  p.lambda = 0.5;
  p.drive = SinusoidDrive{1.0, 1.0, 0.0};
  return {"driven", p, {0.0, 0.5, 0.8, 0.1}};
}

inline std::vector<Scenario> all_scenarios() {
  return {steady_scenario(), free_scenario(), sho_scenario(), driven_scenario()};
}

/// Seeded generator for property tests; every failure is reproducible from the seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  FrequencySchedule frequency() {
    switch (integer(0, 2)) {
      case 0: return ConstantFrequency{uniform(0.0, 2.0)};
      case 1: return CosineModulatedFrequency{uniform(0.0, 2.0), uniform(-1.5, 1.5), uniform(0.0, 4.0)};
      default: return table(0.0, 2.0);
    }
  }

  DriveSchedule drive() {
    switch (integer(0, 3)) {
      case 0: return ZeroDrive{};
      case 1: return ConstantDrive{uniform(-2.0, 2.0)};
      case 2: return SinusoidDrive{uniform(-2.0, 2.0), uniform(0.0, 3.0), uniform(-3.0, 3.0)};
      default: return table(-2.0, 2.0);
    }
  }

  Table table(double lo, double hi) {
    std::vector<Knot> knots;
    double t = uniform(0.0, 1.0);
    const int n = integer(1, 6);
    for (int i = 0; i < n; ++i) {
      knots.push_back({t, uniform(lo, hi)});
      t += uniform(0.1, 2.0);
    }
    return Table(std::move(knots));
  }

  PhysicalParams params() {
    PhysicalParams p;
    p.m = uniform(0.5, 2.0);
    p.hbar = uniform(0.5, 2.0);
    p.measurement_off = coin();
    p.tau = uniform(0.5, 3.0);
    p.lambda = uniform(-1.0, 1.0);
    p.omega = frequency();
    p.drive = drive();
    return p;
  }

  InitialConditions ic() {
    return {uniform(-2.0, 2.0), uniform(-1.0, 1.0), uniform(0.5, 2.0), uniform(-0.3, 0.3)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace cmwave::testing
