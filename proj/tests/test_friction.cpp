#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "helpers.hpp"
#include "stickslip/errors.hpp"
#include "stickslip/friction.hpp"
#include "stickslip/trace_io.hpp"

using namespace stickslip;

namespace {

// Critically damped step response toward x_eq from rest, written from the
// textbook solution rather than from the integrator.
struct CriticalOracle {
  double x_eq, omega, alpha, gamma;

  CriticalOracle(double x0, double m, double c, double k, double friction) {
    x_eq = friction / k;
    omega = c / (2.0 * m);
    alpha = x0 - x_eq;
    gamma = omega * alpha;
  }
  double operator()(double t) const { return x_eq + (alpha + gamma * t) * std::exp(-omega * t); }
};

SimState slip_from_rest(double x0, double q = 0.0) { return SimState{Phase::Slip, q + x0, 0.0, q, 0.0, true}; }

double energy(const SimState& s, const FrictionParams& p) {
  const double x = s.displacement();
  return 0.5 * p.mass() * s.v * s.v + 0.5 * p.k * x * x;
}

}  // namespace

TEST(FrictionParams, DerivedMassFromCriticalDamping) {
  FrictionParams p;
  EXPECT_DOUBLE_EQ(p.mass(), 0.1);
  p.c = 2.0;
  p.k = 1.0;
  EXPECT_DOUBLE_EQ(derived_mass(p), 1.0);
  p.c = 0.4;
  p.k = 0.1;
  EXPECT_DOUBLE_EQ(derived_mass(p), 0.4);
}

TEST(FrictionParams, BreakawayElongation) {
  FrictionParams p;
  EXPECT_NEAR(p.breakaway_elongation(), 6.86, 1e-12);
  EXPECT_NEAR(p.breakaway_force(), 0.686, 1e-12);
  EXPECT_NEAR(p.kinetic_force(), 0.098, 1e-12);
}

TEST(FrictionParams, ValidationRejectsBadConstants) {
  FrictionParams p;
  p.sim_rate = 0.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.k = -1.0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.mu_s = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.c = 0.0;
  EXPECT_THROW(derived_mass(p), InvalidParameter);
}

TEST(Step, StickHoldsUntilBreakaway) {
  FrictionParams p;
  const double brk = p.breakaway_elongation();
  SimState s = SimState::at_rest(0.0);
  SimState held = step(s, p, {0.01, brk, true});
  EXPECT_EQ(held.phase, Phase::Stick);
  EXPECT_EQ(held.p, 0.0);
  EXPECT_EQ(held.v, 0.0);
  SimState broke = step(s, p, {0.01, brk + 1e-9, true});
  EXPECT_EQ(broke.phase, Phase::Slip);
  EXPECT_EQ(broke.p, 0.0);
}

TEST(Step, LeftwardBreakawayUsesMagnitude) {
  FrictionParams p;
  SimState s = SimState::at_rest(0.0);
  EXPECT_EQ(step(s, p, {0.01, -p.breakaway_elongation() - 1e-9, true}).phase, Phase::Slip);
}

TEST(Step, RejectsNonFiniteInput) {
  FrictionParams p;
  EXPECT_THROW(step(SimState::at_rest(0.0), p, {0.01, std::numeric_limits<double>::infinity(), true}),
               InputError);
  p.sim_rate = -1.0;
  EXPECT_THROW(step(SimState::at_rest(0.0), p, {0.01, 0.0, true}), InvalidParameter);
}

TEST(Step, MatchesClosedFormCriticalDamping) {
  FrictionParams p;
  for (double x0 : {5.0, 20.0, -12.5, 100.0}) {
    const CriticalOracle oracle(x0, p.mass(), p.c, p.k, x0 > 0 ? p.kinetic_force() : -p.kinetic_force());
    SimState s = slip_from_rest(x0);
    double worst = 0.0;
    for (int n = 1; n <= 100; ++n) {
      s = step(s, p, {n / 100.0, 0.0, true});
      ASSERT_EQ(s.phase, Phase::Slip);
      worst = std::max(worst, std::abs(s.displacement() - oracle(n / 100.0)));
    }
    EXPECT_LT(worst, 1e-6 * std::abs(x0)) << "x0 = " << x0;
  }
}

TEST(Step, NoOvershootWithStationaryInput) {
  FrictionParams p;
  p.mu_k = 0.0;  // equilibrium at x = 0: the strictest case for a sign change
  SimState s = slip_from_rest(30.0);
  double prev = std::abs(s.displacement());
  for (int n = 1; n <= 1000; ++n) {
    s = step(s, p, {n / 100.0, 0.0, true});
    EXPECT_GE(s.displacement(), 0.0);
    EXPECT_LE(std::abs(s.displacement()), prev);
    prev = std::abs(s.displacement());
  }
}

TEST(Step, EnergyNonIncreasingInSlip) {
  FrictionParams p;
  SimState s = slip_from_rest(40.0);
  double e = energy(s, p);
  for (int n = 1; n <= 500 && s.phase == Phase::Slip; ++n) {
    s = step(s, p, {n / 100.0, 0.0, true});
    const double e1 = energy(s, p);
    EXPECT_LE(e1, e + 1e-9) << "tick " << n;
    e = e1;
  }
}

TEST(Step, RestInSlipHeldByKineticFriction) {
  FrictionParams p;
  // k|x| below F_k: the spring cannot overcome kinetic friction.
  SimState s = slip_from_rest(0.5);
  const SimState next = step(s, p, {0.01, 0.0, true});
  EXPECT_EQ(next.p, s.p);
  EXPECT_EQ(next.v, 0.0);
}

TEST(Step, Deterministic) {
  FrictionParams p;
  const auto trace = testing_helpers::random_walk_trace(7);
  const auto a = simulate_trace(trace, p);
  const auto b = simulate_trace(trace, p);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_EQ(std::memcmp(a.rows.data(), b.rows.data(), a.rows.size() * sizeof(TrajectoryRow)), 0);
}

TEST(SimulateTrace, BreakawayAtClosedFormElongation) {
  for (double mu_s : {0.2, 0.4, 0.6, 0.7, 0.8, 1.0}) {
    FrictionParams p;
    p.mu_s = mu_s;
    const double v = 100.0;
    const auto trace = simulate_trace(synth_constant_velocity(v, 2.0, p.sim_rate), p);
    const auto e = first_breakaway_elongation(trace);
    ASSERT_TRUE(e.has_value());
    EXPECT_GT(*e, p.breakaway_elongation());
    EXPECT_LE(*e, p.breakaway_elongation() + v * p.dt() + 1e-9);
  }
}

TEST(SimulateTrace, PhaseSoundnessAndBreakawayBound) {
  FrictionParams p;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inputs = testing_helpers::random_walk_trace(seed);
    const auto trace = simulate_trace(inputs, p);
    double max_step = 0.0;
    for (std::size_t i = 1; i < inputs.size(); ++i) max_step = std::max(max_step, std::abs(inputs[i].q - inputs[i - 1].q));
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
      const auto& r = trace.rows[i];
      if (r.phase != Phase::Stick) continue;
      EXPECT_EQ(r.v, 0.0);
      EXPECT_LE(std::abs(r.p - r.q), p.breakaway_elongation() + max_step + 1e-9);
      if (i > 0 && trace.rows[i - 1].phase == Phase::Stick) EXPECT_EQ(r.p, trace.rows[i - 1].p);
    }
  }
}

TEST(SimulateTrace, ZeroStaticFrictionNeverSticks) {
  FrictionParams p;
  p.mu_s = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    EXPECT_EQ(sustained_stick_rows(simulate_trace(testing_helpers::random_walk_trace(seed), p)), 0u);
  }
  EXPECT_EQ(sustained_stick_rows(simulate_trace(synth_constant_velocity(100.0, 5.0, 100.0), p)), 0u);
}

TEST(SimulateTrace, StationaryInputStaysInStick) {
  FrictionParams p;
  std::vector<InputSample> still;
  for (int i = 0; i < 200; ++i) still.push_back({i / 100.0, 42.0, true});
  const auto trace = simulate_trace(still, p);
  ASSERT_EQ(trace.rows.size(), 200u);
  for (const auto& r : trace.rows) {
    EXPECT_EQ(r.phase, Phase::Stick);
    EXPECT_EQ(r.p, 42.0);
    EXPECT_EQ(r.spring_force, 0.0);
  }
}

TEST(SimulateTrace, ResamplesOntoTickGrid) {
  FrictionParams p;
  // 30 Hz input: ticks fall between samples.
  std::vector<InputSample> in;
  for (int i = 0; i <= 30; ++i) in.push_back({i / 30.0, 3.0 * i, true});
  const auto trace = simulate_trace(in, p);
  ASSERT_EQ(trace.rows.size(), 101u);
  for (std::size_t n = 0; n < trace.rows.size(); ++n) {
    EXPECT_NEAR(trace.rows[n].t, n / 100.0, 1e-12);
    EXPECT_NEAR(trace.rows[n].q, 90.0 * n / 100.0, 1e-9);
  }
}

TEST(SimulateTrace, RejectsBadInput) {
  FrictionParams p;
  std::vector<InputSample> empty;
  EXPECT_THROW(simulate_trace(empty, p), ValidationError);
  std::vector<InputSample> backwards{{0.0, 0.0, true}, {0.02, 1.0, true}, {0.01, 2.0, true}};
  EXPECT_THROW(simulate_trace(backwards, p), ValidationError);
}

TEST(Resampler, InterpolatesAndTakesContactFromLeft) {
  std::vector<InputSample> in{{0.0, 0.0, true}, {1.0, 10.0, false}, {2.0, 30.0, true}};
  InputResampler r(in);
  EXPECT_DOUBLE_EQ(r.at(0.5).q, 5.0);
  EXPECT_TRUE(r.at(0.5).contact);
  EXPECT_DOUBLE_EQ(r.at(1.5).q, 20.0);
  EXPECT_FALSE(r.at(1.5).contact);
  EXPECT_DOUBLE_EQ(r.at(5.0).q, 30.0);
  EXPECT_EQ(r.tick_count(100.0), 200u);
}

TEST(Phase, ParseRoundTrip) {
  EXPECT_EQ(parse_phase(to_string(Phase::Stick)), Phase::Stick);
  EXPECT_EQ(parse_phase(to_string(Phase::Slip)), Phase::Slip);
  EXPECT_THROW(parse_phase("slide"), InvalidParameter);
}
