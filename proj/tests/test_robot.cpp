#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "stickslip/analysis.hpp"
#include "stickslip/errors.hpp"
#include "stickslip/report.hpp"
#include "stickslip/robot.hpp"

using namespace stickslip;

TEST(Behavior, ParseAndDescribe) {
  const auto m = parse_behavior("ideal-logistic:A=6,B=0.3");
  ASSERT_TRUE(std::holds_alternative<IdealLogisticResponder>(m));
  EXPECT_EQ(std::get<IdealLogisticResponder>(m).A, 6.0);
  EXPECT_EQ(std::get<IdealLogisticResponder>(m).B, 0.3);
  EXPECT_TRUE(std::holds_alternative<ConstantResponder>(parse_behavior("constant")));
  EXPECT_EQ(std::get<ConstantResponder>(parse_behavior("constant:1.25")).ratio.hundredths, 125);
  EXPECT_EQ(std::get<PowerLawResponder>(parse_behavior("power-law:k=1.12,beta=0.204")).beta, 0.204);
  for (const char* spec : {"ideal-logistic:A=6,B=0.3", "constant:comparison", "power-law:k=1.1,beta=0.2,noise=0.05"}) {
    EXPECT_EQ(describe(parse_behavior(describe(parse_behavior(spec)))), describe(parse_behavior(spec)));
  }
  EXPECT_THROW(parse_behavior("oracle"), InvalidParameter);
  EXPECT_THROW(parse_behavior("ideal-logistic:C=1"), InvalidParameter);
}

TEST(Behavior, PressesTowardTarget) {
  for (std::int64_t h : {100, 37, 1, 0, 173, 250, -12}) {
    Ratio target{h};
    TrialRecord r;
    r.press_log = presses_toward(target);
    EXPECT_EQ(r.ratio_from_presses(), target) << h;
  }
  EXPECT_EQ(presses_toward(Ratio{116}).size(), 3u);  // +10 +5 +1
}

TEST(Robot, StudyOneProducesSixtyCompletedTrials) {
  const auto records = run_robot_session(SessionConfig::jnd_study(), FrictionParams{}, IdealLogisticResponder{});
  ASSERT_EQ(records.size(), 60u);
  for (const auto& r : records) {
    EXPECT_TRUE(r.done);
    EXPECT_TRUE(r.choice.has_value());
    EXPECT_GT(r.durations.standard_s, 0.0);
    EXPECT_GT(r.durations.comparison_s, 0.0);
  }
}

TEST(Robot, StickyComparisonTakesLonger) {
  // The pen lags the input while stuck, so reaching 70 px of pointer travel
  // takes longer against mu_s = 1.0 than against the frictionless standard.
  SessionConfig c = SessionConfig::jnd_study();
  c.comparison_levels = {1.0};
  c.reps = 1;
  const auto r = run_robot_session(c, FrictionParams{}, ConstantResponder{}).front();
  EXPECT_GT(r.durations.comparison_s, r.durations.standard_s);
}

TEST(Robot, Deterministic) {
  SessionConfig c = SessionConfig::magnitude_study();
  c.seed = 42;
  const PowerLawResponder b{1.12, 0.204, 0.1};
  std::ostringstream a, bb;
  write_records(a, run_robot_session(c, FrictionParams{}, b));
  write_records(bb, run_robot_session(c, FrictionParams{}, b));
  EXPECT_EQ(a.str(), bb.str());
}

TEST(Robot, ConstantResponderIsNotIdentifiable) {
  const auto records = run_robot_session(SessionConfig::jnd_study(), FrictionParams{}, ConstantResponder{});
  const auto points = jnd_points(records);
  for (const auto& p : points) EXPECT_EQ(p.value, 0.0);
  EXPECT_FALSE(fit_psychometric(points).identifiable);
}

TEST(Robot, LogisticProportionsTrackGenerator) {
  // 1000 reps per level: each proportion within 4 binomial standard errors.
  SessionConfig c = SessionConfig::jnd_study();
  c.reps = 1000;
  const IdealLogisticResponder gen{4.0, 0.5};
  const auto records = run_robot_session(c, FrictionParams{}, gen);
  for (const auto& l : tally_jnd_proportions(records).levels) {
    const double p = logistic(l.level, gen.A, gen.B);
    EXPECT_LE(std::abs(l.proportion - p), 4.0 * std::sqrt(p * (1.0 - p) / 1000.0)) << l.level;
  }
}

TEST(Robot, NoiselessPowerLawRoundTrip) {
  const auto records = run_robot_session(SessionConfig::magnitude_study(), FrictionParams{}, PowerLawResponder{1.12, 0.204, 0.0});
  ASSERT_EQ(records.size(), 35u);
  for (const auto& r : records) {
    ASSERT_TRUE(r.ratio.has_value());
    EXPECT_EQ(*r.ratio, r.ratio_from_presses());
    EXPECT_EQ(r.ratio->hundredths, std::llround(100.0 * 1.12 * std::pow(r.comparison_mu_s, 0.204)));
  }
  const PowerLawFit fit = fit_power_law(magnitude_points(records));
  EXPECT_NEAR(fit.k, 1.12, 0.01);
  EXPECT_NEAR(fit.beta, 0.204, 0.02);
}
