#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stickslip/analysis.hpp"
#include "stickslip/errors.hpp"

using namespace stickslip;

namespace {

std::vector<LevelPoint> logistic_points(double A, double B, const std::vector<double>& levels) {
  std::vector<LevelPoint> pts;
  for (double x : levels) pts.push_back({x, 1.0 / (1.0 + std::exp(-A * (x - B)))});
  return pts;
}

const std::vector<double> kStudyLevels{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

// Six subjects under four conditions. Sums of squares by exact rational
// arithmetic: SS_cond = 5033/8, SS_err = 1161/8, F = 25165/1161 on (3, 15).
RepeatedMeasures textbook_fixture() {
  return RepeatedMeasures(6, 4, {45, 50, 55, 70, 42, 42, 45, 50, 36, 41, 43, 48,
                                 39, 35, 40, 46, 51, 55, 59, 64, 44, 49, 56, 60});
}

}  // namespace

TEST(Psychometric, NoiselessRecovery) {
  const PsychometricFit fit = fit_psychometric(logistic_points(4.0, 0.5, kStudyLevels));
  ASSERT_TRUE(fit.identifiable);
  EXPECT_NEAR(fit.A, 4.0, 1e-6);
  EXPECT_NEAR(fit.B, 0.5, 1e-6);
  EXPECT_LT(fit.sse, 1e-12);
  EXPECT_NEAR(fit(fit.pse()), 0.5, 1e-15);
}

TEST(Psychometric, RecoversAcrossParameterRange) {
  for (double A : {0.5, 2.0, 9.0, 15.0}) {
    for (double B : {0.1, 0.45, 0.9}) {
      const PsychometricFit fit = fit_psychometric(logistic_points(A, B, kStudyLevels));
      EXPECT_NEAR(fit.A, A, 1e-6 * A) << A << " " << B;
      EXPECT_NEAR(fit.B, B, 1e-6) << A << " " << B;
    }
  }
}

TEST(Psychometric, ShiftScaleConsistent) {
  const double A = 3.0, B = 0.4, a = 2.5, b = -1.0;
  auto pts = logistic_points(A, B, kStudyLevels);
  for (auto& p : pts) p.level = a * p.level + b;
  const PsychometricFit fit = fit_psychometric(pts);
  EXPECT_NEAR(fit.A, A / a, 1e-6);
  EXPECT_NEAR(fit.B, a * B + b, 1e-6);
}

TEST(Psychometric, FlatDataIsNotIdentifiable) {
  std::vector<LevelPoint> flat;
  for (double x : kStudyLevels) flat.push_back({x, 0.5});
  const PsychometricFit fit = fit_psychometric(flat);
  EXPECT_FALSE(fit.identifiable);
  EXPECT_TRUE(std::isnan(fit.B));
  EXPECT_THROW(jnd(fit), UndefinedJnd);
}

TEST(Psychometric, RejectsBadInput) {
  EXPECT_THROW(fit_psychometric(logistic_points(1, 0, {0.0, 1.0})), std::exception);
  std::vector<LevelPoint> out_of_range{{0, 0.1}, {0.5, 1.2}, {1, 0.9}};
  EXPECT_THROW(fit_psychometric(out_of_range), std::exception);
}

TEST(Psychometric, Deterministic) {
  std::vector<LevelPoint> noisy{{0, 0.1}, {0.2, 0.3}, {0.4, 0.2}, {0.6, 0.8}, {0.8, 0.7}, {1.0, 0.9}};
  const auto a = fit_psychometric(noisy);
  const auto b = fit_psychometric(noisy);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.sse, b.sse);
}

TEST(Jnd, ClosedForm) {
  PsychometricFit fit;
  fit.A = std::log(3.0);
  EXPECT_NEAR(jnd(fit), 1.0, 1e-15);
  fit.A = 2.0 * std::log(3.0);
  EXPECT_NEAR(jnd(fit), 0.5, 1e-15);
  for (double A : {0.068, 0.25, 1.0, 4.0, 17.3}) {
    fit.A = A;
    EXPECT_NEAR(jnd(fit) * A, std::log(3.0), 1e-15);
    // 75 % point minus PSE, checked against the curve itself.
    fit.B = 0.3;
    EXPECT_NEAR(fit(fit.B + jnd(fit)), 0.75, 1e-12);
  }
  fit.A = 0.0;
  EXPECT_THROW(jnd(fit), UndefinedJnd);
  fit.A = -1.0;
  EXPECT_THROW(jnd(fit), UndefinedJnd);
}

TEST(PowerLaw, TwoPointExact) {
  const std::vector<LevelPoint> pts{{0.4, 0.94}, {1.0, 1.16}};
  const PowerLawFit fit = fit_power_law(pts);
  EXPECT_NEAR(fit.beta, std::log(1.16 / 0.94) / std::log(2.5), 1e-12);
  EXPECT_NEAR(fit.beta, 0.2295, 1e-4);
  EXPECT_NEAR(fit.k, 1.16, 1e-12);
  EXPECT_NEAR(fit(0.4), 0.94, 1e-12);
}

TEST(PowerLaw, EqualRatiosGiveZeroExponent) {
  const std::vector<LevelPoint> pts{{0.4, 1.1}, {0.7, 1.1}, {1.0, 1.1}};
  const PowerLawFit fit = fit_power_law(pts);
  EXPECT_NEAR(fit.beta, 0.0, 1e-15);
  EXPECT_NEAR(fit.k, 1.1, 1e-15);
}

TEST(PowerLaw, ExactOnNoiselessData) {
  std::vector<LevelPoint> pts;
  for (double x : {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) pts.push_back({x, 1.12 * std::pow(x, 0.204)});
  const PowerLawFit fit = fit_power_law(pts);
  EXPECT_NEAR(fit.k, 1.12, 1e-12);
  EXPECT_NEAR(fit.beta, 0.204, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(PowerLaw, DomainErrors) {
  EXPECT_THROW(fit_power_law(std::vector<LevelPoint>{{0.0, 1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(fit_power_law(std::vector<LevelPoint>{{0.5, -1.0}, {1.0, 1.0}}), DomainError);
  EXPECT_THROW(fit_power_law(std::vector<LevelPoint>{{0.5, 1.0}, {0.5, 2.0}}), InvalidParameter);
}

TEST(Anova, TextbookFixture) {
  const AnovaResult r = rm_anova(textbook_fixture());
  EXPECT_NEAR(r.F, 25165.0 / 1161.0, 1e-9);
  EXPECT_EQ(r.df1, 3);
  EXPECT_EQ(r.df2, 15);
  EXPECT_NEAR(r.ss_conditions, 5033.0 / 8.0, 1e-9);
  EXPECT_NEAR(r.ss_subjects, 25097.0 / 24.0, 1e-9);
  EXPECT_NEAR(r.ss_error, 1161.0 / 8.0, 1e-9);
  EXPECT_NEAR(r.p, 1.042202395202996e-05, 1e-12);
}

TEST(Anova, SubjectOffsetInvariance) {
  RepeatedMeasures d = textbook_fixture();
  const double F = rm_anova(d).F;
  for (std::size_t s = 0; s < d.subjects(); ++s) {
    for (std::size_t c = 0; c < d.conditions(); ++c) d.at(s, c) += 100.0 * static_cast<double>(s) - 37.5;
  }
  EXPECT_NEAR(rm_anova(d).F, F, 1e-9);
}

TEST(Anova, IdenticalConditionsGiveZero) {
  RepeatedMeasures d(5, 3);
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t c = 0; c < 3; ++c) d.at(s, c) = 2.0 + static_cast<double>(s) * 0.3 + 0.01 * static_cast<double>(s * s);
  const AnovaResult r = rm_anova(d);
  EXPECT_EQ(r.F, 0.0);
  EXPECT_EQ(r.p, 1.0);
  for (const auto& t : tukey_hsd(d, r)) {
    EXPECT_EQ(t.q, 0.0);
    EXPECT_FALSE(t.significant_05);
  }
}

TEST(Anova, ShapeOfPublishedDesign) {
  RepeatedMeasures d(10, 7);
  for (std::size_t s = 0; s < 10; ++s)
    for (std::size_t c = 0; c < 7; ++c) d.at(s, c) = std::sin(static_cast<double>(s * 7 + c));
  const AnovaResult r = rm_anova(d);
  EXPECT_EQ(r.df1, 6);
  EXPECT_EQ(r.df2, 54);
}

TEST(Anova, MissingCellIsAnError) {
  RepeatedMeasures d = textbook_fixture();
  d.at(2, 1) = std::nan("");
  EXPECT_THROW(rm_anova(d), ValidationError);
  EXPECT_THROW(rm_anova(RepeatedMeasures(1, 3, {1, 2, 3})), std::exception);
}

TEST(Tukey, TextbookFixtureFlags) {
  const RepeatedMeasures d = textbook_fixture();
  const AnovaResult r = rm_anova(d);
  const auto pairs = tukey_hsd(d, r);
  ASSERT_EQ(pairs.size(), 6u);
  // q = |diff| / sqrt(MSE / n); critical q(4, 15) = 4.0760 (.05), 5.2518 (.01).
  struct Expect {
    std::size_t i, j;
    double q;
    bool s05, s01;
  };
  const Expect expected[] = {{0, 1, 1.9687480773953945, false, false}, {0, 2, 5.381244744880744, true, true},
                             {0, 3, 10.63123961793513, true, true},    {1, 2, 3.41249666748535, false, false},
                             {1, 3, 8.662491540539735, true, true},    {2, 3, 5.249994873054385, true, false}};
  for (std::size_t n = 0; n < 6; ++n) {
    EXPECT_EQ(pairs[n].first, expected[n].i);
    EXPECT_EQ(pairs[n].second, expected[n].j);
    EXPECT_NEAR(pairs[n].q, expected[n].q, 1e-9);
    EXPECT_EQ(pairs[n].significant_05, expected[n].s05) << n;
    EXPECT_EQ(pairs[n].significant_01, expected[n].s01) << n;
  }
  EXPECT_NEAR(pairs[0].difference, -2.5, 1e-12);
}

TEST(Tukey, UnsupportedDf) {
  RepeatedMeasures d(2, 2, {1.0, 2.0, 2.0, 4.5});  // df2 = 1
  const AnovaResult r = rm_anova(d);
  EXPECT_EQ(r.df2, 1);
  EXPECT_THROW(tukey_hsd(d, r), UnsupportedDf);
}
