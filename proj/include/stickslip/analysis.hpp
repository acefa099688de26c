#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stickslip {

class UndefinedJnd : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedDf : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct LevelPoint {
  double level = 0.0;
  double value = 0.0;
};

double logistic(double x, double slope, double inflection);

struct PsychometricFit {
  double A = 0.0;  // slope
  double B = 0.0;  // inflection; NaN when not identifiable
  double sse = 0.0;
  bool identifiable = true;

  double pse() const { return B; }
  double operator()(double x) const { return logistic(x, A, B); }
};

// Unweighted least squares of 1 / (1 + exp(-A (x - B))) over the points:
// 16 x 16 grid start (A log-spaced over [0.1, 20], B over the level range),
// then Nelder-Mead with restarts. Needs >= 3 distinct levels and values in
// [0, 1]; flat data comes back with identifiable = false.
PsychometricFit fit_psychometric(std::span<const LevelPoint> points);

// 75% point minus PSE, ln(3) / A. Throws UndefinedJnd for A <= 0 or a
// non-identifiable fit.
double jnd(const PsychometricFit& fit);

struct PowerLawFit {
  double k = 1.0;
  double beta = 0.0;
  double r2 = 1.0;  // in log-log space

  double operator()(double x) const;
};

// Least squares line through (ln x, ln y). Throws DomainError on
// non-positive values, InvalidParameter with fewer than two distinct levels.
PowerLawFit fit_power_law(std::span<const LevelPoint> points);

// Complete subjects x conditions table, row-major.
class RepeatedMeasures {
 public:
  RepeatedMeasures(std::size_t subjects, std::size_t conditions);
  RepeatedMeasures(std::size_t subjects, std::size_t conditions, std::vector<double> values);

  std::size_t subjects() const { return subjects_; }
  std::size_t conditions() const { return conditions_; }
  double& at(std::size_t subject, std::size_t condition) { return values_[subject * conditions_ + condition]; }
  double at(std::size_t subject, std::size_t condition) const {
    return values_[subject * conditions_ + condition];
  }

 private:
  std::size_t subjects_;
  std::size_t conditions_;
  std::vector<double> values_;
};

struct TukeyPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double difference = 0.0;  // mean(first) - mean(second)
  double q = 0.0;
  double p = 1.0;
  bool significant_05 = false;
  bool significant_01 = false;
};

struct AnovaResult {
  double F = 0.0;
  int df1 = 0;
  int df2 = 0;
  double p = 1.0;
  double ss_conditions = 0.0;
  double ss_subjects = 0.0;
  double ss_error = 0.0;
  double ms_error = 0.0;
  std::size_t subjects = 0;
  std::vector<double> condition_means;
  std::vector<TukeyPair> pairs;  // filled by tukey_hsd
};

// One-way within-subjects ANOVA; the error term is the condition x subject
// interaction. Throws ValidationError on missing (non-finite) cells.
AnovaResult rm_anova(const RepeatedMeasures& data);

// All pairwise comparisons against studentized range critical values at the
// ANOVA's error df.
std::vector<TukeyPair> tukey_hsd(const RepeatedMeasures& data, const AnovaResult& anova);

// Outcomes published for the original user studies; kept for documentation
// and never produced by the code above.
namespace published {
inline constexpr double kJndWithString = 0.29;
inline constexpr double kJndWithoutString = 0.77;
inline constexpr double kPowerLawK = 1.12;
inline constexpr double kPowerLawBeta = 0.204;
inline constexpr double kAnovaF = 4.22;
inline constexpr int kAnovaDf1 = 6;
inline constexpr int kAnovaDf2 = 54;
inline constexpr double kAnovaP = 0.0012;
}  // namespace published

}  // namespace stickslip
