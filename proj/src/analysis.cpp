#include "stickslip/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "stickslip/distributions.hpp"
#include "stickslip/errors.hpp"

namespace stickslip {

namespace {

struct Point2 {
  double a;
  double b;
};

template <class F>
Point2 nelder_mead(F&& f, Point2 start, Point2 step) {
  constexpr int kMaxIter = 4000;
  constexpr double kFTol = 1e-10;

  std::array<Point2, 3> x = {start, Point2{start.a + step.a, start.b}, Point2{start.a, start.b + step.b}};
  std::array<double, 3> fx = {f(x[0]), f(x[1]), f(x[2])};

  auto blend = [](Point2 p, Point2 q, double t) { return Point2{p.a + t * (q.a - p.a), p.b + t * (q.b - p.b)}; };

  for (int iter = 0; iter < kMaxIter; ++iter) {
    std::array<int, 3> order = {0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return fx[i] < fx[j]; });
    const int best = order[0];
    const int mid = order[1];
    const int worst = order[2];

    const double spread = fx[worst] - fx[best];
    const double size = std::max({std::abs(x[worst].a - x[best].a), std::abs(x[worst].b - x[best].b),
                                  std::abs(x[mid].a - x[best].a), std::abs(x[mid].b - x[best].b)});
    const double scale = 1.0 + std::abs(x[best].a) + std::abs(x[best].b);
    if ((spread <= kFTol * std::abs(fx[best]) && size <= 1e-8 * scale) || size <= 1e-13 * scale) break;

    const Point2 centroid{(x[best].a + x[mid].a) / 2.0, (x[best].b + x[mid].b) / 2.0};
    const Point2 reflected = blend(centroid, x[worst], -1.0);
    const double f_reflected = f(reflected);

    if (f_reflected < fx[best]) {
      const Point2 expanded = blend(centroid, x[worst], -2.0);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        x[worst] = expanded;
        fx[worst] = f_expanded;
      } else {
        x[worst] = reflected;
        fx[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fx[mid]) {
      x[worst] = reflected;
      fx[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fx[worst];
    const Point2 contracted = outside ? blend(centroid, reflected, 0.5) : blend(centroid, x[worst], 0.5);
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, fx[worst])) {
      x[worst] = contracted;
      fx[worst] = f_contracted;
      continue;
    }
    for (int i : {mid, worst}) {
      x[i] = blend(x[best], x[i], 0.5);
      fx[i] = f(x[i]);
    }
  }
  const auto it = std::min_element(fx.begin(), fx.end());
  return x[static_cast<std::size_t>(it - fx.begin())];
}

}  // namespace

double logistic(double x, double slope, double inflection) {
  return 1.0 / (1.0 + std::exp(-slope * (x - inflection)));
}

PsychometricFit fit_psychometric(std::span<const LevelPoint> points) {
  std::set<double> distinct;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double y_min = 1.0;
  double y_max = 0.0;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.level)) throw InvalidParameter("levels must be finite");
    if (!(pt.value >= 0.0 && pt.value <= 1.0)) throw InvalidParameter("proportions must lie in [0, 1]");
    distinct.insert(pt.level);
    lo = std::min(lo, pt.level);
    hi = std::max(hi, pt.level);
    y_min = std::min(y_min, pt.value);
    y_max = std::max(y_max, pt.value);
  }
  if (distinct.size() < 3) throw InvalidParameter("psychometric fit needs at least 3 distinct levels");

  auto sse = [&](Point2 p) {
    double sum = 0.0;
    for (const auto& pt : points) {
      const double r = logistic(pt.level, p.a, p.b) - pt.value;
      sum += r * r;
    }
    return std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
  };

  if (y_max - y_min <= 1e-12) {
    return PsychometricFit{0.0, std::numeric_limits<double>::quiet_NaN(), sse(Point2{0.0, 0.0}), false};
  }

  constexpr int kGrid = 16;
  Point2 best{0.1, lo};
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double a = 0.1 * std::pow(200.0, static_cast<double>(i) / (kGrid - 1));
    for (int j = 0; j < kGrid; ++j) {
      const double b = lo + (hi - lo) * static_cast<double>(j) / (kGrid - 1);
      const double s = sse(Point2{a, b});
      if (s < best_sse) {
        best_sse = s;
        best = Point2{a, b};
      }
    }
  }

  const double range = hi - lo;
  Point2 step{0.1 * std::abs(best.a), 0.1 * range};
  for (int restart = 0; restart < 20; ++restart) {
    const Point2 next = nelder_mead(sse, best, step);
    const double next_sse = sse(next);
    const bool improved = next_sse < best_sse * (1.0 - 1e-12) && next_sse < best_sse - 1e-300;
    if (next_sse <= best_sse) {
      best = next;
      best_sse = next_sse;
    }
    if (!improved && restart > 0) break;
    step = Point2{1e-3 * (std::abs(best.a) + 1e-3), 1e-3 * range};
  }
  return PsychometricFit{best.a, best.b, best_sse, true};
}

double jnd(const PsychometricFit& fit) {
  if (!fit.identifiable) throw UndefinedJnd("JND is undefined for a non-identifiable fit");
  if (!(fit.A > 0.0)) throw UndefinedJnd("JND is undefined for slope A <= 0");
  return std::log(3.0) / fit.A;
}

double PowerLawFit::operator()(double x) const { return k * std::pow(x, beta); }

PowerLawFit fit_power_law(std::span<const LevelPoint> points) {
  std::set<double> distinct;
  double mx = 0.0;
  double my = 0.0;
  for (const auto& pt : points) {
    if (!(pt.level > 0.0) || !(pt.value > 0.0) || !std::isfinite(pt.level) || !std::isfinite(pt.value)) {
      throw DomainError("power-law fit needs positive levels and ratios");
    }
    distinct.insert(pt.level);
    mx += std::log(pt.level);
    my += std::log(pt.value);
  }
  if (distinct.size() < 2) throw InvalidParameter("power-law fit needs at least 2 distinct levels");
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : points) {
    const double dx = std::log(pt.level) - mx;
    const double dy = std::log(pt.value) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  PowerLawFit fit;
  fit.beta = sxy / sxx;
  fit.k = std::exp(my - fit.beta * mx);
  double ss_res = 0.0;
  for (const auto& pt : points) {
    const double r = std::log(pt.value) - (my + fit.beta * (std::log(pt.level) - mx));
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

RepeatedMeasures::RepeatedMeasures(std::size_t subjects, std::size_t conditions)
    : RepeatedMeasures(subjects, conditions,
                       std::vector<double>(subjects * conditions, std::numeric_limits<double>::quiet_NaN())) {}

RepeatedMeasures::RepeatedMeasures(std::size_t subjects, std::size_t conditions, std::vector<double> values)
    : subjects_(subjects), conditions_(conditions), values_(std::move(values)) {
  if (values_.size() != subjects_ * conditions_) {
    throw ValidationError(fmt::format("expected {} x {} values, got {}", subjects_, conditions_, values_.size()));
  }
}

AnovaResult rm_anova(const RepeatedMeasures& data) {
  const std::size_t n = data.subjects();
  const std::size_t k = data.conditions();
  if (n < 2 || k < 2) throw ValidationError("repeated-measures ANOVA needs >= 2 subjects and >= 2 conditions");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(data.at(i, j))) {
        throw ValidationError(fmt::format("missing cell (subject {}, condition {})", i, j));
      }
    }
  }

  std::vector<double> row_mean(n, 0.0);
  std::vector<double> col_mean(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += data.at(i, j);
      col_mean[j] += data.at(i, j);
    }
  }
  for (auto& m : row_mean) m /= static_cast<double>(k);
  for (auto& m : col_mean) m /= static_cast<double>(n);
  double grand = 0.0;
  for (double m : col_mean) grand += m;
  grand /= static_cast<double>(k);

  AnovaResult r;
  double ss_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = data.at(i, j) - grand;
      const double e = data.at(i, j) - row_mean[i] - col_mean[j] + grand;
      ss_total += d * d;
      r.ss_error += e * e;
    }
  }
  for (double m : row_mean) r.ss_subjects += static_cast<double>(k) * (m - grand) * (m - grand);
  for (double m : col_mean) r.ss_conditions += static_cast<double>(n) * (m - grand) * (m - grand);

  r.df1 = static_cast<int>(k) - 1;
  r.df2 = (static_cast<int>(k) - 1) * (static_cast<int>(n) - 1);
  r.subjects = n;
  r.condition_means = col_mean;
  r.ms_error = r.ss_error / r.df2;

  // Sums of squares at rounding level are treated as exact zeros.
  const double negligible = 1e-20 * ss_total;
  if (ss_total == 0.0 || r.ss_conditions <= negligible) {
    r.F = 0.0;
    r.p = 1.0;
  } else if (r.ss_error <= negligible) {
    r.F = std::numeric_limits<double>::infinity();
    r.p = 0.0;
  } else {
    r.F = (r.ss_conditions / r.df1) / r.ms_error;
    r.p = f_sf(r.F, r.df1, r.df2);
  }
  return r;
}

std::vector<TukeyPair> tukey_hsd(const RepeatedMeasures& data, const AnovaResult& anova) {
  const std::size_t k = anova.condition_means.size();
  if (k != data.conditions() || anova.subjects != data.subjects()) {
    throw ValidationError("ANOVA result does not belong to this data");
  }
  const int groups = static_cast<int>(k);
  const double df = anova.df2;
  const double crit05 = studentized_range_quantile(0.95, groups, df);
  const double crit01 = studentized_range_quantile(0.99, groups, df);
  for (auto [alpha, crit] : {std::pair{0.05, crit05}, std::pair{0.01, crit01}}) {
    if (const auto table = studentized_range_table(alpha, groups, anova.df2)) {
      if (std::abs(*table - crit) > 2e-3) {
        throw std::logic_error(fmt::format("studentized range critical value {} disagrees with table {}", crit,
                                           *table));
      }
    }
  }

  const double se = std::sqrt(anova.ms_error / static_cast<double>(anova.subjects));
  std::vector<TukeyPair> pairs;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      TukeyPair pair;
      pair.first = i;
      pair.second = j;
      pair.difference = anova.condition_means[i] - anova.condition_means[j];
      const double gap = std::abs(pair.difference);
      if (gap == 0.0) {
        pair.q = 0.0;
      } else {
        pair.q = se > 0.0 ? gap / se : std::numeric_limits<double>::infinity();
      }
      pair.p = std::isinf(pair.q) ? 0.0 : studentized_range_sf(pair.q, groups, df);
      pair.significant_05 = pair.q > crit05;
      pair.significant_01 = pair.q > crit01;
      pairs.push_back(pair);
    }
  }
  return pairs;
}

}  // namespace stickslip
