#include "stickslip/distributions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stickslip/analysis.hpp"
#include "stickslip/errors.hpp"

namespace stickslip {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

// Composite Gauss-Legendre rule on [lo, hi].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// 10-point Gauss-Legendre abscissae and weights on [-1, 1].
constexpr std::array<double, 5> kGl10X = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                          0.8650633666889845, 0.9739065285171717};
constexpr std::array<double, 5> kGl10W = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                          0.1494513491505806, 0.0666713443086881};

Quadrature composite_rule(double lo, double hi, int panels) {
  Quadrature rule;
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    const double half = width / 2.0;
    for (std::size_t i = 0; i < kGl10X.size(); ++i) {
      rule.nodes.push_back(mid - half * kGl10X[i]);
      rule.weights.push_back(half * kGl10W[i]);
      rule.nodes.push_back(mid + half * kGl10X[i]);
      rule.weights.push_back(half * kGl10W[i]);
    }
  }
  return rule;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

struct RangeGrid {
  Quadrature rule;
  std::vector<double> pdf;
  std::vector<double> cdf;
};

const RangeGrid& range_grid() {
  static const RangeGrid grid = [] {
    RangeGrid g;
    g.rule = composite_rule(-8.5, 8.5, 34);
    for (double z : g.rule.nodes) {
      g.pdf.push_back(std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi));
      g.cdf.push_back(normal_cdf(z));
    }
    return g;
  }();
  return grid;
}

// P(range of k standard normals <= w).
double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  const RangeGrid& g = range_grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.rule.nodes.size(); ++i) {
    const double inner = g.cdf[i] - normal_cdf(g.rule.nodes[i] - w);
    if (inner <= 0.0) continue;
    sum += g.rule.weights[i] * g.pdf[i] * std::pow(inner, k - 1);
  }
  return std::min(1.0, k * sum);
}

void check_supported(int k, double df) {
  if (k < 2 || k > 100 || !(df >= 2.0) || !(df <= 10000.0)) {
    throw UnsupportedDf("studentized range supports 2 <= k <= 100 and 2 <= df <= 10000 (got k=" +
                        std::to_string(k) + ", df=" + std::to_string(df) + ")");
  }
}

// Density of S = sqrt(chi2_df / df) on an integration grid covering its mass.
double chi_scaled_log_density(double s, double df) {
  const double h = df / 2.0;
  return std::log(2.0) + h * std::log(h) - std::lgamma(h) + (df - 1.0) * std::log(s) - h * s * s;
}

double studentized_range_integral(double q, int k, double df, bool upper) {
  const double spread = 12.0 / std::sqrt(2.0 * df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 10 ? 6.0 : 0.0);
  const Quadrature rule = composite_rule(lo, hi, 24);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = rule.nodes[i];
    const double density = std::exp(chi_scaled_log_density(s, df));
    const double w = normal_range_cdf(q * s, k);
    sum += rule.weights[i] * density * (upper ? 1.0 - w : w);
  }
  return std::clamp(sum, 0.0, 1.0);
}

constexpr std::array<int, 8> kTableDf = {10, 12, 15, 20, 24, 30, 40, 60};

constexpr double kTable05[9][8] = {
    {3.1511, 3.0813, 3.0143, 2.9500, 2.9188, 2.8882, 2.8582, 2.8288},
    {3.8768, 3.7729, 3.6734, 3.5779, 3.5317, 3.4864, 3.4421, 3.3987},
    {4.3266, 4.1987, 4.0760, 3.9583, 3.9013, 3.8454, 3.7907, 3.7371},
    {4.6543, 4.5077, 4.3670, 4.2319, 4.1663, 4.1021, 4.0391, 3.9774},
    {4.9120, 4.7502, 4.5947, 4.4452, 4.3727, 4.3015, 4.2316, 4.1632},
    {5.1242, 4.9496, 4.7816, 4.6199, 4.5413, 4.4642, 4.3885, 4.3141},
    {5.3042, 5.1187, 4.9399, 4.7676, 4.6838, 4.6014, 4.5205, 4.4411},
    {5.4605, 5.2653, 5.0770, 4.8954, 4.8069, 4.7199, 4.6345, 4.5504},
    {5.5984, 5.3946, 5.1979, 5.0079, 4.9152, 4.8241, 4.7345, 4.6463},
};

constexpr double kTable01[9][8] = {
    {4.4820, 4.3198, 4.1673, 4.0239, 3.9555, 3.8891, 3.8247, 3.7622},
    {5.2702, 5.0459, 4.8359, 4.6392, 4.5456, 4.4549, 4.3672, 4.2822},
    {5.7686, 5.5016, 5.2518, 5.0180, 4.9068, 4.7992, 4.6951, 4.5944},
    {6.1361, 5.8363, 5.5558, 5.2933, 5.1684, 5.0476, 4.9308, 4.8178},
    {6.4275, 6.1011, 5.7956, 5.5095, 5.3735, 5.2418, 5.1145, 4.9913},
    {6.6690, 6.3202, 5.9936, 5.6876, 5.5420, 5.4012, 5.2648, 5.1330},
    {6.8749, 6.5069, 6.1621, 5.8389, 5.6850, 5.5361, 5.3920, 5.2525},
    {7.0544, 6.6696, 6.3087, 5.9703, 5.8092, 5.6531, 5.5020, 5.3558},
    {7.2133, 6.8136, 6.4384, 6.0865, 5.9187, 5.7563, 5.5989, 5.4466},
};

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParameter("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_cdf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw InvalidParameter("F distribution needs positive df");
  if (f <= 0.0) return 0.0;
  if (std::isinf(f)) return 1.0;
  return regularized_incomplete_beta(df1 / 2.0, df2 / 2.0, df1 * f / (df1 * f + df2));
}

double f_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw InvalidParameter("F distribution needs positive df");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
}

double studentized_range_cdf(double q, int k, double df) {
  check_supported(k, df);
  if (q <= 0.0) return 0.0;
  return studentized_range_integral(q, k, df, false);
}

double studentized_range_sf(double q, int k, double df) {
  check_supported(k, df);
  if (q <= 0.0) return 1.0;
  return studentized_range_integral(q, k, df, true);
}

double studentized_range_quantile(double p, int k, double df) {
  check_supported(k, df);
  if (!(p > 0.0 && p < 1.0)) throw InvalidParameter("quantile needs 0 < p < 1");
  auto g = [&](double q) { return studentized_range_cdf(q, k, df) - p; };
  double lo = 0.0;
  double g_lo = -p;
  double hi = 2.0;
  double g_hi = g(hi);
  while (g_hi < 0.0) {
    lo = hi;
    g_lo = g_hi;
    hi *= 2.0;
    if (hi > 1e4) throw UnsupportedDf("studentized range quantile did not bracket");
    g_hi = g(hi);
  }
  // Illinois variant of regula falsi.
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    const double g_mid = g(mid);
    if (std::abs(g_mid) < 1e-13 || hi - lo < 1e-12 * hi) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
      if (side == -1) g_hi /= 2.0;
      side = -1;
    } else {
      hi = mid;
      g_hi = g_mid;
      if (side == 1) g_lo /= 2.0;
      side = 1;
    }
  }
  return (lo + hi) / 2.0;
}

std::optional<double> studentized_range_table(double alpha, int k, int df) {
  if (k < 2 || k > 10) return std::nullopt;
  const auto* table = alpha == 0.05 ? kTable05 : alpha == 0.01 ? kTable01 : nullptr;
  if (table == nullptr) return std::nullopt;
  for (std::size_t j = 0; j < kTableDf.size(); ++j) {
    if (kTableDf[j] == df) return table[k - 2][j];
  }
  return std::nullopt;
}

}  // namespace stickslip
