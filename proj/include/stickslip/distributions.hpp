#pragma once

#include <optional>

namespace stickslip {

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

double f_cdf(double f, double df1, double df2);
// Upper tail P(F > f), computed directly rather than as 1 - cdf.
double f_sf(double f, double df1, double df2);

// Studentized range distribution of the range of k standard normals divided
// by an independent chi/sqrt(df) variate. Supported: 2 <= k <= 100,
// 2 <= df <= 10000; anything else throws UnsupportedDf.
double studentized_range_cdf(double q, int k, double df);
double studentized_range_sf(double q, int k, double df);
double studentized_range_quantile(double p, int k, double df);

// Published upper critical values for alpha in {0.05, 0.01}, k in 2..10 and
// df in {10, 12, 15, 20, 24, 30, 40, 60}; nullopt outside that grid.
std::optional<double> studentized_range_table(double alpha, int k, int df);

}  // namespace stickslip
