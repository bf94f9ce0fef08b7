#pragma once

#include <span>
#include <vector>

namespace vmeme::metrics {

double mse(std::span<const double> predicted, std::span<const double> target);

// 0 when either side has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Tau-b with Knight's merge-sort pair counting, O(n log n). 0 when either
// side is constant.
double kendall_tau(std::span<const double> x, std::span<const double> y);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for fewer than two values
};

MeanStd mean_std(std::span<const double> values);

}  // namespace vmeme::metrics
