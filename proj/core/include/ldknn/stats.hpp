#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ldknn/data.hpp"

namespace ldknn {

/// 1-based ranks of `values`; rank 1 is the best. Tied values share the
/// average of the ranks they span, so the ranks always sum to k(k+1)/2.
std::vector<double> average_ranks(std::span<const double> values, bool lower_is_better);

/// Ranks each row (dataset) of a datasets x classifiers matrix.
Matrix rank_rows(const Matrix& values, bool lower_is_better);

/// Column means of a rank matrix.
std::vector<double> mean_ranks(const Matrix& ranks);

/// Upper 5% point of the chi-square distribution, df in [1, 30].
double chi_square_critical_05(std::size_t df);

struct FriedmanResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double critical_value = 0.0;  // 0.05 level
  bool significant = false;
};

/// chi2_F = 12N / (k(k+1)) * (sum_j Rbar_j^2 - k(k+1)^2 / 4), df = k - 1,
/// over an N x k matrix of within-row ranks.
FriedmanResult friedman_statistic(const Matrix& ranks);

/// Two-tailed Bonferroni-Dunn critical value q_alpha for k classifiers
/// (2 <= k <= 20, alpha 0.05 or 0.10).
double bonferroni_dunn_q(std::size_t k, double alpha = 0.05);

struct BonferroniDunnResult {
  double critical_difference = 0.0;
  std::vector<bool> significant;  // per classifier; the control is never significant
};

/// CD = q_alpha * sqrt(k(k+1) / (6N)); classifier j differs from the control
/// iff |Rbar_j - Rbar_control| > CD.
BonferroniDunnResult bonferroni_dunn(std::span<const double> avg_ranks, std::size_t n_datasets,
                                     std::size_t control_index, double alpha = 0.05);

/// Floor applied to error rates before forming robustness ratios.
inline constexpr double kErrorFloor = 1e-12;

struct RobustnessResult {
  Matrix ratios;                   // datasets x classifiers, each row's minimum is 1
  std::vector<bool> floored_rows;  // rows whose minimum error was below kErrorFloor
};

/// r_m = e_m / min_k e_k per row, with every error floored at kErrorFloor.
RobustnessResult robustness_ratios(const Matrix& errors);

struct Quartiles {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Five-number summary with linear interpolation between order statistics.
Quartiles quartiles(std::vector<double> values);

}  // namespace ldknn
