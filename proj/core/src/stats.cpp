#include "ldknn/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ldknn {

std::vector<double> average_ranks(std::span<const double> values, bool lower_is_better) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lower_is_better ? values[a] < values[b] : values[a] > values[b];
  });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

Matrix rank_rows(const Matrix& values, bool lower_is_better) {
  Matrix out(values.rows(), values.cols());
  for (std::size_t i = 0; i < values.rows(); ++i) {
    const auto r = average_ranks(values.row(i), lower_is_better);
    std::copy(r.begin(), r.end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> mean_ranks(const Matrix& ranks) {
  std::vector<double> out(ranks.cols(), 0.0);
  for (std::size_t i = 0; i < ranks.rows(); ++i) {
    for (std::size_t j = 0; j < ranks.cols(); ++j) out[j] += ranks(i, j);
  }
  for (double& v : out) v /= static_cast<double>(ranks.rows());
  return out;
}

double chi_square_critical_05(std::size_t df) {
  static constexpr std::array<double, 30> table = {
      3.8415,  5.9915,  7.8147,  9.4877,  11.0705, 12.5916, 14.0671, 15.5073,
      16.9190, 18.3070, 19.6751, 21.0261, 22.3620, 23.6848, 24.9958, 26.2962,
      27.5871, 28.8693, 30.1435, 31.4104, 32.6706, 33.9244, 35.1725, 36.4150,
      37.6525, 38.8851, 40.1133, 41.3371, 42.5570, 43.7730};
  if (df < 1 || df > table.size()) {
    throw std::out_of_range("chi_square_critical_05: df must be in [1, 30]");
  }
  return table[df - 1];
}

FriedmanResult friedman_statistic(const Matrix& ranks) {
  const std::size_t n = ranks.rows();
  const std::size_t k = ranks.cols();
  if (k < 2) throw std::invalid_argument("Friedman test needs at least 2 classifiers");
  if (n < 2) {
    throw std::invalid_argument("Friedman test needs at least 2 datasets, got " +
                                std::to_string(n));
  }
  const auto avg = mean_ranks(ranks);
  const double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double r : avg) sum_sq += r * r;
  FriedmanResult res;
  res.statistic = 12.0 * static_cast<double>(n) / (kd * (kd + 1.0)) *
                  (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  res.df = k - 1;
  if (res.df <= 30) {
    res.critical_value = chi_square_critical_05(res.df);
    res.significant = res.statistic > res.critical_value;
  }
  return res;
}

double bonferroni_dunn_q(std::size_t k, double alpha) {
  // z_{1 - alpha / (2(k - 1))}, k = 2..20.
  static constexpr std::array<double, 19> q05 = {
      1.959964, 2.241403, 2.393980, 2.497705, 2.575829, 2.638257, 2.690110,
      2.734369, 2.772921, 2.807034, 2.837597, 2.865260, 2.890512, 2.913726,
      2.935199, 2.955167, 2.973820, 2.991316, 3.007787};
  static constexpr std::array<double, 19> q10 = {
      1.644854, 1.959964, 2.128045, 2.241403, 2.326348, 2.393980, 2.449998,
      2.497705, 2.539185, 2.575829, 2.608616, 2.638257, 2.665285, 2.690110,
      2.713052, 2.734369, 2.754268, 2.772921, 2.790470};
  if (k < 2 || k > 20) {
    throw std::out_of_range("Bonferroni-Dunn table covers 2..20 classifiers, got " +
                            std::to_string(k));
  }
  if (alpha == 0.05) return q05[k - 2];
  if (alpha == 0.10) return q10[k - 2];
  throw std::invalid_argument("Bonferroni-Dunn: alpha must be 0.05 or 0.10");
}

BonferroniDunnResult bonferroni_dunn(std::span<const double> avg_ranks, std::size_t n_datasets,
                                     std::size_t control_index, double alpha) {
  const std::size_t k = avg_ranks.size();
  if (control_index >= k) throw std::out_of_range("Bonferroni-Dunn: control index out of range");
  if (n_datasets < 1) throw std::invalid_argument("Bonferroni-Dunn: no datasets");
  const double kd = static_cast<double>(k);
  BonferroniDunnResult res;
  res.critical_difference = bonferroni_dunn_q(k, alpha) *
                            std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n_datasets)));
  res.significant.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    res.significant[j] = j != control_index &&
                         std::abs(avg_ranks[j] - avg_ranks[control_index]) > res.critical_difference;
  }
  return res;
}

RobustnessResult robustness_ratios(const Matrix& errors) {
  if (errors.rows() == 0 || errors.cols() == 0) {
    throw std::invalid_argument("robustness_ratios: empty matrix");
  }
  RobustnessResult res;
  res.ratios = Matrix(errors.rows(), errors.cols());
  res.floored_rows.assign(errors.rows(), false);
  for (std::size_t i = 0; i < errors.rows(); ++i) {
    const auto row = errors.row(i);
    const double raw_min = *std::min_element(row.begin(), row.end());
    res.floored_rows[i] = raw_min < kErrorFloor;
    const double denom = std::max(raw_min, kErrorFloor);
    for (std::size_t j = 0; j < row.size(); ++j) {
      res.ratios(i, j) = std::max(row[j], kErrorFloor) / denom;
    }
  }
  return res;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quartiles: no values");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

}  // namespace ldknn
