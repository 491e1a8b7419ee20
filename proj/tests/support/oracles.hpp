// Independent reference implementations used as test oracles. Nothing here
// calls into the library's numeric code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ldknn/data.hpp"

namespace oracle {

inline ldknn::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                   const std::vector<std::size_t>& labels,
                                   std::vector<std::string> class_set = {"1", "2"}) {
  ldknn::Dataset d;
  d.name = "fixture";
  for (const auto& r : rows) d.features.append_row(r);
  d.labels = labels;
  d.class_set = std::move(class_set);
  return d;
}

// Gaussian blobs, one per class, centers spaced `gap` apart on axis 0.
inline ldknn::Dataset random_blobs(std::size_t n_classes, std::size_t per_class, std::size_t dims,
                                   double gap, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> labels;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < n_classes; ++c) {
    names.push_back("c" + std::to_string(c));
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> r(dims);
      for (auto& v : r) v = z(gen);
      r[0] += gap * static_cast<double>(c);
      rows.push_back(r);
      labels.push_back(c);
    }
  }
  return make_dataset(rows, labels, names);
}

inline double dist(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// Indices of every training row within the k-th smallest distance, sorted by
// (distance, index), from a full sort of all distances.
inline std::vector<std::size_t> brute_knn(const ldknn::Dataset& d, const std::vector<double>& q,
                                          std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) s += (d.features(i, j) - q[j]) * (d.features(i, j) - q[j]);
    all.emplace_back(s, i);
  }
  std::sort(all.begin(), all.end());
  const double cutoff = all[k - 1].first;
  std::vector<std::size_t> out;
  for (const auto& [s, i] : all) {
    if (s <= cutoff) out.push_back(i);
  }
  return out;
}

// Standard normal CDF by composite Simpson integration of the pdf from -12.
inline double normal_cdf(double x) {
  const double lo = -12.0;
  if (x <= lo) return 0.0;
  const int n = 200000;
  const double h = (x - lo) / n;
  auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); };
  double s = pdf(lo) + pdf(x);
  for (int i = 1; i < n; ++i) s += pdf(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Upper-tail standard normal quantile by bisection on normal_cdf.
inline double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Friedman chi-square in rank-sum form: 12/(N k (k+1)) sum R_j^2 - 3 N (k+1).
inline double friedman_textbook(const std::vector<std::vector<double>>& ranks) {
  const double n = static_cast<double>(ranks.size());
  const double k = static_cast<double>(ranks[0].size());
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < ranks[0].size(); ++j) {
    double r = 0.0;
    for (const auto& row : ranks) r += row[j];
    sum_sq += r * r;
  }
  return 12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0);
}

// Ranks with ties sharing the average of their positions, lowest value = 1.
inline std::vector<double> ranks_of(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (double w : v) {
      if (w < v[i]) less += 1.0;
      if (w == v[i]) equal += 1.0;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Monte Carlo Bayes oracle for T2: draw from the two unit-covariance
// Gaussians at y = -1 and y = +1 and classify by the sign of y.
inline double t2_bayes_error_mc(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const bool second = i % 2 == 1;
    const double y = z(gen) + (second ? 1.0 : -1.0);
    if ((y >= 0.0) != second) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples);
}

}  // namespace oracle
