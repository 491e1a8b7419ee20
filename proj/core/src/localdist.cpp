#include "ldknn/localdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ldknn/rng.hpp"

namespace ldknn {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

void check_same_length(std::size_t a, std::size_t b, const char* who) {
  if (a != b) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void check_points(PointList points, const char* who) {
  if (points.empty()) throw std::invalid_argument(std::string(who) + ": no points");
  for (const auto& p : points) check_same_length(p.size(), points[0].size(), who);
}

double log_sum_exp(std::span<const double> terms) {
  const double peak = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

}  // namespace

double log_gaussian_pdf_diag(std::span<const double> x, std::span<const double> mean,
                             std::span<const double> diag_var) {
  check_same_length(x.size(), mean.size(), "gaussian_pdf_diag");
  check_same_length(x.size(), diag_var.size(), "gaussian_pdf_diag");
  double log_det = 0.0;
  double quad = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(diag_var[j] > 0.0)) {
      throw std::invalid_argument("gaussian_pdf_diag: variance must be positive");
    }
    const double diff = x[j] - mean[j];
    log_det += std::log(diag_var[j]);
    quad += diff * diff / diag_var[j];
  }
  return -0.5 * (static_cast<double>(x.size()) * kLogTwoPi + log_det + quad);
}

double gaussian_pdf_diag(std::span<const double> x, std::span<const double> mean,
                         std::span<const double> diag_var) {
  return std::exp(log_gaussian_pdf_diag(x, mean, diag_var));
}

double GmeModel::log_density(std::span<const double> x) const {
  return log_gaussian_pdf_diag(x, mean, diag_var);
}

double GmeModel::density(std::span<const double> x) const { return std::exp(log_density(x)); }

GmeModel fit_gme(PointList points) {
  check_points(points, "fit_gme");
  const std::size_t n = points.size();
  const std::size_t d = points[0].size();
  GmeModel m;
  m.n_support = n;
  m.mean.resize(d);
  m.diag_var.resize(d);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = points[i][j];
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (double v : column) sum += v;
    const double mean = sum / static_cast<double>(n);
    for (double& v : column) v = (v - mean) * (v - mean);
    std::sort(column.begin(), column.end());
    double ss = 0.0;
    for (double v : column) ss += v;
    m.mean[j] = mean;
    m.diag_var[j] = std::max(ss / static_cast<double>(n), kVarianceFloor);
  }
  return m;
}

double silverman_bandwidth(double std_dev, std::size_t n) {
  if (n < 1) throw std::invalid_argument("silverman_bandwidth: n must be >= 1");
  const double h = 1.06 * std::max(std_dev, 0.0) * std::pow(static_cast<double>(n), -0.2);
  return std::max(h, kVarianceFloor);
}

KdeModel fit_kde(PointList points) {
  check_points(points, "fit_kde");
  const std::size_t n = points.size();
  const std::size_t d = points[0].size();
  KdeModel m;
  m.n_support = n;
  m.support.reserve(n * d);
  for (const auto& p : points) m.support.insert(m.support.end(), p.begin(), p.end());
  m.bandwidths.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    double sigma = 0.0;
    if (n > 1) {
      double sum = 0.0;
      for (const auto& p : points) sum += p[j];
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (const auto& p : points) ss += (p[j] - mean) * (p[j] - mean);
      sigma = std::sqrt(ss / static_cast<double>(n - 1));
    }
    m.bandwidths[j] = silverman_bandwidth(sigma, n);
  }
  return m;
}

double KdeModel::log_density(std::span<const double> x) const {
  check_same_length(x.size(), dims(), "kde_density");
  double log_norm = std::log(static_cast<double>(n_support)) +
                    0.5 * static_cast<double>(dims()) * kLogTwoPi;
  for (double h : bandwidths) log_norm += std::log(h);

  std::vector<double> terms(n_support);
  for (std::size_t i = 0; i < n_support; ++i) {
    const auto p = point(i);
    double quad = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double u = (p[j] - x[j]) / bandwidths[j];
      quad += u * u;
    }
    terms[i] = -0.5 * quad;
  }
  return log_sum_exp(terms) - log_norm;
}

double KdeModel::density(std::span<const double> x) const { return std::exp(log_density(x)); }

double kde_density(const KdeModel& model, std::span<const double> x) { return model.density(x); }

double log_density(const LocalModel& model, std::span<const double> x) {
  return std::visit([x](const auto& m) { return m.log_density(x); }, model);
}

NormalizationMode NormalizationMode::monte_carlo(std::size_t samples, std::uint64_t seed) {
  if (samples < 100) {
    throw std::invalid_argument("monte_carlo normalization needs at least 100 samples");
  }
  return {Kind::monte_carlo, samples, seed};
}

double log_ball_volume(std::size_t dims, double radius) {
  const double half = 0.5 * static_cast<double>(dims);
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0) +
         static_cast<double>(dims) * std::log(radius);
}

namespace {

// Uniform point in the ball: Gaussian direction, radius r * u^(1/d).
void sample_ball(Rng& rng, std::span<const double> center, double radius,
                 std::span<double> out) {
  const std::size_t d = center.size();
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      out[j] = rng.normal();
      norm2 += out[j] * out[j];
    }
  } while (norm2 == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  const double scale = r / std::sqrt(norm2);
  for (std::size_t j = 0; j < d; ++j) out[j] = center[j] + scale * out[j];
}

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("normalization region radius must be positive and finite");
  }
}

}  // namespace

MonteCarloEstimate integrate_over_ball(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> center, double radius,
                                       std::size_t samples, std::uint64_t seed) {
  check_radius(radius);
  if (samples < 2) throw std::invalid_argument("integrate_over_ball: need >= 2 samples");
  Rng rng(seed);
  std::vector<double> x(center.size());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    sample_ball(rng, center, radius, x);
    const double v = f(x);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double volume = std::exp(log_ball_volume(center.size(), radius));
  const double var = m2 / static_cast<double>(samples - 1);
  return {volume * mean, volume * std::sqrt(var / static_cast<double>(samples))};
}

double log_local_normalizer(const LocalModel& model, std::span<const double> center,
                            double radius, const NormalizationMode& mode) {
  check_radius(radius);
  if (mode.kind == NormalizationMode::Kind::omit) return 0.0;

  Rng rng(mode.seed);
  std::vector<double> x(center.size());
  std::vector<double> log_f(mode.samples);
  for (auto& lf : log_f) {
    sample_ball(rng, center, radius, x);
    lf = log_density(model, x);
  }
  const double log_mean = log_sum_exp(log_f) - std::log(static_cast<double>(mode.samples));
  const double result = log_mean + log_ball_volume(center.size(), radius);
  if (std::isnan(result) || result < kMinLogNormalizer) return kMinLogNormalizer;
  return result;
}

double local_normalizer(const LocalModel& model, std::span<const double> center, double radius,
                        const NormalizationMode& mode) {
  return std::exp(log_local_normalizer(model, center, radius, mode));
}

}  // namespace ldknn
