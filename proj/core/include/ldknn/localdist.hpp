#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace ldknn {

/// Floor for local variances (GME) and bandwidths (KDE), in normalized
/// feature units. Keeps single-point and duplicate-point neighborhoods
/// well defined.
inline constexpr double kVarianceFloor = 1e-9;

using PointList = std::span<const std::span<const double>>;

/// Log of the diagonal-covariance normal density.
double log_gaussian_pdf_diag(std::span<const double> x, std::span<const double> mean,
                             std::span<const double> diag_var);
double gaussian_pdf_diag(std::span<const double> x, std::span<const double> mean,
                         std::span<const double> diag_var);

/// Diagonal Gaussian fitted by maximum likelihood (population variance).
struct GmeModel {
  std::vector<double> mean;
  std::vector<double> diag_var;
  std::size_t n_support = 0;

  double log_density(std::span<const double> x) const;
  double density(std::span<const double> x) const;
};

/// Sums are taken over sorted per-dimension values, so the fitted model is
/// bitwise independent of the order of `points`.
GmeModel fit_gme(PointList points);

/// 1.06 * sigma * n^(-1/5), floored at kVarianceFloor.
double silverman_bandwidth(double std_dev, std::size_t n);

/// Gaussian-kernel density with one bandwidth per dimension.
struct KdeModel {
  std::vector<double> support;  // n_support rows of dims() values
  std::vector<double> bandwidths;
  std::size_t n_support = 0;

  std::size_t dims() const noexcept { return bandwidths.size(); }
  std::span<const double> point(std::size_t i) const {
    return {support.data() + i * dims(), dims()};
  }

  /// Evaluated with a max-shifted log-sum-exp over the kernels.
  double log_density(std::span<const double> x) const;
  double density(std::span<const double> x) const;
};

/// Bandwidths from the per-dimension sample standard deviation of `points`
/// (zero for a single point).
KdeModel fit_kde(PointList points);

double kde_density(const KdeModel& model, std::span<const double> x);

using LocalModel = std::variant<GmeModel, KdeModel>;

double log_density(const LocalModel& model, std::span<const double> x);

/// How the local density is renormalized over the neighborhood ball.
struct NormalizationMode {
  enum class Kind { omit, monte_carlo };

  Kind kind = Kind::omit;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;

  static NormalizationMode omit() { return {}; }
  static NormalizationMode monte_carlo(std::size_t samples, std::uint64_t seed);
};

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// log of the volume of a d-dimensional Euclidean ball.
double log_ball_volume(std::size_t dims, double radius);

/// Integral of `f` over the ball by uniform sampling: volume * mean(f), with
/// the standard error of that estimate.
MonteCarloEstimate integrate_over_ball(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> center, double radius,
                                       std::size_t samples, std::uint64_t seed);

/// log of the integral of `model` over the ball around `center`. Returns 0
/// (integral 1) when the mode is omit. Computed in log space throughout and
/// floored at kMinLogNormalizer.
double log_local_normalizer(const LocalModel& model, std::span<const double> center,
                            double radius, const NormalizationMode& mode);
double local_normalizer(const LocalModel& model, std::span<const double> center, double radius,
                        const NormalizationMode& mode);

inline constexpr double kMinLogNormalizer = -700.0;

}  // namespace ldknn
