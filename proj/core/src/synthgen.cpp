#include "ldknn/synthgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ldknn/errors.hpp"
#include "ldknn/rng.hpp"

namespace ldknn {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::t1: return "t1";
    case Family::t2: return "t2";
    case Family::t3: return "t3";
    case Family::t4: return "t4";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view text) noexcept {
  if (text == "t1" || text == "T1") return Family::t1;
  if (text == "t2" || text == "T2") return Family::t2;
  if (text == "t3" || text == "T3") return Family::t3;
  if (text == "t4" || text == "T4") return Family::t4;
  return std::nullopt;
}

namespace {

struct GaussianClass {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

GaussianClass gaussian_class(Family family, std::size_t p, int which) {
  const auto n = static_cast<Eigen::Index>(p);
  GaussianClass g{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)};
  const double shift = which == 0 ? -1.0 : 1.0;
  switch (family) {
    case Family::t2:
      g.mean(n - 1) = shift;
      break;
    case Family::t3:
      if (which == 1) g.cov *= 4.0;
      break;
    case Family::t4:
      g.mean(n - 1) = shift;
      g.cov = Eigen::MatrixXd::Ones(n, n) +
              (which == 0 ? 1.0 : 3.0) * Eigen::MatrixXd::Identity(n, n);
      break;
    case Family::t1:
      break;
  }
  return g;
}

void sample_gaussian(Dataset& d, const GaussianClass& g, std::size_t count, ClassIndex label,
                     Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success) {
    throw Error("synthgen: covariance is not symmetric positive definite");
  }
  const Eigen::MatrixXd factor = llt.matrixL();
  const auto p = g.mean.size();
  Eigen::VectorXd z(p);
  std::vector<double> row(static_cast<std::size_t>(p));
  for (std::size_t i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = g.mean + factor * z;
    for (Eigen::Index j = 0; j < p; ++j) row[static_cast<std::size_t>(j)] = x(j);
    d.features.append_row(row);
    d.labels.push_back(label);
  }
}

// Class 0 lies below the boundary (y < mean sin x), class 1 on or above it.
void sample_sine_boundary(Dataset& d, std::size_t p, std::size_t count, ClassIndex label,
                          Rng& rng) {
  std::vector<double> row(p);
  std::size_t accepted = 0;
  while (accepted < count) {
    double boundary = 0.0;
    for (std::size_t j = 0; j + 1 < p; ++j) {
      row[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      boundary += std::sin(row[j]);
    }
    boundary /= static_cast<double>(p - 1);
    row[p - 1] = rng.uniform(-2.0, 2.0);
    const ClassIndex side = row[p - 1] < boundary ? 0 : 1;
    if (side != label) continue;
    d.features.append_row(row);
    d.labels.push_back(label);
    ++accepted;
  }
}

}  // namespace

Dataset generate(const SyntheticSpec& spec) {
  if (spec.dim_p < 2) throw std::invalid_argument("generate: dim_p must be >= 2");
  if (spec.n_per_class == 0) throw std::invalid_argument("generate: n_per_class must be > 0");

  Dataset d;
  d.name = std::string(to_string(spec.family)) + "_p" + std::to_string(spec.dim_p);
  d.class_set = {"1", "2"};
  d.labels.reserve(2 * spec.n_per_class);

  for (ClassIndex c = 0; c < 2; ++c) {
    Rng rng(derive_seed(spec.seed, c));
    if (spec.family == Family::t1) {
      sample_sine_boundary(d, spec.dim_p, spec.n_per_class, c, rng);
    } else {
      sample_gaussian(d, gaussian_class(spec.family, spec.dim_p, static_cast<int>(c)),
                      spec.n_per_class, c, rng);
    }
  }
  return d;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bayes_error_t2(std::size_t dim_p) {
  if (dim_p < 2) throw std::invalid_argument("bayes_error_t2: dim_p must be >= 2");
  // Means 2 apart along y with unit variance: the optimal boundary y = 0 sits
  // one standard deviation from each mean.
  return normal_cdf(-1.0);
}

}  // namespace ldknn
