#include <cmath>

#include "doctest.h"
#include "ldknn/synthgen.hpp"
#include "oracles.hpp"

using namespace ldknn;

namespace {

std::vector<double> class_mean(const Dataset& d, ClassIndex c) {
  std::vector<double> m(d.dims(), 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] != c) continue;
    ++n;
    for (std::size_t j = 0; j < d.dims(); ++j) m[j] += d.features(i, j);
  }
  for (auto& v : m) v /= static_cast<double>(n);
  return m;
}

std::vector<std::vector<double>> class_cov(const Dataset& d, ClassIndex c) {
  const auto m = class_mean(d, c);
  const std::size_t p = d.dims();
  std::vector<std::vector<double>> cov(p, std::vector<double>(p, 0.0));
  std::size_t n = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] != c) continue;
    ++n;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        cov[a][b] += (d.features(i, a) - m[a]) * (d.features(i, b) - m[b]);
      }
    }
  }
  for (auto& row : cov) {
    for (auto& v : row) v /= static_cast<double>(n - 1);
  }
  return cov;
}

}  // namespace

TEST_CASE("T2 class-1 mean is close to (0,-1)") {
  const auto d = generate({Family::t2, 2, 10000, 17});
  const auto m = class_mean(d, 0);
  CHECK(std::abs(m[0] - 0.0) < 0.05);
  CHECK(std::abs(m[1] + 1.0) < 0.05);
  const auto m2 = class_mean(d, 1);
  CHECK(std::abs(m2[1] - 1.0) < 0.05);
}

TEST_CASE("T1 samples lie in the box and carry the sine-boundary label") {
  for (std::size_t p : {2u, 5u}) {
    const auto d = generate({Family::t1, p, 2000, 3});
    CHECK(d.class_counts() == std::vector<std::size_t>{2000, 2000});
    for (std::size_t i = 0; i < d.size(); ++i) {
      double boundary = 0.0;
      for (std::size_t j = 0; j + 1 < p; ++j) {
        const double x = d.features(i, j);
        CHECK(x >= 0.0);
        CHECK(x <= 2.0 * M_PI);
        boundary += std::sin(x);
      }
      boundary /= static_cast<double>(p - 1);
      const double y = d.features(i, p - 1);
      CHECK(y >= -2.0);
      CHECK(y <= 2.0);
      CHECK(d.labels[i] == (y < boundary ? 0u : 1u));
    }
  }
}

TEST_CASE("T4 class-2 covariance is close to ones + 3I") {
  const auto d = generate({Family::t4, 3, 20000, 8});
  const auto cov = class_cov(d, 1);
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      const double expected = 1.0 + (a == b ? 3.0 : 0.0);
      CHECK(std::abs(cov[a][b] - expected) < 0.15);
    }
  }
}

TEST_CASE("T4 off-diagonal correlations are positive in both classes") {
  const auto d = generate({Family::t4, 4, 10000, 21});
  for (ClassIndex c = 0; c < 2; ++c) {
    const auto cov = class_cov(d, c);
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = 0; b < 4; ++b) {
        if (a != b) CHECK(cov[a][b] / std::sqrt(cov[a][a] * cov[b][b]) > 0.1);
      }
    }
  }
}

TEST_CASE("T3 class-2 variance is about four times class-1's") {
  const auto d = generate({Family::t3, 3, 10000, 5});
  const auto c1 = class_cov(d, 0);
  const auto c2 = class_cov(d, 1);
  for (std::size_t j = 0; j < 3; ++j) {
    const double ratio = c2[j][j] / c1[j][j];
    CHECK(ratio >= 3.6);
    CHECK(ratio <= 4.4);
  }
}

TEST_CASE("generation is deterministic and per-class streams are independent") {
  for (auto family : {Family::t1, Family::t2, Family::t3, Family::t4}) {
    const auto a = generate({family, 3, 200, 42});
    const auto b = generate({family, 3, 200, 42});
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(generate({family, 3, 200, 43}).features != a.features);

    // The first 100 class-2 rows do not depend on how many rows were drawn.
    const auto small = generate({family, 3, 100, 42});
    std::size_t k = 0;
    for (std::size_t i = 0; i < a.size() && k < 100; ++i) {
      if (a.labels[i] != 1) continue;
      std::size_t found = 0, seen = 0;
      for (std::size_t s = 0; s < small.size(); ++s) {
        if (small.labels[s] == 1 && seen++ == k) found = s;
      }
      for (std::size_t j = 0; j < 3; ++j) CHECK(a.features(i, j) == small.features(found, j));
      ++k;
    }
  }
}

TEST_CASE("generate rejects p < 2") {
  CHECK_THROWS(generate({Family::t2, 1, 10, 0}));
  CHECK_THROWS(generate({Family::t1, 2, 0, 0}));
  CHECK(parse_family("T3") == Family::t3);
  CHECK_FALSE(parse_family("t9"));
  CHECK(to_string(Family::t4) == "t4");
}

TEST_CASE("T2 Bayes error is Phi(-1) for any p") {
  const double phi_m1 = oracle::normal_cdf(-1.0);
  CHECK(std::abs(phi_m1 - 0.15866) < 1e-5);
  for (std::size_t p : {2u, 5u, 30u}) CHECK(std::abs(bayes_error_t2(p) - phi_m1) < 1e-9);
  CHECK(std::abs(oracle::t2_bayes_error_mc(400000, 9) - 0.15866) < 0.003);
  CHECK_THROWS(bayes_error_t2(1));
}

TEST_CASE("doubled separation gives Phi(-2), strictly smaller") {
  CHECK(std::abs(normal_cdf(-2.0) - oracle::normal_cdf(-2.0)) < 1e-9);
  CHECK(std::abs(normal_cdf(-2.0) - 0.02275) < 1e-5);
  CHECK(normal_cdf(-2.0) < bayes_error_t2(2));
  CHECK(std::abs(normal_cdf(-1.0) + normal_cdf(1.0) - 1.0) < 1e-15);
}
