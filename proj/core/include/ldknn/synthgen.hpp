#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ldknn/data.hpp"

namespace ldknn {

/// Two-class synthetic families. A p-dimensional sample is (x_1..x_{p-1}, y).
///   T1: uniform on [0, 2pi]^{p-1} x [-2, 2], class by the sign of
///       y - mean_i sin(x_i)
///   T2: N([0..0,-1], I) vs N([0..0,+1], I)
///   T3: N(0, I) vs N(0, 4I)
///   T4: N([0..0,-1], 1 + I) vs N([0..0,+1], 1 + 3I), 1 the all-ones matrix
enum class Family { t1, t2, t3, t4 };

std::string_view to_string(Family f) noexcept;
std::optional<Family> parse_family(std::string_view text) noexcept;

struct SyntheticSpec {
  Family family = Family::t2;
  std::size_t dim_p = 2;
  std::size_t n_per_class = 500;
  std::uint64_t seed = 0;
};

/// Class "1" rows come first, then class "2". Each class draws from its own
/// stream derive_seed(seed, class), so one class's samples never depend on
/// the other's.
Dataset generate(const SyntheticSpec& spec);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Exact Bayes error of T2 with equal priors: Phi(-1), for any dim_p >= 2.
double bayes_error_t2(std::size_t dim_p);

}  // namespace ldknn
