#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace ldknn {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of sub-stream `stream` under `base`. Every seeded component in the
/// library derives its randomness through this function:
///   repeat seed = derive_seed(master, repeat)
///   class seed  = derive_seed(spec seed, class index)
/// so sequences do not depend on the order in which streams are consumed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Deterministic random source. The integer stream is std::mt19937_64, whose
/// output is fixed by the standard; the real-valued draws are computed here
/// rather than through <random> distributions, which are
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

  /// Uniform integer in [0, n). Unbiased (rejection).
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ldknn
