#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldknn/classifiers.hpp"
#include "ldknn/data.hpp"

namespace ldknn {

/// Where z-score statistics are fitted: on the whole dataset before
/// splitting, or on each training fold only.
enum class NormalizationScope { global, train_fold };

std::string_view to_string(NormalizationScope s) noexcept;
std::optional<NormalizationScope> parse_scope(std::string_view text) noexcept;

/// How kpc is chosen for neighborhood rules.
///   fixed:      DecisionRuleConfig::kpc as given.
///   nested:     per outer training set, an inner stratified CV over `grid`
///               picks the kpc with the lowest inner error.
///   optimistic: the full repeated CV is run for every grid value and the
///               one with the lowest AMR is reported (selection on test
///               performance).
/// Grid values that are infeasible for a training set are skipped; ties go
/// to the smaller kpc.
enum class KpcSelection { fixed, nested, optimistic };

std::string_view to_string(KpcSelection s) noexcept;
std::optional<KpcSelection> parse_kpc_selection(std::string_view text) noexcept;

struct KpcPolicy {
  KpcSelection selection = KpcSelection::fixed;
  std::vector<std::size_t> grid = {1, 2, 3, 5, 7, 10, 15, 20};
  std::size_t inner_folds = 5;
};

struct CvOptions {
  std::size_t n_folds = 5;
  std::size_t n_repeats = 10;
  std::uint64_t seed = 0;
  NormalizationScope scope = NormalizationScope::global;
  std::size_t threads = 1;
  KpcPolicy kpc;
};

struct RunRow {
  std::string dataset;
  std::string classifier;
  std::size_t repeat = 0;
  std::size_t fold = 0;
  double mr = 0.0;
  double f1 = 0.0;
  std::size_t kpc = 0;  // kpc used for this fold (0 for NBC rules)

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

/// Repeated stratified k-fold CV. Repeat r uses the fold plan seeded with
/// derive_seed(opts.seed, r). Rows come back ordered by (repeat, fold)
/// regardless of opts.threads. Errors are rethrown annotated with the
/// repeat and fold that raised them.
std::vector<RunRow> cross_validate(const Dataset& d, const DecisionRuleConfig& cfg,
                                   const CvOptions& opts, std::string classifier_name = {});

/// Grid values usable with `train` for `rule`: k = kpc * n_classes must not
/// exceed the training size, and CAP needs kpc <= the smallest class.
std::vector<std::size_t> feasible_kpcs(const Dataset& train, Rule rule,
                                       const std::vector<std::size_t>& grid);

}  // namespace ldknn
