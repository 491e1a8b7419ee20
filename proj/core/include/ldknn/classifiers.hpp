#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ldknn/data.hpp"
#include "ldknn/localdist.hpp"
#include "ldknn/neighbors.hpp"

namespace ldknn {

enum class Rule { ld_gme, ld_kde, v_knn, dw1_knn, dw2_knn, cap, nbc_gme, nbc_kde };

/// Canonical names: LD_GME, LD_KDE, V_KNN, DW1_KNN, DW2_KNN, CAP, NBC_GME,
/// NBC_KDE.
std::string_view to_string(Rule r) noexcept;
std::optional<Rule> parse_rule(std::string_view text) noexcept;
bool uses_kpc(Rule r) noexcept;

/// Resolution of exact ties in the decision value.
///   local_evidence: larger N_C, then the class whose nearest neighbor is
///                   closest, then class_set order.
///   class_order:    class_set order only.
/// NBC rules have no neighborhood; for them N_C is the training class size
/// and the nearest-neighbor step is skipped.
enum class TieBreak { local_evidence, class_order };

/// Forced simplifications of the LD rules. They exist to check the rule's
/// special cases against the baselines and are off in normal use.
struct LdOverrides {
  bool unit_variance = false;          // GME covariance := I
  bool unit_bandwidth = false;         // KDE bandwidths := 1
  bool balanced_neighborhood = false;  // kpc nearest per class instead of k overall
};

struct DecisionRuleConfig {
  Rule rule = Rule::ld_gme;
  /// Average neighbors per class; the shared neighborhood has
  /// k = kpc * train.n_classes(). CAP takes kpc per class.
  std::size_t kpc = 1;
  NormalizationMode normalization;
  TieBreak tie_break = TieBreak::local_evidence;
  LdOverrides overrides;
};

/// `scores` has one entry per class in class_set.
///   LD / NBC: N_C * f(X|C), rescaled so the best class scores 1. Classes
///             absent from the neighborhood score 0.
///   V-kNN:    N_C.   DW-kNN: sum of weights.   CAP: -distance to centroid.
struct ClassificationResult {
  ClassIndex predicted = 0;
  std::vector<double> scores;
};

/// Fitted classifier. Holds a reference to `train`, which must outlive it.
/// classify() is const and safe to call concurrently.
class Classifier {
 public:
  Classifier(const Dataset& train, DecisionRuleConfig cfg);

  ClassificationResult classify(std::span<const double> query) const;

  /// Predicted class of every row of `queries`. Rows are split into
  /// contiguous chunks across `threads` workers; the result does not depend
  /// on the thread count.
  std::vector<ClassIndex> predict(const Matrix& queries, std::size_t threads = 1) const;

  const DecisionRuleConfig& config() const noexcept { return cfg_; }

 private:
  ClassificationResult classify_ld(std::span<const double> query) const;
  ClassificationResult classify_vknn(std::span<const double> query) const;
  ClassificationResult classify_dwknn(std::span<const double> query) const;
  ClassificationResult classify_cap(std::span<const double> query) const;
  ClassificationResult classify_nbc(std::span<const double> query) const;

  std::size_t neighborhood_size() const;

  const Dataset& train_;
  DecisionRuleConfig cfg_;
  std::vector<std::size_t> class_sizes_;
  std::vector<std::optional<LocalModel>> global_models_;  // NBC only
};

ClassificationResult classify(const Dataset& train, std::span<const double> query,
                              const DecisionRuleConfig& cfg);

// Rule-specific entry points; each checks that cfg.rule belongs to it.
ClassificationResult classify_ld(const Dataset& train, std::span<const double> query,
                                 const DecisionRuleConfig& cfg);
ClassificationResult classify_vknn(const Dataset& train, std::span<const double> query,
                                   const DecisionRuleConfig& cfg);
ClassificationResult classify_dwknn(const Dataset& train, std::span<const double> query,
                                    const DecisionRuleConfig& cfg);
ClassificationResult classify_cap(const Dataset& train, std::span<const double> query,
                                  const DecisionRuleConfig& cfg);
ClassificationResult classify_nbc(const Dataset& train, std::span<const double> query,
                                  const DecisionRuleConfig& cfg);

/// Dudani weight (d_k - d_i) / (d_k - d_1), or 1 when d_k == d_1.
double dudani_weight(double d_i, double d_1, double d_k);

/// Dudani weight divided by the neighbor's 1-based rank; 1 when d_k == d_1.
double dual_weight(double d_i, double d_1, double d_k, std::size_t rank_i);

}  // namespace ldknn
