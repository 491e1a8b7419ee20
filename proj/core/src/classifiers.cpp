#include "ldknn/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ranges>
#include <stdexcept>
#include <string>
#include <thread>

#include "ldknn/rng.hpp"

namespace ldknn {

std::string_view to_string(Rule r) noexcept {
  switch (r) {
    case Rule::ld_gme: return "LD_GME";
    case Rule::ld_kde: return "LD_KDE";
    case Rule::v_knn: return "V_KNN";
    case Rule::dw1_knn: return "DW1_KNN";
    case Rule::dw2_knn: return "DW2_KNN";
    case Rule::cap: return "CAP";
    case Rule::nbc_gme: return "NBC_GME";
    case Rule::nbc_kde: return "NBC_KDE";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view text) noexcept {
  for (Rule r : {Rule::ld_gme, Rule::ld_kde, Rule::v_knn, Rule::dw1_knn, Rule::dw2_knn, Rule::cap,
                 Rule::nbc_gme, Rule::nbc_kde}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

bool uses_kpc(Rule r) noexcept { return r != Rule::nbc_gme && r != Rule::nbc_kde; }

double dudani_weight(double d_i, double d_1, double d_k) {
  if (!(d_1 <= d_i && d_i <= d_k)) {
    throw std::invalid_argument("dudani_weight: need d_1 <= d_i <= d_k");
  }
  if (d_k == d_1) return 1.0;
  return (d_k - d_i) / (d_k - d_1);
}

double dual_weight(double d_i, double d_1, double d_k, std::size_t rank_i) {
  if (rank_i < 1) throw std::invalid_argument("dual_weight: rank is 1-based");
  const double w = dudani_weight(d_i, d_1, d_k);
  if (d_k == d_1) return 1.0;
  return w / static_cast<double>(rank_i);
}

namespace {

constexpr double kNoClass = -std::numeric_limits<double>::infinity();

// Index of the maximal decision value, ties resolved per `mode`. `counts`
// and `nearest` feed the local-evidence rule; pass an empty `nearest` to
// skip that step.
ClassIndex argmax_with_ties(std::span<const double> values, std::span<const std::size_t> counts,
                            std::span<const double> nearest, TieBreak mode) {
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<ClassIndex> cands;
  for (ClassIndex c = 0; c < values.size(); ++c) {
    if (values[c] == best) cands.push_back(c);
  }
  if (cands.size() == 1 || mode == TieBreak::class_order) return cands.front();

  const std::size_t max_count = std::ranges::max(
      cands | std::views::transform([&](ClassIndex c) { return counts[c]; }));
  std::erase_if(cands, [&](ClassIndex c) { return counts[c] != max_count; });
  if (cands.size() == 1 || nearest.empty()) return cands.front();

  const double closest = std::ranges::min(
      cands | std::views::transform([&](ClassIndex c) { return nearest[c]; }));
  for (ClassIndex c : cands) {
    if (nearest[c] == closest) return c;
  }
  return cands.front();
}

std::vector<std::size_t> neighbor_counts(const NeighborhoodPartition& part) {
  std::vector<std::size_t> counts(part.per_class.size());
  for (ClassIndex c = 0; c < counts.size(); ++c) counts[c] = part.per_class[c].size();
  return counts;
}

std::vector<double> nearest_distances(const NeighborhoodPartition& part) {
  std::vector<double> out(part.per_class.size(), std::numeric_limits<double>::infinity());
  for (ClassIndex c = 0; c < out.size(); ++c) {
    if (!part.per_class[c].empty()) out[c] = part.per_class[c].front().distance;
  }
  return out;
}

ClassificationResult decide(std::vector<double> values, const NeighborhoodPartition& part,
                            TieBreak mode) {
  const auto counts = neighbor_counts(part);
  const auto nearest = nearest_distances(part);
  ClassificationResult r;
  r.predicted = argmax_with_ties(values, counts, nearest, mode);
  r.scores = std::move(values);
  return r;
}

// Log-domain values to scores rescaled so the best class is 1 and absent
// classes are 0.
std::vector<double> rescale_log_scores(std::span<const double> log_values) {
  const double peak = *std::max_element(log_values.begin(), log_values.end());
  std::vector<double> out(log_values.size(), 0.0);
  if (peak == kNoClass) return out;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = log_values[c] == kNoClass ? 0.0 : std::exp(log_values[c] - peak);
  }
  return out;
}

void require_rule(const DecisionRuleConfig& cfg, std::initializer_list<Rule> allowed,
                  const char* who) {
  if (std::find(allowed.begin(), allowed.end(), cfg.rule) == allowed.end()) {
    throw std::invalid_argument(std::string(who) + " does not implement rule " +
                                std::string(to_string(cfg.rule)));
  }
}

}  // namespace

Classifier::Classifier(const Dataset& train, DecisionRuleConfig cfg)
    : train_(train), cfg_(std::move(cfg)), class_sizes_(train.class_counts()) {
  if (train.size() == 0) throw std::invalid_argument("Classifier: empty training set");
  if (uses_kpc(cfg_.rule) && cfg_.kpc < 1) {
    throw std::invalid_argument("Classifier: kpc must be >= 1");
  }
  if (cfg_.rule == Rule::nbc_gme || cfg_.rule == Rule::nbc_kde) {
    const auto members = train.class_members();
    global_models_.resize(members.size());
    for (ClassIndex c = 0; c < members.size(); ++c) {
      if (members[c].empty()) {
        throw std::invalid_argument("NBC: class '" + train.class_set[c] +
                                    "' has no training samples");
      }
      std::vector<std::span<const double>> pts;
      pts.reserve(members[c].size());
      for (std::size_t i : members[c]) pts.push_back(train.row(i));
      if (cfg_.rule == Rule::nbc_gme) {
        global_models_[c] = fit_gme(pts);
      } else {
        global_models_[c] = fit_kde(pts);
      }
    }
  }
}

std::size_t Classifier::neighborhood_size() const {
  const std::size_t k = cfg_.kpc * train_.n_classes();
  if (k > train_.size()) {
    throw std::invalid_argument("k = kpc * n_classes = " + std::to_string(k) +
                                " exceeds the training set size " +
                                std::to_string(train_.size()) + "; use a smaller kpc");
  }
  return k;
}

ClassificationResult Classifier::classify(std::span<const double> query) const {
  switch (cfg_.rule) {
    case Rule::ld_gme:
    case Rule::ld_kde: return classify_ld(query);
    case Rule::v_knn: return classify_vknn(query);
    case Rule::dw1_knn:
    case Rule::dw2_knn: return classify_dwknn(query);
    case Rule::cap: return classify_cap(query);
    case Rule::nbc_gme:
    case Rule::nbc_kde: return classify_nbc(query);
  }
  throw std::logic_error("unknown rule");
}

ClassificationResult Classifier::classify_ld(std::span<const double> query) const {
  const auto part = cfg_.overrides.balanced_neighborhood
                        ? knn_per_class(train_, query, cfg_.kpc)
                        : knn_partition(train_, query, neighborhood_size());

  // A zero radius (query on top of every neighbor) leaves no region to
  // normalize over; the density is then taken as already local.
  const bool normalize = cfg_.normalization.kind != NormalizationMode::Kind::omit &&
                         part.radius > 0.0;

  std::vector<double> log_values(train_.n_classes(), kNoClass);
  for (ClassIndex c = 0; c < log_values.size(); ++c) {
    if (part.per_class[c].empty()) continue;
    const auto pts = part.points(train_, c);
    LocalModel model;
    if (cfg_.rule == Rule::ld_gme) {
      GmeModel gme = fit_gme(pts);
      if (cfg_.overrides.unit_variance) std::fill(gme.diag_var.begin(), gme.diag_var.end(), 1.0);
      model = std::move(gme);
    } else {
      KdeModel kde = fit_kde(pts);
      if (cfg_.overrides.unit_bandwidth) {
        std::fill(kde.bandwidths.begin(), kde.bandwidths.end(), 1.0);
      }
      model = std::move(kde);
    }
    double value = std::log(static_cast<double>(pts.size())) + log_density(model, query);
    if (normalize) {
      NormalizationMode mode = cfg_.normalization;
      mode.seed = derive_seed(cfg_.normalization.seed, c);
      value -= log_local_normalizer(model, query, part.radius, mode);
    }
    log_values[c] = value;
  }

  ClassificationResult r;
  r.predicted = argmax_with_ties(log_values, neighbor_counts(part), nearest_distances(part),
                                 cfg_.tie_break);
  r.scores = rescale_log_scores(log_values);
  return r;
}

ClassificationResult Classifier::classify_vknn(std::span<const double> query) const {
  const auto part = knn_partition(train_, query, neighborhood_size());
  std::vector<double> values(train_.n_classes(), 0.0);
  for (ClassIndex c = 0; c < values.size(); ++c) {
    values[c] = static_cast<double>(part.per_class[c].size());
  }
  return decide(std::move(values), part, cfg_.tie_break);
}

ClassificationResult Classifier::classify_dwknn(std::span<const double> query) const {
  const auto part = knn_partition(train_, query, neighborhood_size());
  const double d_1 = part.neighbors.front().distance;
  const double d_k = part.radius;
  std::vector<double> values(train_.n_classes(), 0.0);
  for (std::size_t i = 0; i < part.neighbors.size(); ++i) {
    const Neighbor& n = part.neighbors[i];
    values[n.label] += cfg_.rule == Rule::dw1_knn ? dudani_weight(n.distance, d_1, d_k)
                                                  : dual_weight(n.distance, d_1, d_k, i + 1);
  }
  return decide(std::move(values), part, cfg_.tie_break);
}

ClassificationResult Classifier::classify_cap(std::span<const double> query) const {
  const auto part = knn_per_class(train_, query, cfg_.kpc);
  std::vector<double> values(train_.n_classes(), kNoClass);
  for (ClassIndex c = 0; c < values.size(); ++c) {
    const auto pts = part.points(train_, c);
    values[c] = -euclidean_distance(query, fit_gme(pts).mean);
  }
  return decide(std::move(values), part, cfg_.tie_break);
}

ClassificationResult Classifier::classify_nbc(std::span<const double> query) const {
  if (query.size() != train_.dims()) {
    throw std::invalid_argument("query has " + std::to_string(query.size()) +
                                " dimensions, training set has " + std::to_string(train_.dims()));
  }
  std::vector<double> log_values(train_.n_classes(), kNoClass);
  for (ClassIndex c = 0; c < log_values.size(); ++c) {
    log_values[c] = std::log(static_cast<double>(class_sizes_[c])) +
                    log_density(*global_models_[c], query);
  }
  ClassificationResult r;
  r.predicted = argmax_with_ties(log_values, class_sizes_, {}, cfg_.tie_break);
  r.scores = rescale_log_scores(log_values);
  return r;
}

std::vector<ClassIndex> Classifier::predict(const Matrix& queries, std::size_t threads) const {
  std::vector<ClassIndex> out(queries.rows());
  const std::size_t n = queries.rows();
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = classify(queries.row(i)).predicted;
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          const std::size_t end = std::min(n, (t + 1) * chunk);
          for (std::size_t i = t * chunk; i < end; ++i) {
            out[i] = classify(queries.row(i)).predicted;
          }
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

ClassificationResult classify(const Dataset& train, std::span<const double> query,
                              const DecisionRuleConfig& cfg) {
  return Classifier(train, cfg).classify(query);
}

ClassificationResult classify_ld(const Dataset& train, std::span<const double> query,
                                 const DecisionRuleConfig& cfg) {
  require_rule(cfg, {Rule::ld_gme, Rule::ld_kde}, "classify_ld");
  return classify(train, query, cfg);
}

ClassificationResult classify_vknn(const Dataset& train, std::span<const double> query,
                                   const DecisionRuleConfig& cfg) {
  require_rule(cfg, {Rule::v_knn}, "classify_vknn");
  return classify(train, query, cfg);
}

ClassificationResult classify_dwknn(const Dataset& train, std::span<const double> query,
                                    const DecisionRuleConfig& cfg) {
  require_rule(cfg, {Rule::dw1_knn, Rule::dw2_knn}, "classify_dwknn");
  return classify(train, query, cfg);
}

ClassificationResult classify_cap(const Dataset& train, std::span<const double> query,
                                  const DecisionRuleConfig& cfg) {
  require_rule(cfg, {Rule::cap}, "classify_cap");
  return classify(train, query, cfg);
}

ClassificationResult classify_nbc(const Dataset& train, std::span<const double> query,
                                  const DecisionRuleConfig& cfg) {
  require_rule(cfg, {Rule::nbc_gme, Rule::nbc_kde}, "classify_nbc");
  return classify(train, query, cfg);
}

}  // namespace ldknn
