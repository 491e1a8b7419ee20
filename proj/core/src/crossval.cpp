#include "ldknn/crossval.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ldknn/errors.hpp"
#include "ldknn/metrics.hpp"
#include "ldknn/rng.hpp"

namespace ldknn {

std::string_view to_string(NormalizationScope s) noexcept {
  return s == NormalizationScope::global ? "global" : "train_fold";
}

std::optional<NormalizationScope> parse_scope(std::string_view text) noexcept {
  if (text == "global") return NormalizationScope::global;
  if (text == "train_fold") return NormalizationScope::train_fold;
  return std::nullopt;
}

std::string_view to_string(KpcSelection s) noexcept {
  switch (s) {
    case KpcSelection::fixed: return "fixed";
    case KpcSelection::nested: return "nested";
    case KpcSelection::optimistic: return "optimistic";
  }
  return "?";
}

std::optional<KpcSelection> parse_kpc_selection(std::string_view text) noexcept {
  if (text == "fixed") return KpcSelection::fixed;
  if (text == "nested") return KpcSelection::nested;
  if (text == "optimistic") return KpcSelection::optimistic;
  return std::nullopt;
}

std::vector<std::size_t> feasible_kpcs(const Dataset& train, Rule rule,
                                       const std::vector<std::size_t>& grid) {
  const auto counts = train.class_counts();
  const std::size_t min_class = counts.empty() ? 0 : *std::min_element(counts.begin(), counts.end());
  std::vector<std::size_t> out;
  for (std::size_t kpc : grid) {
    if (kpc < 1) continue;
    if (rule == Rule::cap) {
      if (kpc <= min_class) out.push_back(kpc);
    } else if (kpc * train.n_classes() <= train.size()) {
      out.push_back(kpc);
    }
  }
  return out;
}

namespace {

struct Split {
  Dataset train;
  Dataset test;
};

Split make_split(const Dataset& d, const FoldPlan& plan, std::size_t fold,
                 NormalizationScope scope) {
  Split s{d.subset(plan.train_indices(fold)), d.subset(plan.test_indices(fold))};
  if (scope == NormalizationScope::train_fold) {
    const auto params = fit_zscore(s.train);
    s.train = apply_zscore(s.train, params);
    s.test = apply_zscore(s.test, params);
  }
  return s;
}

struct FoldScore {
  double mr;
  double f1;
};

FoldScore evaluate(const Dataset& train, const Dataset& test, const DecisionRuleConfig& cfg) {
  const Classifier clf(train, cfg);
  const auto predicted = clf.predict(test.features);
  return {misclassification_rate(predicted, test.labels),
          macro_f1(predicted, test.labels, test.n_classes())};
}

// Inner CV on an outer training set; returns the grid kpc with the lowest
// mean inner misclassification rate.
std::size_t select_kpc_nested(const Dataset& train, const DecisionRuleConfig& cfg,
                              const KpcPolicy& policy, std::uint64_t seed) {
  const auto counts = train.class_counts();
  const std::size_t min_class = *std::min_element(counts.begin(), counts.end());
  const std::size_t inner_folds =
      std::clamp<std::size_t>(std::min(policy.inner_folds, min_class), 2, train.size());
  const FoldPlan plan = make_stratified_folds(train, inner_folds, seed);

  std::vector<Dataset> inner_train, inner_test;
  for (std::size_t f = 0; f < inner_folds; ++f) {
    inner_train.push_back(train.subset(plan.train_indices(f)));
    inner_test.push_back(train.subset(plan.test_indices(f)));
  }
  // Every inner training set must support the chosen kpc.
  std::vector<std::size_t> grid = policy.grid;
  for (const auto& t : inner_train) grid = feasible_kpcs(t, cfg.rule, grid);
  if (grid.empty()) {
    throw Error("nested kpc selection: no grid value is feasible for the inner folds");
  }

  std::size_t best_kpc = grid.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t kpc : grid) {
    DecisionRuleConfig c = cfg;
    c.kpc = kpc;
    double err = 0.0;
    for (std::size_t f = 0; f < inner_folds; ++f) err += evaluate(inner_train[f], inner_test[f], c).mr;
    if (err < best_err) {
      best_err = err;
      best_kpc = kpc;
    }
  }
  return best_kpc;
}

std::vector<RunRow> run_cv(const Dataset& d, const DecisionRuleConfig& cfg, const CvOptions& opts,
                           const std::string& name, bool nested) {
  const Dataset base = opts.scope == NormalizationScope::global ? apply_zscore(d, fit_zscore(d)) : d;

  std::vector<FoldPlan> plans;
  plans.reserve(opts.n_repeats);
  for (std::size_t r = 0; r < opts.n_repeats; ++r) {
    plans.push_back(make_stratified_folds(d, opts.n_folds, derive_seed(opts.seed, r)));
  }

  const std::size_t n_units = opts.n_repeats * opts.n_folds;
  std::vector<RunRow> rows(n_units);
  std::vector<std::exception_ptr> errors(n_units);

  auto run_unit = [&](std::size_t u) {
    const std::size_t r = u / opts.n_folds;
    const std::size_t f = u % opts.n_folds;
    try {
      const Split split = make_split(base, plans[r], f, opts.scope);
      DecisionRuleConfig c = cfg;
      if (nested && uses_kpc(cfg.rule)) {
        c.kpc = select_kpc_nested(split.train, cfg, opts.kpc,
                                  derive_seed(derive_seed(opts.seed, r), 0x1000 + f));
      }
      const FoldScore s = evaluate(split.train, split.test, c);
      rows[u] = {d.name, name, r, f, s.mr, s.f1, uses_kpc(c.rule) ? c.kpc : 0};
    } catch (...) {
      errors[u] = std::current_exception();
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(opts.threads, 1, n_units);
  if (threads == 1) {
    for (std::size_t u = 0; u < n_units; ++u) run_unit(u);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t u = t; u < n_units; u += threads) run_unit(u);
      });
    }
  }

  for (std::size_t u = 0; u < n_units; ++u) {
    if (!errors[u]) continue;
    const std::string where = "repeat " + std::to_string(u / opts.n_folds) + ", fold " +
                              std::to_string(u % opts.n_folds);
    try {
      std::rethrow_exception(errors[u]);
    } catch (const std::exception& e) {
      throw Error(name + " on " + d.name + " (" + where + "): " + e.what());
    }
  }
  return rows;
}

}  // namespace

std::vector<RunRow> cross_validate(const Dataset& d, const DecisionRuleConfig& cfg,
                                   const CvOptions& opts, std::string classifier_name) {
  d.validate();
  if (opts.n_folds < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
  if (opts.n_repeats < 1) throw std::invalid_argument("cross_validate: need at least 1 repeat");
  if (classifier_name.empty()) classifier_name = std::string(to_string(cfg.rule));

  const bool tunable = uses_kpc(cfg.rule);
  switch (tunable ? opts.kpc.selection : KpcSelection::fixed) {
    case KpcSelection::fixed:
      return run_cv(d, cfg, opts, classifier_name, false);
    case KpcSelection::nested:
      return run_cv(d, cfg, opts, classifier_name, true);
    case KpcSelection::optimistic: {
      // Smallest training fold bounds which grid values can run.
      const std::size_t min_train = d.size() - (d.size() + opts.n_folds - 1) / opts.n_folds;
      const auto counts = d.class_counts();
      std::vector<std::size_t> grid;
      for (std::size_t kpc : opts.kpc.grid) {
        if (kpc < 1) continue;
        if (cfg.rule == Rule::cap) {
          const std::size_t min_class = *std::min_element(counts.begin(), counts.end());
          if (kpc <= min_class - (min_class + opts.n_folds - 1) / opts.n_folds) grid.push_back(kpc);
        } else if (kpc * d.n_classes() <= min_train) {
          grid.push_back(kpc);
        }
      }
      if (grid.empty()) throw Error("optimistic kpc selection: no feasible grid value");
      std::vector<RunRow> best;
      double best_amr = std::numeric_limits<double>::infinity();
      for (std::size_t kpc : grid) {
        DecisionRuleConfig c = cfg;
        c.kpc = kpc;
        auto rows = run_cv(d, c, opts, classifier_name, false);
        double amr = 0.0;
        for (const auto& row : rows) amr += row.mr;
        amr /= static_cast<double>(rows.size());
        if (amr < best_amr) {
          best_amr = amr;
          best = std::move(rows);
        }
      }
      return best;
    }
  }
  throw std::logic_error("unknown kpc selection");
}

}  // namespace ldknn
