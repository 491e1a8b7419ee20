#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "ldknn/crossval.hpp"
#include "ldknn/errors.hpp"
#include "ldknn/metrics.hpp"
#include "ldknn/report.hpp"
#include "ldknn/rng.hpp"
#include "ldknn/stats.hpp"
#include "oracles.hpp"

using namespace ldknn;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

std::vector<std::vector<double>> random_rank_table(std::mt19937_64& gen, std::size_t n, std::size_t k) {
  std::uniform_int_distribution<int> score(0, 5);
  std::vector<std::vector<double>> ranks;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(k);
    for (auto& v : row) v = score(gen);
    ranks.push_back(oracle::ranks_of(row));
  }
  return ranks;
}

Dataset iris() { return load_csv(std::filesystem::path(LDKNN_DATA_DIR) / "iris.csv"); }

}  // namespace

TEST_CASE("misclassification rate examples") {
  const std::vector<ClassIndex> actual{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<ClassIndex> pred = actual;
  CHECK(misclassification_rate(pred, actual) == 0.0);
  for (auto& p : pred) p = 1 - p;
  CHECK(misclassification_rate(pred, actual) == 1.0);
  pred = actual;
  pred[0] = 1;
  pred[3] = 0;
  pred[9] = 0;
  CHECK(misclassification_rate(pred, actual) == doctest::Approx(0.3));
  CHECK_THROWS(misclassification_rate(std::vector<ClassIndex>{0}, actual));
  CHECK_THROWS(misclassification_rate(std::vector<ClassIndex>{}, std::vector<ClassIndex>{}));
}

TEST_CASE("macro F1 examples") {
  const std::vector<ClassIndex> actual{0, 0, 1, 1};
  CHECK(macro_f1(actual, actual, 2) == 1.0);
  const std::vector<ClassIndex> all_zero{0, 0, 0, 0};
  // Class 0: TP 2, FP 2, FN 0 -> 4/6. Class 1: TP 0 -> 0.
  CHECK(macro_f1(all_zero, actual, 2) == doctest::Approx((2.0 / 3.0 + 0.0) / 2.0));
  CHECK(macro_f1(actual, actual, 3) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS(macro_f1(all_zero, std::vector<ClassIndex>{0}, 2));
}

TEST_CASE("average ranks share tied positions") {
  const std::vector<double> v{0.1, 0.3, 0.1, 0.2};
  CHECK(average_ranks(v, true) == std::vector<double>{1.5, 4.0, 1.5, 3.0});
  CHECK(average_ranks(v, false) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("Friedman boundary cases") {
  for (std::size_t k : {2u, 3u, 5u}) {
    for (std::size_t n : {2u, 4u, 9u}) {
      std::vector<std::vector<double>> same(n);
      for (auto& row : same) {
        row.resize(k);
        std::iota(row.begin(), row.end(), 1.0);
      }
      const auto r = friedman_statistic(to_matrix(same));
      CHECK(r.statistic == doctest::Approx(double(n) * double(k - 1)));
      CHECK(r.df == k - 1);

      std::vector<std::vector<double>> tied(n, std::vector<double>(k, (k + 1) / 2.0));
      CHECK(friedman_statistic(to_matrix(tied)).statistic == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("identical ranks give the largest statistic over all rank tables") {
  // Every table of permutations for N = 2, k = 3.
  std::vector<std::vector<double>> perms;
  std::vector<double> p{1, 2, 3};
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  double best = 0.0;
  for (const auto& a : perms) {
    for (const auto& b : perms) best = std::max(best, friedman_statistic(to_matrix({a, b})).statistic);
  }
  const auto constant = friedman_statistic(to_matrix({{1, 2, 3}, {1, 2, 3}}));
  CHECK(constant.statistic == doctest::Approx(best));
}

TEST_CASE("Friedman matches the rank-sum formula on a hand-built table") {
  const std::vector<std::vector<double>> ranks{{1, 2, 3, 4}, {2, 1, 4, 3}, {1, 3, 2, 4},
                                               {1.5, 1.5, 3, 4}, {2, 1, 3, 4}, {1, 2, 4, 3}};
  const auto r = friedman_statistic(to_matrix(ranks));
  CHECK(r.statistic == doctest::Approx(oracle::friedman_textbook(ranks)).epsilon(1e-12));
  CHECK(r.df == 3);
  CHECK(r.critical_value == doctest::Approx(7.8147).epsilon(1e-4));
}

TEST_CASE("property: Friedman on random tables and under column relabeling") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 30;
    const std::size_t k = 2 + gen() % 12;
    auto ranks = random_rank_table(gen, n, k);
    const auto r = friedman_statistic(to_matrix(ranks));
    CHECK(std::abs(r.statistic - oracle::friedman_textbook(ranks)) < 1e-9);

    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    for (auto& row : ranks) {
      std::vector<double> moved(k);
      for (std::size_t j = 0; j < k; ++j) moved[j] = row[perm[j]];
      row = moved;
    }
    CHECK(std::abs(friedman_statistic(to_matrix(ranks)).statistic - r.statistic) < 1e-9);
  }
}

TEST_CASE("twelve classifiers use df 11 and critical value 19.68") {
  std::mt19937_64 gen(4);
  const auto r = friedman_statistic(to_matrix(random_rank_table(gen, 27, 12)));
  CHECK(r.df == 11);
  CHECK(std::round(r.critical_value * 100.0) / 100.0 == 19.68);
  CHECK(r.significant == (r.statistic > r.critical_value));
}

TEST_CASE("Friedman rejects degenerate shapes") {
  CHECK_THROWS(friedman_statistic(to_matrix({{1, 2, 3}})));
  CHECK_THROWS(friedman_statistic(to_matrix({{1}, {1}})));
  CHECK_THROWS(chi_square_critical_05(0));
}

TEST_CASE("Bonferroni-Dunn examples") {
  const std::vector<double> equal{2.0, 2.0, 2.0};
  const auto none = bonferroni_dunn(equal, 10, 0);
  for (bool s : none.significant) CHECK_FALSE(s);

  const double cd2 = bonferroni_dunn_q(2) * std::sqrt(2.0 * 3.0 / (6.0 * 10.0));
  const std::vector<double> gap{1.0, 1.0 + 10.0 * cd2};
  const auto sig = bonferroni_dunn(gap, 10, 0);
  CHECK(sig.critical_difference == doctest::Approx(cd2));
  CHECK(sig.significant[1]);
  CHECK_FALSE(sig.significant[0]);

  CHECK_THROWS(bonferroni_dunn_q(21));
  CHECK_THROWS(bonferroni_dunn_q(1));
}

TEST_CASE("Bonferroni-Dunn critical difference for k=12, N=27") {
  const double alpha = 0.05;
  const std::size_t k = 12, n = 27;
  const double q = oracle::normal_quantile(1.0 - alpha / (2.0 * (k - 1)));
  const double cd = q * std::sqrt(k * (k + 1.0) / (6.0 * n));
  CHECK(bonferroni_dunn_q(k, alpha) == doctest::Approx(q).epsilon(1e-5));
  std::vector<double> ranks(k, 6.5);
  CHECK(bonferroni_dunn(ranks, n, 0, alpha).critical_difference == doctest::Approx(cd).epsilon(1e-5));
  CHECK(cd == doctest::Approx(2.78455).epsilon(1e-5));

  for (std::size_t kk = 2; kk <= 20; ++kk) {
    CHECK(bonferroni_dunn_q(kk, 0.10) ==
          doctest::Approx(oracle::normal_quantile(1.0 - 0.10 / (2.0 * (kk - 1)))).epsilon(1e-5));
  }
}

TEST_CASE("robustness ratio examples") {
  const auto r = robustness_ratios(to_matrix({{0.1, 0.2}}));
  CHECK(r.ratios(0, 0) == 1.0);
  CHECK(r.ratios(0, 1) == doctest::Approx(2.0));
  CHECK(r.floored_rows == std::vector<bool>{false});

  const auto zero = robustness_ratios(to_matrix({{0.0, 0.05}, {0.3, 0.2}}));
  CHECK(zero.floored_rows == std::vector<bool>{true, false});
  CHECK(zero.ratios(0, 0) == 1.0);
  CHECK(zero.ratios(0, 1) == doctest::Approx(0.05 / kErrorFloor));
  CHECK_THROWS(robustness_ratios(Matrix{}));
}

TEST_CASE("property: robustness row minimum is exactly one") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> rows(1 + gen() % 20, std::vector<double>(2 + gen() % 10));
    for (auto& row : rows) {
      for (auto& v : row) v = gen() % 7 == 0 ? 0.0 : u(gen);
    }
    const auto r = robustness_ratios(to_matrix(rows));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto argmin = std::min_element(rows[i].begin(), rows[i].end()) - rows[i].begin();
      CHECK(r.ratios(i, argmin) == 1.0);
      for (std::size_t j = 0; j < rows[i].size(); ++j) CHECK(r.ratios(i, j) >= 1.0);
    }
  }
}

TEST_CASE("quartiles use linear interpolation") {
  const auto q = quartiles({4, 1, 3, 2, 5});
  CHECK(q.min == 1);
  CHECK(q.q1 == 2);
  CHECK(q.median == 3);
  CHECK(q.q3 == 4);
  CHECK(q.max == 5);
  CHECK(quartiles({1, 2}).median == 1.5);
}

TEST_CASE("cross validation is deterministic and covers every sample once per repeat") {
  const auto d = oracle::random_blobs(3, 17, 2, 2.0, 6);
  DecisionRuleConfig cfg;
  cfg.rule = Rule::ld_gme;
  cfg.kpc = 3;
  CvOptions opts;
  opts.n_folds = 4;
  opts.n_repeats = 2;
  opts.seed = 99;
  const auto a = cross_validate(d, cfg, opts, "LD");
  CHECK(a == cross_validate(d, cfg, opts, "LD"));
  REQUIRE(a.size() == 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].repeat == i / 4);
    CHECK(a[i].fold == i % 4);
    CHECK(a[i].classifier == "LD");
    CHECK(a[i].dataset == "fixture");
    CHECK(a[i].mr >= 0.0);
    CHECK(a[i].mr <= 1.0);
    CHECK(a[i].f1 >= 0.0);
    CHECK(a[i].f1 <= 1.0);
    CHECK(a[i].kpc == 3);
  }
  for (std::size_t r = 0; r < 2; ++r) {
    const auto plan = make_stratified_folds(d, 4, derive_seed(99, r));
    std::vector<int> seen(d.size(), 0);
    for (std::size_t f = 0; f < 4; ++f) {
      for (std::size_t i : plan.test_indices(f)) seen[i]++;
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }

  opts.threads = 3;
  CHECK(a == cross_validate(d, cfg, opts, "LD"));
  opts.scope = NormalizationScope::train_fold;
  const auto fold_scope = cross_validate(d, cfg, opts, "LD");
  CHECK(fold_scope.size() == 8);
}

TEST_CASE("cross validation MR equals one minus accuracy on each fold") {
  const auto d = oracle::random_blobs(2, 20, 2, 1.0, 7);
  DecisionRuleConfig cfg;
  cfg.rule = Rule::v_knn;
  cfg.kpc = 2;
  CvOptions opts;
  opts.n_repeats = 1;
  opts.seed = 3;
  opts.scope = NormalizationScope::train_fold;
  const auto rows = cross_validate(d, cfg, opts);
  const auto plan = make_stratified_folds(d, 5, derive_seed(3, 0));
  for (std::size_t f = 0; f < 5; ++f) {
    const auto train = d.subset(plan.train_indices(f));
    const auto test = d.subset(plan.test_indices(f));
    const auto p = fit_zscore(train);
    const auto ztrain = apply_zscore(train, p);
    const auto ztest = apply_zscore(test, p);
    const Classifier c(ztrain, cfg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ztest.size(); ++i) {
      if (c.classify(ztest.row(i)).predicted == ztest.labels[i]) ++correct;
    }
    const double accuracy = double(correct) / double(ztest.size());
    CHECK(rows[f].mr + accuracy == doctest::Approx(1.0));
  }
}

TEST_CASE("cross validation errors name the repeat and fold") {
  const auto d = oracle::random_blobs(2, 10, 2, 1.0, 8);
  DecisionRuleConfig cfg;
  cfg.rule = Rule::cap;
  cfg.kpc = 9;
  CvOptions opts;
  opts.n_repeats = 1;
  CHECK_THROWS_WITH(cross_validate(d, cfg, opts), doctest::Contains("repeat 0, fold 0"));
}

TEST_CASE("kpc selection modes") {
  const auto d = iris();
  DecisionRuleConfig cfg;
  cfg.rule = Rule::ld_gme;
  CvOptions opts;
  opts.n_repeats = 2;
  opts.seed = 1;
  opts.kpc.selection = KpcSelection::nested;
  const auto nested = cross_validate(d, cfg, opts);
  for (const auto& r : nested) CHECK(std::find(opts.kpc.grid.begin(), opts.kpc.grid.end(), r.kpc) != opts.kpc.grid.end());

  opts.kpc.selection = KpcSelection::optimistic;
  const auto optimistic = cross_validate(d, cfg, opts);
  std::set<std::size_t> used;
  for (const auto& r : optimistic) used.insert(r.kpc);
  CHECK(used.size() == 1);

  const auto small = oracle::random_blobs(2, 4, 2, 1.0, 2);
  CHECK(feasible_kpcs(small, Rule::v_knn, {1, 2, 3, 4, 5}) == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(feasible_kpcs(small, Rule::cap, {1, 4, 5}) == std::vector<std::size_t>{1, 4});
  CHECK(parse_kpc_selection("nested") == KpcSelection::nested);
  CHECK(parse_scope("train_fold") == NormalizationScope::train_fold);
}

TEST_CASE("Iris: tuned LD_GME and V-kNN land in the expected error band") {
  const auto d = iris();
  CvOptions opts;
  opts.seed = 2024;
  opts.kpc.selection = KpcSelection::nested;
  for (auto rule : {Rule::ld_gme, Rule::v_knn}) {
    DecisionRuleConfig cfg;
    cfg.rule = rule;
    const auto rows = cross_validate(d, cfg, opts);
    double amr = 0.0;
    for (const auto& r : rows) amr += r.mr;
    amr /= static_cast<double>(rows.size());
    CHECK(amr >= 0.025);
    CHECK(amr <= 0.055);
  }
}

TEST_CASE("aggregate ranks sum to k(k+1)/2") {
  std::vector<RunRow> runs;
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0, 0.3);
  for (const char* ds : {"d1", "d2", "d3"}) {
    for (const char* cl : {"A", "B", "C", "D"}) {
      for (std::size_t f = 0; f < 3; ++f) {
        const double mr = std::round(u(gen) * 10) / 10;
        runs.push_back({ds, cl, 0, f, mr, 1.0 - mr, 1});
      }
    }
  }
  const auto agg = aggregate(runs);
  REQUIRE(agg.size() == 12);
  CHECK(agg[0].dataset == "d1");
  CHECK(agg[0].classifier == "A");
  for (std::size_t d = 0; d < 3; ++d) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      s1 += agg[d * 4 + c].rank_amr;
      s2 += agg[d * 4 + c].rank_af1;
    }
    CHECK(s1 == doctest::Approx(10.0));
    CHECK(s2 == doctest::Approx(10.0));
  }

  std::ostringstream out;
  write_aggregate_csv(out, agg);
  std::istringstream in(out.str());
  const auto back = read_aggregate_csv(in);
  REQUIRE(back.size() == agg.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    CHECK(back[i].classifier == agg[i].classifier);
    CHECK(back[i].amr == doctest::Approx(agg[i].amr).epsilon(1e-6));
  }
}

TEST_CASE("per-run csv uses six decimals") {
  std::ostringstream out;
  write_runs_csv(out, {{"iris", "LD_GME", 1, 2, 1.0 / 3.0, 0.5, 3}});
  CHECK(out.str() == "dataset,classifier,repeat,fold,mr,f1\niris,LD_GME,1,2,0.333333,0.500000\n");
}

TEST_CASE("statistics pipeline") {
  std::vector<AggregateRow> rows;
  for (int d = 0; d < 5; ++d) {
    for (int c = 0; c < 3; ++c) {
      rows.push_back({"d" + std::to_string(d), "c" + std::to_string(c), 0.1 * (c + 1) + 0.01 * d,
                      0.9 - 0.1 * c, 0, 0});
    }
  }
  rows.push_back({"d0", "lonely", 0.0, 1.0, 0, 0});
  const auto table = build_comparison(rows);
  CHECK(table.classifiers == std::vector<std::string>{"c0", "c1", "c2"});
  CHECK(table.datasets.size() == 5);

  const auto report = compute_statistics(table, "c0");
  for (std::size_t d = 0; d < 5; ++d) CHECK(report.amr.ranks(d, 0) == 1.0);
  REQUIRE(report.amr.friedman);
  CHECK(report.amr.friedman->statistic == doctest::Approx(10.0));
  CHECK_THROWS_WITH_AS(compute_statistics(table, "nope"), doctest::Contains("c0, c1, c2"), ConfigError);

  std::ostringstream ranks, tests, classifiers, robust, md;
  write_ranks_csv(ranks, report);
  write_tests_csv(tests, report);
  write_classifier_csv(classifiers, report);
  write_robustness_csv(robust, report);
  write_statistics_markdown(md, report);
  CHECK(ranks.str().find("d0") != std::string::npos);
  CHECK(tests.str().find("friedman") != std::string::npos);
  CHECK(md.str().find("Friedman") != std::string::npos);
}
