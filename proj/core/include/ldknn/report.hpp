#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldknn/crossval.hpp"
#include "ldknn/data.hpp"
#include "ldknn/stats.hpp"

namespace ldknn {

struct AggregateRow {
  std::string dataset;
  std::string classifier;
  double amr = 0.0;
  double af1 = 0.0;
  double rank_amr = 0.0;
  double rank_af1 = 0.0;
};

/// Averages run rows per (dataset, classifier) and ranks classifiers within
/// each dataset (AMR ascending, AF1 descending, ties averaged). Output order
/// follows first appearance in `runs`.
std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs);

/// dataset,classifier,repeat,fold,mr,f1 with metrics to 6 decimals.
void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs);
/// dataset,classifier,amr,af1,rank_amr,rank_af1.
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(std::istream& in);

/// Markdown table: datasets as rows, classifiers as columns, AMR (%) in the
/// upper block and AF1 in the lower block, best entry per row in bold.
/// Failed cells are listed in an "Errors" section.
void write_summary_markdown(std::ostream& out, const std::vector<AggregateRow>& rows,
                            const std::vector<std::string>& errors = {});

/// AMR and AF1 arranged datasets x classifiers, restricted to classifiers
/// present for every dataset.
struct ComparisonTable {
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers;
  Matrix amr;
  Matrix af1;
};

ComparisonTable build_comparison(const std::vector<AggregateRow>& rows);

struct MetricStatistics {
  Matrix ranks;
  std::vector<double> mean_ranks;
  std::optional<FriedmanResult> friedman;      // absent when fewer than 2 datasets
  std::optional<BonferroniDunnResult> bd;      // absent when Friedman is absent
  std::string friedman_error;
};

struct StatisticsReport {
  ComparisonTable table;
  std::size_t control = 0;
  MetricStatistics amr;
  MetricStatistics af1;
  RobustnessResult robustness;
  std::vector<Quartiles> robustness_summary;  // per classifier
};

/// Friedman, Bonferroni-Dunn against `control` and robustness ratios for
/// both metrics. Throws ConfigError listing the available names when
/// `control` is unknown.
StatisticsReport compute_statistics(const ComparisonTable& table, const std::string& control);

/// dataset,classifier,rank_amr,rank_af1
void write_ranks_csv(std::ostream& out, const StatisticsReport& report);
/// metric,n_datasets,n_classifiers,friedman,df,critical_value,significant,critical_difference
void write_tests_csv(std::ostream& out, const StatisticsReport& report);
/// classifier,mean_rank_amr,mean_rank_af1,significant_amr,significant_af1,
/// r_min,r_q1,r_median,r_q3,r_max
void write_classifier_csv(std::ostream& out, const StatisticsReport& report);
/// dataset,classifier,r_m,floored: the per-dataset ratios behind a box plot.
void write_robustness_csv(std::ostream& out, const StatisticsReport& report);
void write_statistics_markdown(std::ostream& out, const StatisticsReport& report);

}  // namespace ldknn
