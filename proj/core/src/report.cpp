#include "ldknn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ldknn/errors.hpp"

namespace ldknn {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

template <typename T>
std::size_t index_of(std::vector<T>& items, const T& item) {
  auto it = std::find(items.begin(), items.end(), item);
  if (it != items.end()) return static_cast<std::size_t>(it - items.begin());
  items.push_back(item);
  return items.size() - 1;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("aggregate CSV: bad number '" + s + "' on line " + std::to_string(line_no),
                    line_no);
  }
  return v;
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& runs) {
  std::vector<std::string> datasets;
  std::vector<std::pair<std::size_t, std::string>> cells;  // (dataset, classifier)
  struct Sum {
    double mr = 0.0, f1 = 0.0;
    std::size_t n = 0;
  };
  std::vector<Sum> sums;
  for (const RunRow& r : runs) {
    const std::size_t d = index_of(datasets, r.dataset);
    const std::size_t c = index_of(cells, {d, r.classifier});
    if (c >= sums.size()) sums.resize(c + 1);
    sums[c].mr += r.mr;
    sums[c].f1 += r.f1;
    ++sums[c].n;
  }

  std::vector<AggregateRow> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double n = static_cast<double>(sums[c].n);
    out.push_back({datasets[cells[c].first], cells[c].second, sums[c].mr / n, sums[c].f1 / n});
  }
  for (const auto& name : datasets) {
    std::vector<std::size_t> idx;
    std::vector<double> amr, af1;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].dataset != name) continue;
      idx.push_back(i);
      amr.push_back(out[i].amr);
      af1.push_back(out[i].af1);
    }
    const auto ra = average_ranks(amr, true);
    const auto rf = average_ranks(af1, false);
    for (std::size_t t = 0; t < idx.size(); ++t) {
      out[idx[t]].rank_amr = ra[t];
      out[idx[t]].rank_af1 = rf[t];
    }
  }
  return out;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs) {
  out << "dataset,classifier,repeat,fold,mr,f1\n";
  for (const RunRow& r : runs) {
    out << r.dataset << ',' << r.classifier << ',' << r.repeat << ',' << r.fold << ','
        << fixed6(r.mr) << ',' << fixed6(r.f1) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "dataset,classifier,amr,af1,rank_amr,rank_af1\n";
  for (const AggregateRow& r : rows) {
    out << r.dataset << ',' << r.classifier << ',' << fixed6(r.amr) << ',' << fixed6(r.af1) << ','
        << fixed6(r.rank_amr) << ',' << fixed6(r.rank_af1) << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::vector<AggregateRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("dataset,classifier", 0) == 0) continue;
    const auto f = split(line);
    if (f.size() != 6) {
      throw DataError("aggregate CSV: expected 6 fields on line " + std::to_string(line_no),
                      line_no);
    }
    rows.push_back({f[0], f[1], to_double(f[2], line_no), to_double(f[3], line_no),
                    to_double(f[4], line_no), to_double(f[5], line_no)});
  }
  return rows;
}

ComparisonTable build_comparison(const std::vector<AggregateRow>& rows) {
  ComparisonTable t;
  std::map<std::pair<std::string, std::string>, const AggregateRow*> cell;
  std::vector<std::string> all_classifiers;
  for (const auto& r : rows) {
    index_of(t.datasets, r.dataset);
    index_of(all_classifiers, r.classifier);
    cell[{r.dataset, r.classifier}] = &r;
  }
  for (const auto& c : all_classifiers) {
    const bool everywhere = std::all_of(t.datasets.begin(), t.datasets.end(), [&](const auto& d) {
      return cell.count({d, c}) > 0;
    });
    if (everywhere) t.classifiers.push_back(c);
  }
  t.amr = Matrix(t.datasets.size(), t.classifiers.size());
  t.af1 = Matrix(t.datasets.size(), t.classifiers.size());
  for (std::size_t i = 0; i < t.datasets.size(); ++i) {
    for (std::size_t j = 0; j < t.classifiers.size(); ++j) {
      const AggregateRow* r = cell.at({t.datasets[i], t.classifiers[j]});
      t.amr(i, j) = r->amr;
      t.af1(i, j) = r->af1;
    }
  }
  return t;
}

namespace {

MetricStatistics metric_statistics(const Matrix& values, bool lower_is_better,
                                   std::size_t control) {
  MetricStatistics s;
  s.ranks = rank_rows(values, lower_is_better);
  s.mean_ranks = mean_ranks(s.ranks);
  try {
    s.friedman = friedman_statistic(s.ranks);
    s.bd = bonferroni_dunn(s.mean_ranks, values.rows(), control);
  } catch (const std::exception& e) {
    s.friedman.reset();
    s.bd.reset();
    s.friedman_error = e.what();
  }
  return s;
}

}  // namespace

StatisticsReport compute_statistics(const ComparisonTable& table, const std::string& control) {
  if (table.classifiers.size() < 2) {
    throw ConfigError("statistics need at least 2 classifiers common to every dataset");
  }
  const auto it = std::find(table.classifiers.begin(), table.classifiers.end(), control);
  if (it == table.classifiers.end()) {
    std::string names;
    for (const auto& c : table.classifiers) names += (names.empty() ? "" : ", ") + c;
    throw ConfigError("control classifier '" + control + "' not found; available: " + names);
  }
  StatisticsReport r;
  r.table = table;
  r.control = static_cast<std::size_t>(it - table.classifiers.begin());
  r.amr = metric_statistics(table.amr, true, r.control);
  r.af1 = metric_statistics(table.af1, false, r.control);
  r.robustness = robustness_ratios(table.amr);
  for (std::size_t j = 0; j < table.classifiers.size(); ++j) {
    std::vector<double> col;
    for (std::size_t i = 0; i < table.datasets.size(); ++i) col.push_back(r.robustness.ratios(i, j));
    r.robustness_summary.push_back(quartiles(col));
  }
  return r;
}

void write_ranks_csv(std::ostream& out, const StatisticsReport& r) {
  out << "dataset,classifier,rank_amr,rank_af1\n";
  for (std::size_t i = 0; i < r.table.datasets.size(); ++i) {
    for (std::size_t j = 0; j < r.table.classifiers.size(); ++j) {
      out << r.table.datasets[i] << ',' << r.table.classifiers[j] << ',' << fixed6(r.amr.ranks(i, j))
          << ',' << fixed6(r.af1.ranks(i, j)) << '\n';
    }
  }
}

void write_tests_csv(std::ostream& out, const StatisticsReport& r) {
  out << "metric,n_datasets,n_classifiers,friedman,df,critical_value,significant,"
         "critical_difference\n";
  auto line = [&](const char* metric, const MetricStatistics& s) {
    out << metric << ',' << r.table.datasets.size() << ',' << r.table.classifiers.size() << ',';
    if (s.friedman) {
      out << fixed6(s.friedman->statistic) << ',' << s.friedman->df << ','
          << fixed6(s.friedman->critical_value) << ',' << (s.friedman->significant ? 1 : 0) << ','
          << fixed6(s.bd->critical_difference) << '\n';
    } else {
      out << ",,,,\n";
    }
  };
  line("amr", r.amr);
  line("af1", r.af1);
}

void write_classifier_csv(std::ostream& out, const StatisticsReport& r) {
  out << "classifier,mean_rank_amr,mean_rank_af1,significant_amr,significant_af1,r_min,r_q1,"
         "r_median,r_q3,r_max\n";
  for (std::size_t j = 0; j < r.table.classifiers.size(); ++j) {
    auto sig = [&](const MetricStatistics& s) -> std::string {
      if (!s.bd) return "";
      return s.bd->significant[j] ? "1" : "0";
    };
    const Quartiles& q = r.robustness_summary[j];
    out << r.table.classifiers[j] << ',' << fixed6(r.amr.mean_ranks[j]) << ','
        << fixed6(r.af1.mean_ranks[j]) << ',' << sig(r.amr) << ',' << sig(r.af1) << ','
        << fixed6(q.min) << ',' << fixed6(q.q1) << ',' << fixed6(q.median) << ',' << fixed6(q.q3)
        << ',' << fixed6(q.max) << '\n';
  }
}

void write_robustness_csv(std::ostream& out, const StatisticsReport& r) {
  out << "dataset,classifier,r_m,floored\n";
  for (std::size_t i = 0; i < r.table.datasets.size(); ++i) {
    for (std::size_t j = 0; j < r.table.classifiers.size(); ++j) {
      out << r.table.datasets[i] << ',' << r.table.classifiers[j] << ','
          << fixed6(r.robustness.ratios(i, j)) << ',' << (r.robustness.floored_rows[i] ? 1 : 0)
          << '\n';
    }
  }
}

void write_statistics_markdown(std::ostream& out, const StatisticsReport& r) {
  const auto& cls = r.table.classifiers;
  out << "# Classifier comparison\n\n";
  out << r.table.datasets.size() << " datasets, " << cls.size() << " classifiers, control `"
      << cls[r.control] << "`.\n\n";

  auto tests = [&](const char* title, const MetricStatistics& s) {
    out << "## " << title << "\n\n";
    if (!s.friedman) {
      out << "Friedman test not run: " << s.friedman_error << "\n\n";
    } else {
      out << "Friedman chi2 = " << fixed(s.friedman->statistic, 2) << ", df = " << s.friedman->df
          << ", critical value (0.05) = " << fixed(s.friedman->critical_value, 2) << " -> "
          << (s.friedman->significant ? "significant" : "not significant") << ".\n\n";
      out << "Bonferroni-Dunn critical difference (0.05) = " << fixed(s.bd->critical_difference, 3)
          << ".\n\n";
    }
    out << "| Classifier | Mean rank | Differs from control |\n|---|---|---|\n";
    for (std::size_t j = 0; j < cls.size(); ++j) {
      out << "| " << cls[j] << " | " << fixed(s.mean_ranks[j], 2) << " | ";
      if (j == r.control) {
        out << "control";
      } else if (s.bd) {
        out << (s.bd->significant[j] ? "yes" : "no");
      } else {
        out << "n/a";
      }
      out << " |\n";
    }
    out << '\n';
  };
  tests("AMR", r.amr);
  tests("AF1", r.af1);

  out << "## Robustness ratio r_m (error / best error per dataset)\n\n";
  out << "| Classifier | min | q1 | median | q3 | max |\n|---|---|---|---|---|---|\n";
  for (std::size_t j = 0; j < cls.size(); ++j) {
    const Quartiles& q = r.robustness_summary[j];
    out << "| " << cls[j] << " | " << fixed(q.min, 3) << " | " << fixed(q.q1, 3) << " | "
        << fixed(q.median, 3) << " | " << fixed(q.q3, 3) << " | " << fixed(q.max, 3) << " |\n";
  }
  std::size_t floored = 0;
  for (bool f : r.robustness.floored_rows) floored += f;
  if (floored > 0) {
    out << "\n" << floored << " dataset(s) had a zero best error; ratios there use a floored "
        << "denominator.\n";
  }
}

void write_summary_markdown(std::ostream& out, const std::vector<AggregateRow>& rows,
                            const std::vector<std::string>& errors) {
  std::vector<std::string> datasets, classifiers;
  std::map<std::pair<std::string, std::string>, const AggregateRow*> cell;
  for (const auto& r : rows) {
    index_of(datasets, r.dataset);
    index_of(classifiers, r.classifier);
    cell[{r.dataset, r.classifier}] = &r;
  }

  out << "# Cross-validation summary\n\n";
  if (!rows.empty()) {
    out << "| Dataset |";
    for (const auto& c : classifiers) out << ' ' << c << " |";
    out << "\n|---|";
    for (std::size_t j = 0; j < classifiers.size(); ++j) out << "---|";
    out << '\n';

    auto block = [&](const char* title, bool amr) {
      out << "| **" << title << "** |";
      for (std::size_t j = 0; j < classifiers.size(); ++j) out << " |";
      out << '\n';
      for (const auto& d : datasets) {
        double best = amr ? 1e300 : -1e300;
        for (const auto& c : classifiers) {
          if (auto it = cell.find({d, c}); it != cell.end()) {
            best = amr ? std::min(best, it->second->amr) : std::max(best, it->second->af1);
          }
        }
        out << "| " << d << " |";
        for (const auto& c : classifiers) {
          auto it = cell.find({d, c});
          if (it == cell.end()) {
            out << " - |";
            continue;
          }
          const double v = amr ? it->second->amr : it->second->af1;
          const std::string text = amr ? fixed(100.0 * v, 2) : fixed(v, 4);
          out << ' ' << (v == best ? "**" + text + "**" : text) << " |";
        }
        out << '\n';
      }
    };
    block("AMR (%)", true);
    block("AF1", false);
  }
  if (!errors.empty()) {
    out << "\n## Errors\n\n";
    for (const auto& e : errors) out << "- " << e << '\n';
  }
}

}  // namespace ldknn
