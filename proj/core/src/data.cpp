#include "ldknn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ldknn/errors.hpp"
#include "ldknn/rng.hpp"

namespace ldknn {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw std::invalid_argument("Matrix::append_row: expected " + std::to_string(cols_) +
                                " values, got " + std::to_string(values.size()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_set.size(), 0);
  for (ClassIndex c : labels) ++counts[c];
  return counts;
}

std::vector<std::vector<std::size_t>> Dataset::class_members() const {
  std::vector<std::vector<std::size_t>> members(class_set.size());
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  return members;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.name = name;
  out.class_set = class_set;
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.features.append_row(features.row(i));
    out.labels.push_back(labels[i]);
  }
  if (indices.empty()) out.features = Matrix(0, dims());
  return out;
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw DataError("dataset '" + name + "': " + std::to_string(features.rows()) +
                    " feature rows but " + std::to_string(labels.size()) + " labels");
  }
  if (class_set.size() < 2) {
    throw DataError("dataset '" + name + "': need at least 2 classes, found " +
                    std::to_string(class_set.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= class_set.size()) {
      throw DataError("dataset '" + name + "': label index out of range", i + 1);
    }
    for (std::size_t j = 0; j < features.cols(); ++j) {
      if (!std::isfinite(features(i, j))) {
        throw DataError("dataset '" + name + "': non-finite value", i + 1, j + 1);
      }
    }
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvSchema& schema, std::string name) {
  Dataset d;
  d.name = std::move(name);
  std::unordered_map<std::string, ClassIndex> class_ids;

  std::string line;
  std::size_t line_no = 0;
  std::size_t n_fields = 0;
  std::size_t label_col = 0;
  bool first_record = true;
  std::vector<double> values;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);

    if (first_record) {
      n_fields = fields.size();
      if (n_fields < 2) {
        throw DataError("need at least one feature column and a label column", line_no);
      }
      const int n = static_cast<int>(n_fields);
      const int col = schema.label_column < 0 ? n + schema.label_column : schema.label_column;
      if (col < 0 || col >= n) {
        throw DataError("label column " + std::to_string(schema.label_column) +
                        " out of range for " + std::to_string(n_fields) + " columns",
                        line_no);
      }
      label_col = static_cast<std::size_t>(col);
    } else if (fields.size() != n_fields) {
      throw DataError("expected " + std::to_string(n_fields) + " fields, found " +
                          std::to_string(fields.size()) + " at row " + std::to_string(line_no),
                      line_no);
    }

    if (first_record) {
      first_record = false;
      bool is_header = schema.header == HeaderMode::present;
      if (schema.header == HeaderMode::automatic) {
        for (std::size_t j = 0; j < n_fields; ++j) {
          if (j != label_col && !parse_double(fields[j])) {
            is_header = true;
            break;
          }
        }
      }
      if (is_header) continue;
    }

    values.clear();
    for (std::size_t j = 0; j < n_fields; ++j) {
      if (j == label_col) continue;
      const auto v = parse_double(fields[j]);
      if (!v) {
        throw DataError("cannot parse '" + fields[j] + "' as a number at " +
                            location(line_no, j + 1),
                        line_no, j + 1);
      }
      if (!std::isfinite(*v)) {
        throw DataError("non-finite value '" + fields[j] + "' at " + location(line_no, j + 1),
                        line_no, j + 1);
      }
      values.push_back(*v);
    }
    const std::string& label = fields[label_col];
    if (label.empty()) {
      throw DataError("empty label at " + location(line_no, label_col + 1), line_no,
                      label_col + 1);
    }
    auto [it, inserted] = class_ids.try_emplace(label, d.class_set.size());
    if (inserted) d.class_set.push_back(label);
    d.labels.push_back(it->second);
    d.features.append_row(values);
  }

  if (d.labels.empty()) throw DataError("no data rows");
  if (d.class_set.size() < 2) {
    throw DataError("need at least 2 classes, found " + std::to_string(d.class_set.size()));
  }
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    return parse_csv(in, schema, path.stem().string());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), e.row(), e.column());
  }
}

namespace {

void write_number(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

}  // namespace

void write_csv(std::ostream& out, const Dataset& d, bool header) {
  if (header) {
    for (std::size_t j = 0; j < d.dims(); ++j) out << 'x' << (j + 1) << ',';
    out << "label\n";
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.row(i)) {
      write_number(out, v);
      out << ',';
    }
    out << d.class_set[d.labels[i]] << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& d, bool header) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_csv(out, d, header);
}

NormalizationParams fit_zscore(const Dataset& d) {
  const std::size_t n = d.size();
  if (n < 2) throw std::invalid_argument("fit_zscore: need at least 2 samples");
  NormalizationParams p;
  p.means.assign(d.dims(), 0.0);
  p.std_devs.assign(d.dims(), 0.0);
  for (std::size_t j = 0; j < d.dims(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += d.features(i, j);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = d.features(i, j) - mean;
      ss += dev * dev;
    }
    p.means[j] = mean;
    p.std_devs[j] = std::max(std::sqrt(ss / static_cast<double>(n - 1)), kStdDevFloor);
  }
  return p;
}

namespace {

void check_dims(const Dataset& d, const NormalizationParams& p, const char* who) {
  if (p.means.size() != d.dims() || p.std_devs.size() != d.dims()) {
    throw std::invalid_argument(std::string(who) + ": parameters have " +
                                std::to_string(p.means.size()) + " dimensions, dataset has " +
                                std::to_string(d.dims()));
  }
}

}  // namespace

Dataset apply_zscore(const Dataset& d, const NormalizationParams& p) {
  check_dims(d, p, "apply_zscore");
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - p.means[j]) / p.std_devs[j];
  }
  return out;
}

Dataset invert_zscore(const Dataset& d, const NormalizationParams& p) {
  check_dims(d, p, "invert_zscore");
  Dataset out = d;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto row = out.features.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = row[j] * p.std_devs[j] + p.means[j];
  }
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_assignments.size(); ++i) {
    if (fold_assignments[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan make_stratified_folds(const Dataset& d, std::size_t n_folds, std::uint64_t seed) {
  if (n_folds < 2 || n_folds > d.size()) {
    throw std::invalid_argument("make_stratified_folds: n_folds must be in [2, " +
                                std::to_string(d.size()) + "], got " + std::to_string(n_folds));
  }
  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.fold_assignments.assign(d.size(), 0);

  auto members = d.class_members();
  std::size_t cursor = 0;
  for (ClassIndex c = 0; c < members.size(); ++c) {
    auto& idx = members[c];
    if (!idx.empty() && idx.size() < n_folds) {
      plan.warnings.push_back("class '" + d.class_set[c] + "' has " + std::to_string(idx.size()) +
                              " samples, fewer than " + std::to_string(n_folds) + " folds");
    }
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t i : idx) {
      plan.fold_assignments[i] = cursor;
      cursor = (cursor + 1) % n_folds;
    }
  }
  return plan;
}

void write_fold_plan(std::ostream& out, const FoldPlan& plan) {
  out << "sample_index,fold\n";
  for (std::size_t i = 0; i < plan.fold_assignments.size(); ++i) {
    out << i << ',' << plan.fold_assignments[i] << '\n';
  }
}

FoldPlan read_fold_plan(std::istream& in) {
  FoldPlan plan;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t == "sample_index,fold") continue;
    const auto fields = split_fields(t);
    std::size_t idx = 0;
    std::size_t fold = 0;
    if (fields.size() != 2 ||
        std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), idx).ec !=
            std::errc() ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), fold).ec !=
            std::errc()) {
      throw DataError("malformed fold plan row " + std::to_string(line_no), line_no);
    }
    rows.emplace_back(idx, fold);
  }
  plan.fold_assignments.assign(rows.size(), 0);
  std::vector<bool> seen(rows.size(), false);
  for (auto [idx, fold] : rows) {
    if (idx >= rows.size() || seen[idx]) {
      throw DataError("fold plan sample indices must be a permutation of 0.." +
                      std::to_string(rows.size() - 1));
    }
    seen[idx] = true;
    plan.fold_assignments[idx] = fold;
    plan.n_folds = std::max(plan.n_folds, fold + 1);
  }
  return plan;
}

}  // namespace ldknn
