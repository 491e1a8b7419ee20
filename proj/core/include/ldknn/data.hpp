#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldknn {

/// Dense index into Dataset::class_set.
using ClassIndex = std::size_t;

/// Row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  /// Appends a row. The first row appended to an empty matrix fixes cols().
  void append_row(std::span<const double> values);

  const std::vector<double>& values() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Labeled numeric samples. Labels are dense indices into class_set, which
/// keeps the original identifiers in first-appearance order.
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<ClassIndex> labels;
  std::vector<std::string> class_set;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return features.cols(); }
  std::size_t n_classes() const noexcept { return class_set.size(); }

  std::span<const double> row(std::size_t i) const { return features.row(i); }

  /// Number of samples per class, indexed by ClassIndex.
  std::vector<std::size_t> class_counts() const;

  /// Row indices of each class, in dataset order.
  std::vector<std::vector<std::size_t>> class_members() const;

  /// Rows `indices` in the given order. class_set is kept whole so that
  /// ClassIndex values stay comparable between a dataset and its subsets.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Throws DataError if any structural invariant is violated.
  void validate() const;
};

enum class HeaderMode { automatic, present, absent };

/// CSV dialect: comma separated, optional single header row, one label
/// column. A negative label_column counts from the end (-1 is the last).
struct CsvSchema {
  int label_column = -1;
  HeaderMode header = HeaderMode::automatic;
};

Dataset parse_csv(std::istream& in, const CsvSchema& schema = {}, std::string name = {});
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes features with shortest round-trip formatting and the label last.
void write_csv(std::ostream& out, const Dataset& d, bool header = false);
void save_csv(const std::filesystem::path& path, const Dataset& d, bool header = false);

// --- z-score normalization -------------------------------------------------

/// Floor applied to normalization standard deviations.
inline constexpr double kStdDevFloor = 1e-12;

struct NormalizationParams {
  std::vector<double> means;
  std::vector<double> std_devs;
};

/// Per-dimension mean and sample standard deviation (n - 1), floored.
NormalizationParams fit_zscore(const Dataset& d);
Dataset apply_zscore(const Dataset& d, const NormalizationParams& p);
Dataset invert_zscore(const Dataset& d, const NormalizationParams& p);

// --- stratified folds ------------------------------------------------------

struct FoldPlan {
  std::vector<std::size_t> fold_assignments;
  std::size_t n_folds = 0;
  std::uint64_t seed = 0;
  /// Non-fatal conditions found while building the plan (e.g. a class
  /// smaller than n_folds).
  std::vector<std::string> warnings;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Shuffles each class with its own derived stream, then deals members
/// round-robin, continuing the fold cursor from one class to the next so
/// that both per-class and overall fold sizes differ by at most one.
FoldPlan make_stratified_folds(const Dataset& d, std::size_t n_folds, std::uint64_t seed);

/// Audit format: "sample_index,fold" header then one row per sample.
void write_fold_plan(std::ostream& out, const FoldPlan& plan);
FoldPlan read_fold_plan(std::istream& in);

}  // namespace ldknn
