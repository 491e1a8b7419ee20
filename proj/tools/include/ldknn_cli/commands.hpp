#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldknn_cli/config.hpp"

namespace ldknn::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // usage/config error, or nothing completed
inline constexpr int kExitPartial = 2;  // some cells failed

struct GenOptions {
  std::string family;
  std::size_t p = 2;
  std::size_t n = 500;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  bool header = false;
};

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);

/// Runs every dataset x classifier cell and writes runs.csv, aggregate.csv
/// and summary.md to the config's output_dir.
int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

/// Reads aggregate CSVs and writes ranks.csv, tests.csv, classifiers.csv,
/// robustness.csv and statistics.md to out_dir.
int cmd_report(const std::vector<std::filesystem::path>& aggregates, const std::string& control,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

struct FoldsOptions {
  std::filesystem::path data;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

/// Writes a stratified fold plan as sample_index,fold.
int cmd_folds(const FoldsOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv);

}  // namespace ldknn::cli
