#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldknn/classifiers.hpp"
#include "ldknn/crossval.hpp"
#include "ldknn/data.hpp"
#include "ldknn/synthgen.hpp"

namespace ldknn::cli {

struct DatasetSource {
  std::string name;
  std::optional<std::filesystem::path> csv;
  CsvSchema schema;
  std::optional<SyntheticSpec> synthetic;
  bool synthetic_seed_given = false;
};

struct ClassifierEntry {
  std::string name;  // defaults to the rule name
  DecisionRuleConfig rule;
  KpcPolicy kpc;
};

struct ExperimentConfig {
  std::vector<DatasetSource> datasets;
  std::vector<ClassifierEntry> classifiers;
  std::size_t n_folds = 5;
  std::size_t n_repeats = 10;
  std::uint64_t seed = 0;
  NormalizationScope normalization_scope = NormalizationScope::global;
  std::size_t threads = 1;
  std::filesystem::path output_dir;
};

/// Throws ConfigError naming the offending field. Relative paths are kept
/// as written; resolve them with resolve_paths().
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads the file and resolves relative dataset and output paths against
/// the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
void resolve_paths(ExperimentConfig& cfg, const std::filesystem::path& base);

/// The dataset a source describes. Synthetic sources without their own seed
/// use derive_seed(master seed, 0x5eed0000 + position).
Dataset materialize(const DatasetSource& src, std::uint64_t master_seed, std::size_t position);

}  // namespace ldknn::cli
