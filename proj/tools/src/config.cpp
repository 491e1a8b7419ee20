#include "ldknn_cli/config.hpp"

#include <fstream>
#include <set>

#include "ldknn/errors.hpp"
#include "ldknn/rng.hpp"

namespace ldknn::cli {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown field '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError("missing required field '" + (where.empty() ? key : where + "." + key) + "'");
  }
  return obj.at(key);
}

template <typename T>
T get_as(const json& value, const std::string& field) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + field + "' has the wrong type");
  }
}

std::size_t get_count(const json& value, const std::string& field, std::size_t minimum) {
  if (!value.is_number_integer() || value.get<long long>() < static_cast<long long>(minimum)) {
    throw ConfigError("field '" + field + "' must be an integer >= " + std::to_string(minimum));
  }
  return value.get<std::size_t>();
}

std::uint64_t get_seed(const json& value, const std::string& field) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
    throw ConfigError("field '" + field + "' must be a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

DatasetSource parse_dataset(const json& j, const std::string& where) {
  check_keys(j, where, {"name", "csv", "label_column", "header", "synthetic"});
  DatasetSource src;
  src.name = get_as<std::string>(require(j, "name", where), where + ".name");
  if (src.name.empty()) throw ConfigError("field '" + where + ".name' must not be empty");
  const bool has_csv = j.contains("csv");
  const bool has_synth = j.contains("synthetic");
  if (has_csv == has_synth) {
    throw ConfigError("'" + where + "' needs exactly one of 'csv' or 'synthetic'");
  }
  if (has_csv) {
    src.csv = get_as<std::string>(j.at("csv"), where + ".csv");
    if (j.contains("label_column")) {
      src.schema.label_column = get_as<int>(j.at("label_column"), where + ".label_column");
    }
    if (j.contains("header")) {
      const auto h = get_as<std::string>(j.at("header"), where + ".header");
      if (h == "auto") {
        src.schema.header = HeaderMode::automatic;
      } else if (h == "present") {
        src.schema.header = HeaderMode::present;
      } else if (h == "absent") {
        src.schema.header = HeaderMode::absent;
      } else {
        throw ConfigError("field '" + where + ".header' must be auto, present or absent");
      }
    }
  } else {
    if (j.contains("label_column") || j.contains("header")) {
      throw ConfigError("'" + where + "': label_column/header only apply to csv sources");
    }
    const std::string sw = where + ".synthetic";
    const json& s = j.at("synthetic");
    check_keys(s, sw, {"family", "p", "n_per_class", "seed"});
    SyntheticSpec spec;
    const auto fam = get_as<std::string>(require(s, "family", sw), sw + ".family");
    const auto family = parse_family(fam);
    if (!family) throw ConfigError("field '" + sw + ".family' must be one of t1, t2, t3, t4");
    spec.family = *family;
    spec.dim_p = get_count(require(s, "p", sw), sw + ".p", 2);
    spec.n_per_class = get_count(require(s, "n_per_class", sw), sw + ".n_per_class", 1);
    if (s.contains("seed")) {
      spec.seed = get_seed(s.at("seed"), sw + ".seed");
      src.synthetic_seed_given = true;
    }
    src.synthetic = spec;
  }
  return src;
}

ClassifierEntry parse_classifier(const json& j, const std::string& where) {
  check_keys(j, where, {"name", "rule", "kpc", "kpc_grid", "inner_folds", "normalization",
                        "tie_break"});
  ClassifierEntry e;
  const auto rule_name = get_as<std::string>(require(j, "rule", where), where + ".rule");
  const auto rule = parse_rule(rule_name);
  if (!rule) {
    throw ConfigError("field '" + where + ".rule': unknown rule '" + rule_name +
                      "' (LD_GME, LD_KDE, V_KNN, DW1_KNN, DW2_KNN, CAP, NBC_GME, NBC_KDE)");
  }
  e.rule.rule = *rule;
  e.name = j.contains("name") ? get_as<std::string>(j.at("name"), where + ".name")
                              : std::string(to_string(*rule));

  if (uses_kpc(*rule)) {
    const json& kpc = require(j, "kpc", where);
    if (kpc.is_string()) {
      const auto sel = parse_kpc_selection(kpc.get<std::string>());
      if (!sel || *sel == KpcSelection::fixed) {
        throw ConfigError("field '" + where + ".kpc' must be a positive integer, \"nested\" or "
                          "\"optimistic\"");
      }
      e.kpc.selection = *sel;
    } else {
      e.rule.kpc = get_count(kpc, where + ".kpc", 1);
    }
  } else if (j.contains("kpc")) {
    throw ConfigError("field '" + where + ".kpc' does not apply to " + rule_name);
  }
  if (j.contains("kpc_grid")) {
    const json& g = j.at("kpc_grid");
    if (!g.is_array() || g.empty()) {
      throw ConfigError("field '" + where + ".kpc_grid' must be a non-empty array");
    }
    e.kpc.grid.clear();
    for (const auto& v : g) e.kpc.grid.push_back(get_count(v, where + ".kpc_grid", 1));
  }
  if (j.contains("inner_folds")) {
    e.kpc.inner_folds = get_count(j.at("inner_folds"), where + ".inner_folds", 2);
  }
  if (j.contains("normalization")) {
    const std::string nw = where + ".normalization";
    const json& n = j.at("normalization");
    check_keys(n, nw, {"mode", "samples", "seed"});
    const auto mode = get_as<std::string>(require(n, "mode", nw), nw + ".mode");
    if (mode == "omit") {
      e.rule.normalization = NormalizationMode::omit();
    } else if (mode == "monte_carlo") {
      const std::size_t samples =
          n.contains("samples") ? get_count(n.at("samples"), nw + ".samples", 100) : 10000;
      const std::uint64_t seed = n.contains("seed") ? get_seed(n.at("seed"), nw + ".seed") : 0;
      e.rule.normalization = NormalizationMode::monte_carlo(samples, seed);
    } else {
      throw ConfigError("field '" + nw + ".mode' must be omit or monte_carlo");
    }
  }
  if (j.contains("tie_break")) {
    const auto tb = get_as<std::string>(j.at("tie_break"), where + ".tie_break");
    if (tb == "local_evidence") {
      e.rule.tie_break = TieBreak::local_evidence;
    } else if (tb == "class_order") {
      e.rule.tie_break = TieBreak::class_order;
    } else {
      throw ConfigError("field '" + where + ".tie_break' must be local_evidence or class_order");
    }
  }
  return e;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  check_keys(j, "", {"datasets", "classifiers", "cv", "normalization_scope", "threads",
                     "output_dir"});
  ExperimentConfig cfg;

  const json& ds = require(j, "datasets", "");
  if (!ds.is_array() || ds.empty()) throw ConfigError("'datasets' must be a non-empty array");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    cfg.datasets.push_back(parse_dataset(ds[i], "datasets[" + std::to_string(i) + "]"));
  }
  const json& cs = require(j, "classifiers", "");
  if (!cs.is_array() || cs.empty()) throw ConfigError("'classifiers' must be a non-empty array");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    cfg.classifiers.push_back(parse_classifier(cs[i], "classifiers[" + std::to_string(i) + "]"));
  }
  std::set<std::string> names;
  for (const auto& c : cfg.classifiers) {
    if (!names.insert(c.name).second) {
      throw ConfigError("duplicate classifier name '" + c.name + "'; set 'name' to disambiguate");
    }
  }
  names.clear();
  for (const auto& d : cfg.datasets) {
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
  }

  const json& cv = require(j, "cv", "");
  check_keys(cv, "cv", {"folds", "repeats", "seed"});
  cfg.n_folds = cv.contains("folds") ? get_count(cv.at("folds"), "cv.folds", 2) : 5;
  cfg.n_repeats = cv.contains("repeats") ? get_count(cv.at("repeats"), "cv.repeats", 1) : 10;
  cfg.seed = get_seed(require(cv, "seed", "cv"), "cv.seed");

  if (j.contains("normalization_scope")) {
    const auto s = get_as<std::string>(j.at("normalization_scope"), "normalization_scope");
    const auto scope = parse_scope(s);
    if (!scope) throw ConfigError("field 'normalization_scope' must be global or train_fold");
    cfg.normalization_scope = *scope;
  }
  if (j.contains("threads")) cfg.threads = get_count(j.at("threads"), "threads", 1);
  cfg.output_dir = get_as<std::string>(require(j, "output_dir", ""), "output_dir");
  if (cfg.output_dir.empty()) throw ConfigError("field 'output_dir' must not be empty");
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["datasets"] = json::array();
  for (const auto& d : cfg.datasets) {
    json o{{"name", d.name}};
    if (d.csv) {
      o["csv"] = d.csv->generic_string();
      o["label_column"] = d.schema.label_column;
      o["header"] = d.schema.header == HeaderMode::automatic ? "auto"
                    : d.schema.header == HeaderMode::present ? "present"
                                                             : "absent";
    } else {
      json s{{"family", std::string(to_string(d.synthetic->family))},
             {"p", d.synthetic->dim_p},
             {"n_per_class", d.synthetic->n_per_class}};
      if (d.synthetic_seed_given) s["seed"] = d.synthetic->seed;
      o["synthetic"] = s;
    }
    j["datasets"].push_back(o);
  }
  j["classifiers"] = json::array();
  for (const auto& c : cfg.classifiers) {
    json o{{"name", c.name}, {"rule", std::string(to_string(c.rule.rule))}};
    if (uses_kpc(c.rule.rule)) {
      if (c.kpc.selection == KpcSelection::fixed) {
        o["kpc"] = c.rule.kpc;
      } else {
        o["kpc"] = std::string(to_string(c.kpc.selection));
      }
    }
    o["kpc_grid"] = c.kpc.grid;
    o["inner_folds"] = c.kpc.inner_folds;
    if (c.rule.normalization.kind == NormalizationMode::Kind::omit) {
      o["normalization"] = {{"mode", "omit"}};
    } else {
      o["normalization"] = {{"mode", "monte_carlo"},
                            {"samples", c.rule.normalization.samples},
                            {"seed", c.rule.normalization.seed}};
    }
    o["tie_break"] =
        c.rule.tie_break == TieBreak::local_evidence ? "local_evidence" : "class_order";
    j["classifiers"].push_back(o);
  }
  j["cv"] = {{"folds", cfg.n_folds}, {"repeats", cfg.n_repeats}, {"seed", cfg.seed}};
  j["normalization_scope"] = std::string(to_string(cfg.normalization_scope));
  j["threads"] = cfg.threads;
  j["output_dir"] = cfg.output_dir.generic_string();
  return j;
}

void resolve_paths(ExperimentConfig& cfg, const std::filesystem::path& base) {
  for (auto& d : cfg.datasets) {
    if (d.csv && d.csv->is_relative()) d.csv = base / *d.csv;
  }
  if (cfg.output_dir.is_relative()) cfg.output_dir = base / cfg.output_dir;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  auto cfg = config_from_json(j);
  resolve_paths(cfg, path.parent_path());
  return cfg;
}

Dataset materialize(const DatasetSource& src, std::uint64_t master_seed, std::size_t position) {
  Dataset d;
  if (src.csv) {
    d = load_csv(*src.csv, src.schema);
  } else {
    SyntheticSpec spec = *src.synthetic;
    if (!src.synthetic_seed_given) spec.seed = derive_seed(master_seed, 0x5eed0000 + position);
    d = generate(spec);
  }
  d.name = src.name;
  return d;
}

}  // namespace ldknn::cli
