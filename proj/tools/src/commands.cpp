#include "ldknn_cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ldknn/errors.hpp"
#include "ldknn/report.hpp"

namespace ldknn::cli {

namespace fs = std::filesystem;

namespace {

// Writes `content` to `path` in one go so a failed run never leaves a
// half-written file behind.
void write_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

}  // namespace

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  const auto family = parse_family(opts.family);
  if (!family) {
    err << "error: unknown family '" << opts.family << "' (expected t1, t2, t3 or t4)\n";
    return kExitFailure;
  }
  if (opts.p < 2 || opts.n < 1) {
    err << "error: --p must be >= 2 and --n >= 1\n";
    return kExitFailure;
  }
  if (opts.out.empty()) {
    err << "error: --out is required\n";
    return kExitFailure;
  }
  try {
    const Dataset d = generate({*family, opts.p, opts.n, opts.seed});
    write_file(opts.out, render([&](std::ostream& os) { write_csv(os, d, opts.header); }));
    out << "wrote " << opts.out.string() << ": n=" << d.size() << " d=" << d.dims()
        << " classes=" << d.n_classes() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<RunRow> runs;
  std::vector<std::string> errors;
  std::size_t cells = 0;

  for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
    const auto& src = cfg.datasets[di];
    Dataset d;
    try {
      d = materialize(src, cfg.seed, di);
    } catch (const std::exception& e) {
      cells += cfg.classifiers.size();
      for (const auto& c : cfg.classifiers) {
        errors.push_back(src.name + " / " + c.name + ": " + e.what());
      }
      continue;
    }
    for (const auto& c : cfg.classifiers) {
      ++cells;
      CvOptions opts;
      opts.n_folds = cfg.n_folds;
      opts.n_repeats = cfg.n_repeats;
      opts.seed = cfg.seed;
      opts.scope = cfg.normalization_scope;
      opts.threads = cfg.threads;
      opts.kpc = c.kpc;
      try {
        auto rows = cross_validate(d, c.rule, opts, c.name);
        runs.insert(runs.end(), rows.begin(), rows.end());
        out << src.name << " / " << c.name << ": done\n";
      } catch (const std::exception& e) {
        errors.push_back(src.name + " / " + c.name + ": " + e.what());
        err << "error: " << errors.back() << '\n';
      }
    }
  }

  try {
    fs::create_directories(cfg.output_dir);
    const auto agg = aggregate(runs);
    write_file(cfg.output_dir / "runs.csv",
               render([&](std::ostream& os) { write_runs_csv(os, runs); }));
    write_file(cfg.output_dir / "aggregate.csv",
               render([&](std::ostream& os) { write_aggregate_csv(os, agg); }));
    write_file(cfg.output_dir / "summary.md",
               render([&](std::ostream& os) { write_summary_markdown(os, agg, errors); }));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << "results in " << cfg.output_dir.string() << '\n';

  if (errors.empty()) return kExitOk;
  return errors.size() == cells ? kExitFailure : kExitPartial;
}

int cmd_run(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return cmd_run(cfg, out, err);
}

int cmd_report(const std::vector<fs::path>& aggregates, const std::string& control,
               const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    std::vector<AggregateRow> rows;
    for (const auto& path : aggregates) {
      std::ifstream in(path);
      if (!in) throw Error("cannot open '" + path.string() + "'");
      auto part = read_aggregate_csv(in);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto table = build_comparison(rows);
    const auto report = compute_statistics(table, control);

    fs::create_directories(out_dir);
    write_file(out_dir / "ranks.csv", render([&](std::ostream& os) { write_ranks_csv(os, report); }));
    write_file(out_dir / "tests.csv", render([&](std::ostream& os) { write_tests_csv(os, report); }));
    write_file(out_dir / "classifiers.csv",
               render([&](std::ostream& os) { write_classifier_csv(os, report); }));
    write_file(out_dir / "robustness.csv",
               render([&](std::ostream& os) { write_robustness_csv(os, report); }));
    write_file(out_dir / "statistics.md",
               render([&](std::ostream& os) { write_statistics_markdown(os, report); }));

    if (!report.amr.friedman) {
      err << "error: Friedman test refused: " << report.amr.friedman_error << '\n';
      return kExitFailure;
    }
    out << "Friedman (AMR) = " << report.amr.friedman->statistic << ", df = "
        << report.amr.friedman->df << ", critical value = " << report.amr.friedman->critical_value
        << '\n';
    out << "statistics in " << out_dir.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_folds(const FoldsOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Dataset d = load_csv(opts.data);
    const FoldPlan plan = make_stratified_folds(d, opts.folds, opts.seed);
    for (const auto& w : plan.warnings) err << "warning: " << w << '\n';
    write_file(opts.out, render([&](std::ostream& os) { write_fold_plan(os, plan); }));
    out << "wrote " << opts.out.string() << ": " << d.size() << " samples in " << plan.n_folds
        << " folds\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Local-distribution kNN classifiers and benchmark runner"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic two-class dataset as CSV");
  gen_cmd->add_option("--family", gen.family, "t1, t2, t3 or t4")
      ->required()
      ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "T1", "T2", "T3", "T4"}));
  gen_cmd->add_option("--p", gen.p, "Total dimensions (>= 2)")->required()->check(CLI::Range(2, 100000));
  gen_cmd->add_option("--n", gen.n, "Samples per class")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();
  gen_cmd->add_flag("--header", gen.header, "Write a header row");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a cross-validation experiment from a config");
  run_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();

  std::vector<std::string> aggregates;
  std::string control;
  std::string report_out = ".";
  auto* report_cmd = app.add_subcommand("report", "Friedman / Bonferroni-Dunn / robustness");
  report_cmd->add_option("aggregates", aggregates, "aggregate.csv files")->required();
  report_cmd->add_option("--control", control, "Control classifier name")->required();
  report_cmd->add_option("--out-dir", report_out, "Output directory");

  FoldsOptions folds;
  auto* folds_cmd = app.add_subcommand("folds", "Export a stratified fold plan");
  folds_cmd->add_option("--data", folds.data, "Dataset CSV")->required();
  folds_cmd->add_option("--folds", folds.folds, "Number of folds");
  folds_cmd->add_option("--seed", folds.seed, "Random seed")->required();
  folds_cmd->add_option("--out", folds.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFailure;
  }

  if (*gen_cmd) return cmd_gen(gen, std::cout, std::cerr);
  if (*run_cmd) return cmd_run(fs::path(config_path), std::cout, std::cerr);
  if (*report_cmd) {
    std::vector<fs::path> paths(aggregates.begin(), aggregates.end());
    return cmd_report(paths, control, report_out, std::cout, std::cerr);
  }
  if (*folds_cmd) return cmd_folds(folds, std::cout, std::cerr);
  return kExitFailure;
}

}  // namespace ldknn::cli
