#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqcompose/seqcompose.hpp"

namespace seqcompose::cli {

namespace fs = std::filesystem;

struct GeneratorFlags {
  GeneratorConfig c;

  void attach(CLI::App* app) {
    app->add_option("--services", c.n_services, "Number of web services")->capture_default_str();
    app->add_option("--ops-min", c.ops_per_service.lo, "Minimum operations per service")
        ->capture_default_str();
    app->add_option("--ops-max", c.ops_per_service.hi, "Maximum operations per service")
        ->capture_default_str();
    app->add_option("--compositions", c.n_compositions, "Number of planted compositions")
        ->capture_default_str();
    app->add_option("--comp-len-min", c.composition_length.lo, "Minimum composition length")
        ->capture_default_str();
    app->add_option("--comp-len-max", c.composition_length.hi, "Maximum composition length")
        ->capture_default_str();
    app->add_option("--sessions", c.n_sessions, "Number of sessions")->capture_default_str();
    app->add_option("--noise-min", c.noise_invocations_per_session.lo,
                    "Minimum noise invocations per session")
        ->capture_default_str();
    app->add_option("--noise-max", c.noise_invocations_per_session.hi,
                    "Maximum noise invocations per session")
        ->capture_default_str();
    app->add_option("--plant-gap-min", c.plant_gap.lo, "Minimum noise invocations between plants")
        ->capture_default_str();
    app->add_option("--plant-gap-max", c.plant_gap.hi, "Maximum noise invocations between plants")
        ->capture_default_str();
    app->add_option("--seed", c.seed, "Generator seed")
        ->envname("SEQCOMPOSE_SEED")
        ->capture_default_str();
  }

  GeneratorConfig config() const { return c; }
};

/// Thrown for flag combinations that parse but make no sense; reported
/// together with the subcommand's usage text.
struct UsageError : std::runtime_error {
  UsageError(const std::string& what, const CLI::App* app)
      : std::runtime_error(what), app(app) {}
  const CLI::App* app;
};

inline void print_config(std::ostream& err, const json& resolved) {
  err << "config: " << resolved.dump() << '\n';
}

inline std::vector<Session> load_sessions(const fs::path& log) {
  const auto records = read_log(log);
  return sessionize(records);
}

inline json stats_json(const std::string& algorithm, double support, double confidence,
                       const MiningStats& stats, const std::optional<StageTrace>& trace) {
  json j{{"algorithm", algorithm},
         {"min_support_pct", support},
         {"min_confidence_pct", confidence},
         {"candidate_count", stats.candidate_count},
         {"frequent_count", stats.frequent_count},
         {"rule_count", stats.rule_count}};
  if (trace) {
    j["trace"] = json{{"original_session_count", trace->original_session_count},
                      {"level1_floor_count", trace->level1_floor_count},
                      {"level1_candidate_count", trace->level1_candidate_count},
                      {"level1_average_support", trace->level1_average_support},
                      {"level1_kept_count", trace->level1_kept_count},
                      {"reduced_session_count", trace->reduced_session_count},
                      {"level2_threshold_base", trace->level2_threshold_base},
                      {"level2_min_support_count", trace->level2_min_support_count},
                      {"level2_candidate_count", trace->level2_candidate_count},
                      {"level2_frequent_count", trace->level2_frequent_count},
                      {"rule_count", trace->rule_count},
                      {"recommended_count", trace->recommended_count}};
  }
  return j;
}

/// Splices `--config file.json` into the argument list: every key becomes
/// `--key value` placed right after the subcommand, so explicit flags that
/// follow take precedence (options use take-last semantics).
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw ConfigError("--config needs a file argument");
  const fs::path path = *(it + 1);
  args.erase(it, it + 2);
  const json cfg = read_json(path);
  if (!cfg.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");

  std::vector<std::string> injected;
  for (const auto& [key, value] : cfg.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back("--" + key);
    } else {
      injected.push_back("--" + key);
      injected.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  // args[0] is the program name, args[1] the subcommand.
  const auto pos = args.size() > 1 ? args.begin() + 2 : args.end();
  args.insert(pos, injected.begin(), injected.end());
  return args;
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mine web-service invocation logs for composition recommendations", "seqcompose"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_all_flag("--help-all");

  // generate ------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
  GeneratorFlags gen_flags;
  gen_flags.attach(gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output directory")->required();

  // mine ----------------------------------------------------------------
  auto* mine = app.add_subcommand("mine", "Mine association rules from a log");
  std::string algorithm, level_name = "operation", log_path, rules_out, trace_out, stats_out;
  double min_support = 3.5, min_confidence = 3.5;
  std::optional<std::size_t> mine_top_n;
  std::size_t l1_floor = 2;
  bool l2_original = false;
  mine->add_option("--algorithm", algorithm, "Mining algorithm")
      ->required()
      ->check(CLI::IsMember({"apriori", "patterngrowth", "closed", "multilevel"}));
  mine->add_option("--min-support", min_support, "Minimum support (% of sessions)")
      ->capture_default_str();
  mine->add_option("--min-confidence", min_confidence, "Minimum confidence (%)")
      ->capture_default_str();
  mine->add_option("--level", level_name, "Hierarchy level for the baseline miners")
      ->check(CLI::IsMember({"service", "operation"}))
      ->capture_default_str();
  mine->add_option("--top-n", mine_top_n, "Keep only the n best-ranked rules");
  mine->add_option("--l1-floor", l1_floor, "Minimum absolute support of level-1 candidates")
      ->capture_default_str();
  mine->add_flag("--l2-original", l2_original,
                 "Take the level-2 threshold against the original session count");
  mine->add_option("--log", log_path, "Log CSV")->required();
  mine->add_option("--out", rules_out, "Rules output (JSON lines)")->required();
  mine->add_option("--stats", stats_out, "Also write the stats summary to this file");
  mine->add_option("--trace", trace_out, "Write the multilevel stage trace to this file");

  // eval ----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "Evaluate a rules file against ground truth");
  std::string eval_rules, eval_truth, eval_stats, eval_algorithm = "unknown";
  std::optional<std::size_t> expected;
  ev->add_option("--rules", eval_rules, "Rules file (JSON lines)")->required();
  ev->add_option("--truth", eval_truth, "compositions.json of the dataset")->required();
  ev->add_option("--expected", expected, "Expected association count (default: compositions)");
  ev->add_option("--stats", eval_stats, "Stats file written by 'mine --stats'");
  ev->add_option("--algorithm", eval_algorithm, "Algorithm label when no stats file is given");

  // bench ---------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid over generated datasets");
  GeneratorFlags bench_gen;
  bench_gen.attach(bench);
  std::string grid_name = "paper", bench_out;
  std::size_t seeds = 1, jobs = 1, bench_floor = 2;
  std::optional<std::size_t> bench_top_n, bench_expected;
  bench->add_option("--grid", grid_name, "'paper', 'empty' or a grid CSV file")
      ->capture_default_str();
  bench->add_option("--seeds", seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--jobs", jobs, "Grid cells run concurrently")->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--l1-floor", bench_floor, "Minimum absolute support of level-1 candidates")
      ->capture_default_str();
  bench->add_option("--top-n", bench_top_n, "Keep only the n best-ranked rules");
  bench->add_option("--expected", bench_expected, "Expected association count");
  bench->add_option("--out", bench_out, "Output directory")->required();

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(std::move(args));
  } catch (const Error& e) {
    err << "seqcompose: error[" << e.kind() << "]: " << e.what() << '\n';
    return 2;
  }
  std::vector<const char*> argv;
  for (const auto& a : expanded) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "seqcompose: error[usage]: " << e.what() << '\n';
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  try {
    if (gen->parsed()) {
      auto config = gen_flags.config();
      try {
        config.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what(), gen);
      }
      json resolved = to_json(config);
      resolved["out"] = gen_out;
      print_config(err, resolved);
      const auto dataset = generate_dataset(config);
      write_dataset(dataset, gen_out);
      out << "wrote " << dataset.log.records.size() << " records, "
          << dataset.compositions.size() << " compositions, " << dataset.log.plants.size()
          << " plants to " << gen_out << '\n';
      return 0;
    }

    if (mine->parsed()) {
      json resolved{{"algorithm", algorithm},     {"min_support", min_support},
                    {"min_confidence", min_confidence}, {"level", level_name},
                    {"l1_floor", l1_floor},        {"l2_original", l2_original},
                    {"log", log_path},             {"out", rules_out}};
      resolved["top_n"] = mine_top_n ? json(*mine_top_n) : json(nullptr);
      print_config(err, resolved);

      const auto sessions = load_sessions(log_path);
      RunOptions opts;
      opts.level = parse_level(level_name);
      opts.top_n = mine_top_n;
      opts.l1_floor_count = l1_floor;
      opts.l2_threshold_on_original = l2_original;
      const auto result = run_algorithm(parse_algorithm(algorithm), sessions, min_support,
                                        min_confidence, opts);
      write_file(rules_out, format_rules_jsonl(result.rules));
      const auto stats = stats_json(algorithm, min_support, min_confidence, result.stats,
                                    result.trace);
      if (!stats_out.empty()) write_file(stats_out, dump(stats));
      if (!trace_out.empty()) {
        if (!result.trace) throw ConfigError("--trace is only available for multilevel");
        write_file(trace_out, dump(stats.at("trace")));
      }
      out << stats.dump() << '\n';
      return 0;
    }

    if (ev->parsed()) {
      const auto rules = parse_rules_jsonl(read_file(eval_rules));
      const auto truth = compositions_from_json(read_json(eval_truth));
      MiningStats stats;
      stats.rule_count = rules.size();
      std::string label = eval_algorithm;
      double support = 0.0, confidence = 0.0;
      if (!eval_stats.empty()) {
        const auto s = read_json(eval_stats);
        label = s.at("algorithm").get<std::string>();
        support = s.at("min_support_pct").get<double>();
        confidence = s.at("min_confidence_pct").get<double>();
        stats.candidate_count = s.at("candidate_count").get<std::size_t>();
        stats.frequent_count = s.at("frequent_count").get<std::size_t>();
      }
      const std::size_t expected_count = expected.value_or(truth.size());
      json resolved{{"rules", eval_rules}, {"truth", eval_truth}, {"expected", expected_count}};
      print_config(err, resolved);
      const auto matching = match_rules(rules, truth);
      const auto report =
          make_report(label, support, confidence, stats, matching, truth.size(), expected_count);
      out << format_report_csv(std::span<const EvalReport>(&report, 1));
      return 0;
    }

    if (bench->parsed()) {
      std::vector<GridCell> grid;
      if (grid_name == "paper") grid = paper_grid();
      else if (grid_name != "empty") grid = parse_grid(read_file(grid_name));
      auto base = bench_gen.config();
      try {
        base.validate();
      } catch (const ConfigError& e) {
        throw UsageError(e.what(), bench);
      }

      json resolved{{"generator", to_json(base)}, {"grid", grid_name}, {"seeds", seeds},
                    {"jobs", jobs},               {"l1_floor", bench_floor}};
      resolved["top_n"] = bench_top_n ? json(*bench_top_n) : json(nullptr);
      resolved["expected"] = bench_expected ? json(*bench_expected) : json(nullptr);
      json cells = json::array();
      for (const auto& c : grid)
        cells.push_back({{"algorithm", c.algorithm},
                         {"min_support_pct", c.min_support_pct},
                         {"min_confidence_pct", c.min_confidence_pct}});
      resolved["cells"] = cells;
      print_config(err, resolved);
      write_file(fs::path(bench_out) / "config.json", dump(resolved));

      BenchOptions opts;
      opts.jobs = jobs;
      opts.expected_count = bench_expected;
      opts.run.top_n = bench_top_n;
      opts.run.l1_floor_count = bench_floor;

      std::vector<std::vector<EvalReport>> per_seed;
      for (std::size_t i = 0; i < seeds; ++i) {
        auto config = base;
        config.seed = base.seed + i;
        const fs::path dir = fs::path(bench_out) / ("seed_" + std::to_string(config.seed));
        write_dataset(generate_dataset(config), dir);
        auto reports = run_benchmark(dir, grid, opts);
        write_file(dir / "report.csv", format_report_csv(reports));
        write_file(dir / "plot.csv", format_plot_csv(reports));
        per_seed.push_back(std::move(reports));
      }
      const auto rows = aggregate(per_seed);
      write_file(fs::path(bench_out) / "report.csv", format_aggregate_csv(rows));
      write_file(fs::path(bench_out) / "plot.csv", format_aggregate_plot_csv(rows));
      out << format_aggregate_csv(rows);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "seqcompose: error[usage]: " << e.what() << '\n' << e.app->help();
    return 2;
  } catch (const Error& e) {
    err << "seqcompose: error[" << e.kind() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "seqcompose: error[internal]: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace seqcompose::cli
