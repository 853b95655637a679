#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "seqcompose/core.hpp"
#include "seqcompose/dataset.hpp"
#include "seqcompose/miners.hpp"
#include "seqcompose/multilevel.hpp"
#include "seqcompose/workload.hpp"

namespace seqcompose {

/// A decimal with exactly two fractional digits, stored as hundredths.
struct Fixed2 {
  std::int64_t hundredths = 0;

  double value() const { return static_cast<double>(hundredths) / 100.0; }

  std::string str() const {
    const auto whole = hundredths / 100;
    const auto frac = hundredths % 100;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
    return buf;
  }

  /// num / den rounded half-up to hundredths.
  static Fixed2 ratio(std::uint64_t num, std::uint64_t den) {
    const auto n = static_cast<unsigned __int128>(num) * 100;
    return Fixed2{static_cast<std::int64_t>((2 * n + den) / (2 * static_cast<unsigned __int128>(den)))};
  }

  friend auto operator<=>(const Fixed2&, const Fixed2&) = default;
};

/// Matched compositions over compositions in the dataset, in percent.
inline Fixed2 precision(std::size_t matching_count, std::size_t n_compositions) {
  if (n_compositions == 0) throw EvalError("precision needs at least one composition");
  return Fixed2::ratio(static_cast<std::uint64_t>(matching_count) * 100, n_compositions);
}

/// Generated rules over expected associations. 1 is ideal.
inline Fixed2 noise_ratio(std::size_t generated_count, std::size_t expected_count) {
  if (expected_count == 0) throw EvalError("noise ratio needs a positive expected count");
  return Fixed2::ratio(generated_count, expected_count);
}

struct MatchCriteria {
  enum class Mode { ExactComposition };
  Mode mode = Mode::ExactComposition;
};

/// Number of compositions whose step sequence equals antecedent ++
/// consequent of at least one rule.
inline std::size_t match_rules(std::span<const LabeledRule> rules,
                               std::span<const Composition> compositions,
                               MatchCriteria criteria = {}) {
  (void)criteria;  // ExactComposition is the only mode
  std::set<std::vector<std::string>> sequences;
  for (const auto& r : rules) {
    if (r.level != HierarchyLevel::OperationLevel)
      throw EvalError("rules must be operation-level to match compositions");
    sequences.insert(r.sequence());
  }
  return static_cast<std::size_t>(std::count_if(
      compositions.begin(), compositions.end(),
      [&](const Composition& c) { return sequences.contains(c.labels()); }));
}

struct EvalReport {
  std::string algorithm;
  double min_support_pct = 0.0;
  double min_confidence_pct = 0.0;
  std::size_t candidate_count = 0;
  std::size_t frequent_count = 0;
  std::size_t rule_count = 0;
  std::size_t matching_count = 0;
  Fixed2 precision_pct;
  Fixed2 noise_ratio;
  double wall_time_ms = 0.0;
};

inline EvalReport make_report(std::string algorithm, double support, double confidence,
                              const MiningStats& stats, std::size_t matching,
                              std::size_t n_compositions, std::size_t expected_count) {
  EvalReport r;
  r.algorithm = std::move(algorithm);
  r.min_support_pct = support;
  r.min_confidence_pct = confidence;
  r.candidate_count = stats.candidate_count;
  r.frequent_count = stats.frequent_count;
  r.rule_count = stats.rule_count;
  r.matching_count = matching;
  r.precision_pct = precision(matching, n_compositions);
  r.noise_ratio = noise_ratio(stats.rule_count, expected_count);
  return r;
}

// ---------------------------------------------------------------------------
// Running one algorithm
// ---------------------------------------------------------------------------

enum class Algorithm { Apriori, PatternGrowth, Closed, Multilevel };

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "apriori") return Algorithm::Apriori;
  if (s == "patterngrowth") return Algorithm::PatternGrowth;
  if (s == "closed") return Algorithm::Closed;
  if (s == "multilevel") return Algorithm::Multilevel;
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Apriori: return "apriori";
    case Algorithm::PatternGrowth: return "patterngrowth";
    case Algorithm::Closed: return "closed";
    case Algorithm::Multilevel: return "multilevel";
  }
  return "?";
}

struct RunOptions {
  HierarchyLevel level = HierarchyLevel::OperationLevel;  // baselines only
  std::optional<std::size_t> top_n;
  std::size_t l1_floor_count = 2;
  bool l2_threshold_on_original = false;
};

struct RunResult {
  std::vector<LabeledRule> rules;
  MiningStats stats;
  std::optional<StageTrace> trace;  // multilevel only
};

/// Runs one algorithm end to end on sessionized input. `level1` lets callers
/// reuse a level-1 result across multilevel runs with the same floor.
inline RunResult run_algorithm(Algorithm algorithm, std::span<const Session> sessions,
                               double support, double confidence, const RunOptions& opts,
                               const Level1Result* level1 = nullptr) {
  RunResult out;
  if (algorithm == Algorithm::Multilevel) {
    MultilevelParams p;
    p.l2_min_support_pct = support;
    p.l2_min_confidence_pct = confidence;
    p.l1_floor_count = opts.l1_floor_count;
    p.top_n = opts.top_n;
    p.l2_threshold_on_original = opts.l2_threshold_on_original;
    auto rec = level1 ? recommend_from_level1(sessions, *level1, p) : recommend(sessions, p);
    out.rules = std::move(rec.rules);
    out.stats = rec.stats;
    out.trace = rec.trace;
    return out;
  }

  MiningParams mp{support, confidence, opts.level, {}};
  mp.validate();
  const EncodedLog log = encode(sessions, opts.level);
  const std::span<const std::vector<ItemId>> seqs(log.sequences);
  FrequentSet<ItemId> fs;
  switch (algorithm) {
    case Algorithm::Apriori: fs = mine_apriori(seqs, mp); break;
    case Algorithm::PatternGrowth: fs = mine_patterngrowth(seqs, mp); break;
    default: fs = mine_closed(seqs, mp); break;
  }
  auto rules = generate_rules(fs, seqs, confidence);
  if (opts.top_n) rules = top_n(std::move(rules), *opts.top_n);
  out.rules.reserve(rules.size());
  for (const auto& r : rules) out.rules.push_back(decode_rule(r, log.vocabulary));
  out.stats = fs.stats;
  out.stats.rule_count = out.rules.size();
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark grid
// ---------------------------------------------------------------------------

struct GridCell {
  std::string algorithm;
  double min_support_pct = 0.0;
  double min_confidence_pct = 0.0;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

/// Apriori and multilevel rows at the thresholds of the published
/// experiment table.
inline std::vector<GridCell> paper_grid() {
  return {{"apriori", 3.5, 3.5},    {"apriori", 3.5, 3.8},    {"apriori", 3.7, 3.7},
          {"multilevel", 3.5, 3.5}, {"multilevel", 4.5, 4.5}, {"multilevel", 6.5, 6.5}};
}

/// Grid CSV: header `algorithm,min_support_pct,min_confidence_pct`, one
/// cell per line.
inline std::vector<GridCell> parse_grid(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "algorithm,min_support_pct,min_confidence_pct")
    throw ParseError(1, "grid header must be 'algorithm,min_support_pct,min_confidence_pct'");
  std::vector<GridCell> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != 3) throw ParseError(lineno, "expected 3 fields");
    try {
      parse_algorithm(f[0]);
      out.push_back(GridCell{std::string(f[0]), std::stod(std::string(f[1])),
                             std::stod(std::string(f[2]))});
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad threshold");
    }
  }
  return out;
}

struct BenchOptions {
  RunOptions run;
  std::optional<std::size_t> expected_count;  // default: number of compositions
  std::size_t jobs = 1;
};

/// Runs every grid cell on the dataset in `dataset_dir` and evaluates it
/// against the planted compositions. Reports come back in grid order.
inline std::vector<EvalReport> run_benchmark(const std::filesystem::path& dataset_dir,
                                             std::span<const GridCell> grid,
                                             const BenchOptions& opts = {}) {
  for (const auto& cell : grid) parse_algorithm(cell.algorithm);
  if (grid.empty()) return {};

  const Dataset data = read_dataset(dataset_dir);
  const auto sessions = sessionize(data.log.records);
  const std::size_t expected = opts.expected_count.value_or(data.compositions.size());

  // Level 1 depends only on the floor, so it is shared by all multilevel cells.
  std::optional<Level1Result> level1;
  const bool any_multilevel = std::any_of(grid.begin(), grid.end(), [](const GridCell& c) {
    return parse_algorithm(c.algorithm) == Algorithm::Multilevel;
  });
  if (any_multilevel) level1 = level1_mine(sessions, opts.run.l1_floor_count, false);

  auto run_cell = [&](const GridCell& cell) {
    const auto start = std::chrono::steady_clock::now();
    const auto result =
        run_algorithm(parse_algorithm(cell.algorithm), sessions, cell.min_support_pct,
                      cell.min_confidence_pct, opts.run, level1 ? &*level1 : nullptr);
    const auto matching = match_rules(result.rules, data.compositions);
    auto report = make_report(cell.algorithm, cell.min_support_pct, cell.min_confidence_pct,
                              result.stats, matching, data.compositions.size(), expected);
    report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return report;
  };

  std::vector<EvalReport> reports(grid.size());
  const std::size_t jobs = std::max<std::size_t>(1, opts.jobs);
  for (std::size_t begin = 0; begin < grid.size(); begin += jobs) {
    const std::size_t end = std::min(grid.size(), begin + jobs);
    std::vector<std::future<EvalReport>> pending;
    for (std::size_t i = begin; i < end; ++i)
      pending.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                   run_cell, std::cref(grid[i])));
    for (std::size_t i = begin; i < end; ++i) reports[i] = pending[i - begin].get();
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

inline constexpr std::string_view kReportHeader =
    "algorithm,min_support_pct,min_confidence_pct,candidate_count,frequent_count,rule_count,"
    "matching_count,precision_pct,noise_ratio,wall_time_ms";
inline constexpr std::string_view kPlotHeader = "label,noise_ratio";

inline std::string format_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string report_label(const EvalReport& r) {
  return r.algorithm + "@" + format_pct(r.min_support_pct) + "/" +
         format_pct(r.min_confidence_pct);
}

inline std::string format_report_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << kReportHeader << '\n';
  char wall[32];
  for (const auto& r : reports) {
    std::snprintf(wall, sizeof wall, "%.1f", r.wall_time_ms);
    out << r.algorithm << ',' << format_pct(r.min_support_pct) << ','
        << format_pct(r.min_confidence_pct) << ',' << r.candidate_count << ','
        << r.frequent_count << ',' << r.rule_count << ',' << r.matching_count << ','
        << r.precision_pct.str() << ',' << r.noise_ratio.str() << ',' << wall << '\n';
  }
  return out.str();
}

inline std::string format_plot_csv(std::span<const EvalReport> reports) {
  std::ostringstream out;
  out << kPlotHeader << '\n';
  for (const auto& r : reports) out << report_label(r) << ',' << r.noise_ratio.str() << '\n';
  return out.str();
}

/// Mean over seeds of reports that share a grid, row by row.
struct AggregateRow {
  std::string algorithm;
  double min_support_pct = 0.0;
  double min_confidence_pct = 0.0;
  double candidate_count = 0, frequent_count = 0, rule_count = 0, matching_count = 0;
  double precision_pct = 0, noise_ratio = 0, wall_time_ms = 0;
};

inline std::vector<AggregateRow> aggregate(std::span<const std::vector<EvalReport>> per_seed) {
  std::vector<AggregateRow> rows;
  if (per_seed.empty()) return rows;
  const std::size_t n_rows = per_seed.front().size();
  for (const auto& s : per_seed)
    if (s.size() != n_rows) throw EvalError("per-seed reports have different row counts");
  const double k = static_cast<double>(per_seed.size());
  for (std::size_t i = 0; i < n_rows; ++i) {
    AggregateRow a;
    a.algorithm = per_seed.front()[i].algorithm;
    a.min_support_pct = per_seed.front()[i].min_support_pct;
    a.min_confidence_pct = per_seed.front()[i].min_confidence_pct;
    for (const auto& s : per_seed) {
      const auto& r = s[i];
      a.candidate_count += static_cast<double>(r.candidate_count) / k;
      a.frequent_count += static_cast<double>(r.frequent_count) / k;
      a.rule_count += static_cast<double>(r.rule_count) / k;
      a.matching_count += static_cast<double>(r.matching_count) / k;
      a.precision_pct += r.precision_pct.value() / k;
      a.noise_ratio += r.noise_ratio.value() / k;
      a.wall_time_ms += r.wall_time_ms / k;
    }
    rows.push_back(std::move(a));
  }
  return rows;
}

inline std::string format_aggregate_csv(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  out << kReportHeader << '\n';
  char buf[512];
  for (const auto& a : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f,%.1f\n",
                  a.algorithm.c_str(), format_pct(a.min_support_pct).c_str(),
                  format_pct(a.min_confidence_pct).c_str(), a.candidate_count, a.frequent_count,
                  a.rule_count, a.matching_count, a.precision_pct, a.noise_ratio, a.wall_time_ms);
    out << buf;
  }
  return out.str();
}

inline std::string format_aggregate_plot_csv(std::span<const AggregateRow> rows) {
  std::ostringstream out;
  out << kPlotHeader << '\n';
  char buf[64];
  for (const auto& a : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", a.noise_ratio);
    out << a.algorithm << '@' << format_pct(a.min_support_pct) << '/'
        << format_pct(a.min_confidence_pct) << ',' << buf << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Rules files (JSON lines)
// ---------------------------------------------------------------------------

inline json rule_to_json(const LabeledRule& r) {
  return json{{"antecedent", r.antecedent},
              {"consequent", r.consequent},
              {"support_pct", r.support_pct},
              {"confidence_pct", r.confidence_pct}};
}

inline std::string format_rules_jsonl(std::span<const LabeledRule> rules) {
  std::string out;
  for (const auto& r : rules) {
    out += rule_to_json(r).dump();
    out += '\n';
  }
  return out;
}

/// Reads a rules file. The level is inferred from the labels: operation
/// items contain '.', service items never do. Mixed files are rejected.
inline std::vector<LabeledRule> parse_rules_jsonl(std::string_view text) {
  std::vector<LabeledRule> rules;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    LabeledRule r;
    try {
      const auto j = json::parse(line);
      r.antecedent = j.at("antecedent").get<std::vector<std::string>>();
      r.consequent = j.at("consequent").get<std::vector<std::string>>();
      r.support_pct = j.at("support_pct").get<double>();
      r.confidence_pct = j.at("confidence_pct").get<double>();
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    }
    if (r.antecedent.empty() || r.consequent.empty())
      throw ParseError(lineno, "rule sides must be non-empty");
    std::size_t dotted = 0;
    const auto seq = r.sequence();
    for (const auto& item : seq) dotted += item.find('.') != std::string::npos;
    if (dotted != 0 && dotted != seq.size())
      throw ParseError(lineno, "rule mixes service and operation items");
    r.level = dotted ? HierarchyLevel::OperationLevel : HierarchyLevel::ServiceLevel;
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace seqcompose
