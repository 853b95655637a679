#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqcompose/core.hpp"
#include "seqcompose/miners.hpp"

namespace seqcompose {

struct MultilevelParams {
  double l2_min_support_pct = 3.5;
  double l2_min_confidence_pct = 3.5;
  std::size_t l1_floor_count = 2;
  std::optional<std::size_t> top_n;  // unset: every rule is returned
  // Level-2 percent threshold taken against the original session count
  // instead of the reduced one.
  bool l2_threshold_on_original = false;

  void validate() const {
    MiningParams{l2_min_support_pct, l2_min_confidence_pct, HierarchyLevel::OperationLevel, {}}
        .validate();
    if (l1_floor_count < 1) throw ConfigError("level-1 floor count must be at least 1");
  }
};

/// Append-only store of id patterns with their supports, kept flat so that
/// millions of level-1 candidates stay cheap.
class PatternTable {
 public:
  void add(std::span<const ItemId> items, std::size_t support) {
    items_.insert(items_.end(), items.begin(), items.end());
    offsets_.push_back(items_.size());
    supports_.push_back(support);
  }

  std::size_t size() const noexcept { return supports_.size(); }
  bool empty() const noexcept { return supports_.empty(); }

  std::span<const ItemId> items(std::size_t i) const {
    const std::size_t begin = i == 0 ? 0 : offsets_[i - 1];
    return std::span<const ItemId>(items_).subspan(begin, offsets_[i] - begin);
  }
  std::size_t support(std::size_t i) const { return supports_[i]; }

 private:
  std::vector<ItemId> items_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> supports_;
};

struct Level1Result {
  Vocabulary vocabulary;             // service names
  std::size_t total_sessions = 0;
  std::size_t floor_count = 0;
  std::size_t candidate_count = 0;
  double average_support = 0.0;
  PatternTable candidates;           // empty unless requested
  PatternTable kept;                 // support strictly above the average
  std::vector<std::string> reduced_session_ids;  // in session order

  /// Service names of kept pattern i.
  std::vector<std::string> kept_labels(std::size_t i) const {
    return vocabulary.decode(kept.items(i));
  }
};

/// Level-1 mining over service-level projections: every sequence of length
/// >= 2 with support >= floor_count is a candidate, their mean support is
/// the threshold, and candidates strictly above it are kept. The reduced
/// session ids are the sessions containing at least one kept pattern.
inline Level1Result level1_mine(std::span<const Session> sessions, std::size_t floor_count,
                                bool keep_candidates = true) {
  if (floor_count < 1) throw StageError("level1", "floor count must be at least 1");
  const EncodedLog log = encode(sessions, HierarchyLevel::ServiceLevel);
  const std::span<const std::vector<ItemId>> seqs(log.sequences);

  Level1Result out;
  out.vocabulary = log.vocabulary;
  out.total_sessions = sessions.size();
  out.floor_count = floor_count;

  long double sum = 0;
  grow_patterns(seqs, floor_count, SIZE_MAX,
                [&](const std::vector<ItemId>& items, std::span<const Projection> proj) {
                  if (items.size() < 2) return;
                  ++out.candidate_count;
                  sum += proj.size();
                  if (keep_candidates) out.candidates.add(items, proj.size());
                });
  if (out.candidate_count == 0)
    throw StageError("level1", "no service sequences of length >= 2 reach support " +
                                   std::to_string(floor_count) +
                                   "; lower the floor or use a larger log");
  out.average_support = static_cast<double>(sum / out.candidate_count);

  // Second pass rather than a filter so the candidates need not be stored.
  std::vector<char> retained(sessions.size(), 0);
  grow_patterns(seqs, floor_count, SIZE_MAX,
                [&](const std::vector<ItemId>& items, std::span<const Projection> proj) {
                  if (items.size() < 2 || static_cast<double>(proj.size()) <= out.average_support)
                    return;
                  out.kept.add(items, proj.size());
                  for (const auto& p : proj) retained[p.session] = 1;
                });
  for (std::size_t i = 0; i < sessions.size(); ++i)
    if (retained[i]) out.reduced_session_ids.push_back(sessions[i].session_id);
  return out;
}

/// Sessions whose service-level projection contains at least one of
/// `kept` (service-name sequences). Retained sessions are unchanged.
inline std::vector<Session> reduce_log(std::span<const Session> sessions,
                                       std::span<const std::vector<std::string>> kept) {
  if (kept.empty()) throw StageError("reduce", "no kept level-1 patterns; thresholds too strict");

  // Shorter patterns first: they match the most sessions.
  std::vector<const std::vector<std::string>*> order;
  for (const auto& k : kept) order.push_back(&k);
  std::stable_sort(order.begin(), order.end(),
                   [](auto* a, auto* b) { return a->size() < b->size(); });

  std::vector<Session> out;
  for (const auto& s : sessions) {
    const auto projected = session_labels(s, HierarchyLevel::ServiceLevel);
    const bool hit = std::any_of(order.begin(), order.end(),
                                 [&](auto* k) { return is_subsequence(*k, projected); });
    if (hit) out.push_back(s);
  }
  if (out.empty()) throw StageError("reduce", "zero sessions contain a kept level-1 pattern");
  return out;
}

/// Reduction driven by a level-1 result.
inline std::vector<Session> reduce_log(std::span<const Session> sessions, const Level1Result& l1) {
  if (l1.kept.empty()) throw StageError("reduce", "no kept level-1 patterns; thresholds too strict");
  std::unordered_set<std::string> keep(l1.reduced_session_ids.begin(),
                                       l1.reduced_session_ids.end());
  std::vector<Session> out;
  for (const auto& s : sessions)
    if (keep.contains(s.session_id)) out.push_back(s);
  if (out.empty()) throw StageError("reduce", "zero sessions contain a kept level-1 pattern");
  return out;
}

struct Level2Result {
  EncodedLog log;
  FrequentSet<ItemId> frequent;
  std::size_t threshold_base = 0;
  std::size_t min_support_count = 0;
};

/// Operation-level pattern growth over the reduced log. The percent
/// threshold is taken against the reduced session count, or against
/// `original_session_count` when params.l2_threshold_on_original is set.
inline Level2Result level2_mine(std::span<const Session> reduced, const MultilevelParams& params,
                                std::size_t original_session_count = 0) {
  if (reduced.empty()) throw StageError("level2", "reduced log is empty");
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw StageError("level2", e.what());
  }
  Level2Result out;
  out.log = encode(reduced, HierarchyLevel::OperationLevel);
  out.threshold_base = params.l2_threshold_on_original && original_session_count > 0
                           ? original_session_count
                           : reduced.size();
  out.min_support_count = min_support_count(params.l2_min_support_pct, out.threshold_base);

  const std::span<const std::vector<ItemId>> seqs(out.log.sequences);
  auto& fs = out.frequent;
  fs.level = HierarchyLevel::OperationLevel;
  fs.total_sessions = reduced.size();
  fs.stats.candidate_count = grow_patterns(
      seqs, out.min_support_count, SIZE_MAX,
      [&](const std::vector<ItemId>& items, std::span<const Projection> proj) {
        fs.patterns.push_back(Pattern<ItemId>{HierarchyLevel::OperationLevel, items, proj.size(),
                                              percent_of(proj.size(), reduced.size())});
      });
  std::sort(fs.patterns.begin(), fs.patterns.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.items, b.items); });
  fs.stats.frequent_count = fs.patterns.size();
  return out;
}

/// Per-stage counters of one multilevel run.
struct StageTrace {
  std::size_t original_session_count = 0;
  std::size_t level1_floor_count = 0;
  std::size_t level1_candidate_count = 0;
  double level1_average_support = 0.0;
  std::size_t level1_kept_count = 0;
  std::size_t reduced_session_count = 0;
  std::size_t level2_threshold_base = 0;
  std::size_t level2_min_support_count = 0;
  std::size_t level2_candidate_count = 0;
  std::size_t level2_frequent_count = 0;
  std::size_t rule_count = 0;          // after the confidence filter
  std::size_t recommended_count = 0;   // after top-n
};

using LabeledRule = AssociationRule<std::string>;

template <class Item>
LabeledRule decode_rule(const AssociationRule<Item>& r, const Vocabulary& vocab) {
  LabeledRule out;
  out.level = r.level;
  out.antecedent = vocab.decode(r.antecedent);
  out.consequent = vocab.decode(r.consequent);
  out.support_count = r.support_count;
  out.antecedent_support_count = r.antecedent_support_count;
  out.support_pct = r.support_pct;
  out.confidence_pct = r.confidence_pct;
  return out;
}

struct Recommendation {
  std::vector<LabeledRule> rules;  // ranked
  MiningStats stats;               // level-1 and level-2 counters summed
  StageTrace trace;
};

/// Reduction, level-2 mining, rule generation and ranking on top of an
/// existing level-1 result (which only depends on the floor count).
inline Recommendation recommend_from_level1(std::span<const Session> sessions,
                                            const Level1Result& l1,
                                            const MultilevelParams& params) {
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw StageError("params", e.what());
  }
  const auto reduced = reduce_log(sessions, l1);
  const auto l2 = level2_mine(reduced, params, sessions.size());

  std::vector<AssociationRule<ItemId>> rules = generate_rules(
      l2.frequent, std::span<const std::vector<ItemId>>(l2.log.sequences),
      params.l2_min_confidence_pct);
  const std::size_t generated = rules.size();
  rules = top_n(std::move(rules), params.top_n.value_or(generated));

  Recommendation out;
  out.rules.reserve(rules.size());
  for (const auto& r : rules) out.rules.push_back(decode_rule(r, l2.log.vocabulary));

  out.trace.original_session_count = sessions.size();
  out.trace.level1_floor_count = l1.floor_count;
  out.trace.level1_candidate_count = l1.candidate_count;
  out.trace.level1_average_support = l1.average_support;
  out.trace.level1_kept_count = l1.kept.size();
  out.trace.reduced_session_count = reduced.size();
  out.trace.level2_threshold_base = l2.threshold_base;
  out.trace.level2_min_support_count = l2.min_support_count;
  out.trace.level2_candidate_count = l2.frequent.stats.candidate_count;
  out.trace.level2_frequent_count = l2.frequent.stats.frequent_count;
  out.trace.rule_count = generated;
  out.trace.recommended_count = out.rules.size();

  out.stats.candidate_count = l1.candidate_count + l2.frequent.stats.candidate_count;
  out.stats.frequent_count = l1.kept.size() + l2.frequent.stats.frequent_count;
  out.stats.rule_count = out.rules.size();
  return out;
}

/// The full two-level pipeline: level-1 mining, reduction, level-2 mining,
/// rules, top-n.
inline Recommendation recommend(std::span<const Session> sessions,
                                const MultilevelParams& params) {
  if (sessions.empty()) throw StageError("level1", "no sessions");
  const auto l1 = level1_mine(sessions, params.l1_floor_count, /*keep_candidates=*/false);
  return recommend_from_level1(sessions, l1, params);
}

}  // namespace seqcompose
