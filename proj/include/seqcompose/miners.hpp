#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqcompose/core.hpp"

namespace seqcompose {

struct MiningParams {
  double min_support_pct = 3.5;
  double min_confidence_pct = 0.0;
  HierarchyLevel level = HierarchyLevel::OperationLevel;
  std::optional<std::size_t> max_pattern_length;

  void validate() const {
    if (!(min_support_pct > 0.0 && min_support_pct <= 100.0))
      throw ConfigError("min support must be in (0, 100], got " + std::to_string(min_support_pct));
    if (!(min_confidence_pct >= 0.0 && min_confidence_pct <= 100.0))
      throw ConfigError("min confidence must be in [0, 100], got " +
                        std::to_string(min_confidence_pct));
    if (max_pattern_length && *max_pattern_length < 2)
      throw ConfigError("max pattern length must be at least 2");
  }
};

/// Counters reported by every miner. `candidate_count` is algorithm specific:
/// generated candidates for Apriori, projected databases for pattern growth.
struct MiningStats {
  std::size_t candidate_count = 0;
  std::size_t frequent_count = 0;
  std::size_t rule_count = 0;

  friend bool operator==(const MiningStats&, const MiningStats&) = default;
};

/// Length ascending, then item-wise lexicographic.
template <class Item>
bool canonical_less(const std::vector<Item>& a, const std::vector<Item>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

template <class Item>
struct FrequentSet {
  HierarchyLevel level = HierarchyLevel::OperationLevel;
  std::size_t total_sessions = 0;
  std::vector<Pattern<Item>> patterns;
  MiningStats stats;

  std::unordered_map<std::vector<Item>, std::size_t, SequenceHash> support_index() const {
    std::unordered_map<std::vector<Item>, std::size_t, SequenceHash> idx;
    idx.reserve(patterns.size());
    for (const auto& p : patterns) idx.emplace(p.items, p.support_count);
    return idx;
  }
};

namespace detail {

template <class Item>
void sort_canonical(std::vector<Pattern<Item>>& patterns) {
  std::sort(patterns.begin(), patterns.end(),
            [](const Pattern<Item>& a, const Pattern<Item>& b) {
              return canonical_less(a.items, b.items);
            });
}

template <class Item>
Pattern<Item> make_pattern(HierarchyLevel level, std::vector<Item> items, std::size_t count,
                           std::size_t total) {
  return Pattern<Item>{level, std::move(items), count, percent_of(count, total)};
}

inline std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Level-wise (GSP style) Apriori
// ---------------------------------------------------------------------------

/// Exact frequent-sequence mining by level-wise candidate generation.
/// L(k+1) candidates join p, q in Lk with p[1..] == q[..k-1] and are pruned
/// unless every one-item deletion is in Lk. Support is counted only over the
/// sessions shared by both parents.
template <SequenceItem Item>
FrequentSet<Item> mine_apriori(std::span<const std::vector<Item>> sequences,
                               const MiningParams& params) {
  params.validate();
  FrequentSet<Item> out;
  out.level = params.level;
  out.total_sessions = sequences.size();
  if (sequences.empty()) return out;

  const std::size_t min_count = min_support_count(params.min_support_pct, sequences.size());
  const std::size_t max_len = params.max_pattern_length.value_or(SIZE_MAX);

  struct Entry {
    std::vector<Item> items;
    std::vector<std::uint32_t> sessions;  // ascending
  };

  // L1
  std::vector<Entry> level;
  {
    std::unordered_map<Item, std::vector<std::uint32_t>> occ;
    for (std::uint32_t sid = 0; sid < sequences.size(); ++sid) {
      for (const auto& item : sequences[sid]) {
        auto& v = occ[item];
        if (v.empty() || v.back() != sid) v.push_back(sid);
      }
    }
    out.stats.candidate_count += occ.size();
    for (auto& [item, sids] : occ) {
      if (sids.size() >= min_count) level.push_back(Entry{{item}, std::move(sids)});
    }
    std::sort(level.begin(), level.end(),
              [](const Entry& a, const Entry& b) { return a.items < b.items; });
  }

  for (std::size_t k = 1; !level.empty(); ++k) {
    for (const auto& e : level)
      out.patterns.push_back(
          detail::make_pattern(params.level, e.items, e.sessions.size(), sequences.size()));
    if (k >= max_len) break;

    std::unordered_map<std::vector<Item>, std::vector<std::size_t>, SequenceHash> by_prefix;
    std::unordered_set<std::vector<Item>, SequenceHash> members;
    for (std::size_t i = 0; i < level.size(); ++i) {
      by_prefix[std::vector<Item>(level[i].items.begin(), level[i].items.end() - 1)].push_back(i);
      members.insert(level[i].items);
    }

    std::vector<Entry> next;
    std::vector<Item> probe;
    for (const auto& p : level) {
      const std::vector<Item> suffix(p.items.begin() + 1, p.items.end());
      const auto it = by_prefix.find(suffix);
      if (it == by_prefix.end()) continue;
      for (std::size_t qi : it->second) {
        const auto& q = level[qi];
        std::vector<Item> cand = p.items;
        cand.push_back(q.items.back());

        // Deleting the first or last item yields q or p; check the interior.
        bool pruned = false;
        for (std::size_t drop = 1; drop + 1 < cand.size() && !pruned; ++drop) {
          probe.assign(cand.begin(), cand.begin() + drop);
          probe.insert(probe.end(), cand.begin() + drop + 1, cand.end());
          pruned = !members.contains(probe);
        }
        if (pruned) continue;
        ++out.stats.candidate_count;

        Entry e{std::move(cand), {}};
        for (std::uint32_t sid : detail::intersect(p.sessions, q.sessions)) {
          if (is_subsequence(std::span<const Item>(e.items), std::span<const Item>(sequences[sid])))
            e.sessions.push_back(sid);
        }
        if (e.sessions.size() >= min_count) next.push_back(std::move(e));
      }
    }
    level = std::move(next);
  }

  detail::sort_canonical(out.patterns);
  out.stats.frequent_count = out.patterns.size();
  return out;
}

// ---------------------------------------------------------------------------
// Pattern growth (PrefixSpan style pseudo-projection)
// ---------------------------------------------------------------------------

/// Position of a projected suffix: scanning resumes at sequences[session][pos].
struct Projection {
  std::uint32_t session;
  std::uint32_t pos;
};

/// Depth-first enumeration of every sequence with support >= min_count and
/// length <= max_len. Calls `visit(items, projections)` for each, where
/// projections.size() is the support and lists the supporting sessions in
/// ascending order. Returns the number of projected databases built.
template <SequenceItem Item, class Visitor>
std::size_t grow_patterns(std::span<const std::vector<Item>> sequences, std::size_t min_count,
                          std::size_t max_len, Visitor&& visit) {
  struct Hit {
    Item item;
    Projection proj;
  };
  std::size_t explored = 0;
  std::vector<Item> prefix;

  auto expand = [&](auto&& self, const std::vector<Projection>& db) -> void {
    if (prefix.size() >= max_len) return;
    std::vector<Hit> hits;
    for (const auto& pr : db) {
      const auto& seq = sequences[pr.session];
      for (std::size_t j = pr.pos; j < seq.size(); ++j) {
        const bool first =
            std::find(seq.begin() + pr.pos, seq.begin() + j, seq[j]) == seq.begin() + j;
        if (first) hits.push_back({seq[j], {pr.session, static_cast<std::uint32_t>(j + 1)}});
      }
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Hit& a, const Hit& b) { return a.item < b.item; });

    std::vector<Projection> child;
    for (std::size_t i = 0; i < hits.size();) {
      std::size_t j = i;
      while (j < hits.size() && hits[j].item == hits[i].item) ++j;
      if (j - i >= min_count) {
        child.clear();
        for (std::size_t h = i; h < j; ++h) child.push_back(hits[h].proj);
        ++explored;
        prefix.push_back(hits[i].item);
        visit(static_cast<const std::vector<Item>&>(prefix),
              std::span<const Projection>(child));
        self(self, std::vector<Projection>(child));
        prefix.pop_back();
      }
      i = j;
    }
  };

  std::vector<Projection> root;
  root.reserve(sequences.size());
  for (std::uint32_t sid = 0; sid < sequences.size(); ++sid) root.push_back({sid, 0});
  expand(expand, root);
  return explored;
}

/// Same frequent set as mine_apriori, found by depth-first projection.
template <SequenceItem Item>
FrequentSet<Item> mine_patterngrowth(std::span<const std::vector<Item>> sequences,
                                     const MiningParams& params) {
  params.validate();
  FrequentSet<Item> out;
  out.level = params.level;
  out.total_sessions = sequences.size();
  if (sequences.empty()) return out;

  const std::size_t min_count = min_support_count(params.min_support_pct, sequences.size());
  out.stats.candidate_count = grow_patterns(
      sequences, min_count, params.max_pattern_length.value_or(SIZE_MAX),
      [&](const std::vector<Item>& items, std::span<const Projection> proj) {
        out.patterns.push_back(
            detail::make_pattern(params.level, items, proj.size(), sequences.size()));
      });
  detail::sort_canonical(out.patterns);
  out.stats.frequent_count = out.patterns.size();
  return out;
}

/// Keeps the patterns with no one-item-longer frequent super-sequence of
/// equal support. Checking length+1 suffices: any equal-support
/// super-sequence implies an equal-support one exactly one item longer.
template <SequenceItem Item>
FrequentSet<Item> closed_filter(const FrequentSet<Item>& frequent) {
  const auto index = frequent.support_index();
  std::unordered_set<std::vector<Item>, SequenceHash> absorbed;
  std::vector<Item> probe;
  for (const auto& q : frequent.patterns) {
    if (q.items.size() < 2) continue;
    for (std::size_t drop = 0; drop < q.items.size(); ++drop) {
      probe.assign(q.items.begin(), q.items.begin() + drop);
      probe.insert(probe.end(), q.items.begin() + drop + 1, q.items.end());
      const auto it = index.find(probe);
      if (it != index.end() && it->second == q.support_count) absorbed.insert(probe);
    }
  }
  FrequentSet<Item> out;
  out.level = frequent.level;
  out.total_sessions = frequent.total_sessions;
  out.stats.candidate_count = frequent.stats.candidate_count;
  for (const auto& p : frequent.patterns) {
    if (!absorbed.contains(p.items)) out.patterns.push_back(p);
  }
  out.stats.frequent_count = out.patterns.size();
  return out;
}

/// Closed frequent sequences, as a post-filter over pattern growth. A
/// max_pattern_length cap makes patterns at the cap boundary look closed.
template <SequenceItem Item>
FrequentSet<Item> mine_closed(std::span<const std::vector<Item>> sequences,
                              const MiningParams& params) {
  return closed_filter(mine_patterngrowth(sequences, params));
}

// ---------------------------------------------------------------------------
// Association rules
// ---------------------------------------------------------------------------

template <class Item>
struct AssociationRule {
  HierarchyLevel level = HierarchyLevel::OperationLevel;
  std::vector<Item> antecedent;
  std::vector<Item> consequent;
  std::size_t support_count = 0;             // of antecedent ++ consequent
  std::size_t antecedent_support_count = 0;
  double support_pct = 0.0;
  double confidence_pct = 0.0;

  std::vector<Item> sequence() const {
    std::vector<Item> s = antecedent;
    s.insert(s.end(), consequent.begin(), consequent.end());
    return s;
  }

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

/// Prefix => suffix rules for every split of every frequent pattern of
/// length >= 2 whose confidence reaches `min_confidence_pct`. Prefix
/// supports missing from `frequent` (e.g. a closed set) are counted on
/// `sequences`.
template <SequenceItem Item>
std::vector<AssociationRule<Item>> generate_rules(const FrequentSet<Item>& frequent,
                                                  std::span<const std::vector<Item>> sequences,
                                                  double min_confidence_pct) {
  auto index = frequent.support_index();
  const std::size_t total = frequent.total_sessions ? frequent.total_sessions : sequences.size();
  std::vector<AssociationRule<Item>> rules;
  std::vector<Item> prefix;
  for (const auto& p : frequent.patterns) {
    for (std::size_t split = 1; split < p.items.size(); ++split) {
      prefix.assign(p.items.begin(), p.items.begin() + split);
      auto it = index.find(prefix);
      if (it == index.end())
        it = index.emplace(prefix, support(std::span<const Item>(prefix), sequences)).first;
      const std::size_t prefix_support = it->second;
      if (prefix_support == 0) continue;
      const double confidence = percent_of(p.support_count, prefix_support);
      if (static_cast<double>(p.support_count) * 100.0 <
          min_confidence_pct * static_cast<double>(prefix_support) - 1e-9)
        continue;
      AssociationRule<Item> r;
      r.level = p.level;
      r.antecedent = prefix;
      r.consequent.assign(p.items.begin() + split, p.items.end());
      r.support_count = p.support_count;
      r.antecedent_support_count = prefix_support;
      r.support_pct = percent_of(p.support_count, total);
      r.confidence_pct = confidence;
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

/// Ranking order: confidence desc, support desc, then canonical order of the
/// full sequence, then shorter antecedent first.
template <class Item>
bool rule_rank_less(const AssociationRule<Item>& a, const AssociationRule<Item>& b) {
  // Compare a.sup/a.ante against b.sup/b.ante exactly.
  const auto lhs = static_cast<unsigned __int128>(a.support_count) * b.antecedent_support_count;
  const auto rhs = static_cast<unsigned __int128>(b.support_count) * a.antecedent_support_count;
  if (lhs != rhs) return lhs > rhs;
  if (a.support_count != b.support_count) return a.support_count > b.support_count;
  const auto sa = a.sequence();
  const auto sb = b.sequence();
  if (sa != sb) return canonical_less(sa, sb);
  return a.antecedent.size() < b.antecedent.size();
}

template <class Item>
std::vector<AssociationRule<Item>> top_n(std::vector<AssociationRule<Item>> rules, std::size_t n) {
  std::stable_sort(rules.begin(), rules.end(), rule_rank_less<Item>);
  if (rules.size() > n) rules.resize(n);
  return rules;
}

}  // namespace seqcompose
