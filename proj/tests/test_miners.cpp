#include <gtest/gtest.h>

#include <map>
#include <random>

#include "helpers.hpp"
#include "oracle.hpp"

using namespace seqcompose;
using testing_util::seqs;

namespace {

using Seq = std::vector<char>;
using Log = std::vector<Seq>;

MiningParams at(double pct) { return MiningParams{pct, 0.0, HierarchyLevel::OperationLevel, {}}; }

std::map<Seq, std::size_t> as_map(const FrequentSet<char>& fs) {
  std::map<Seq, std::size_t> out;
  for (const auto& p : fs.patterns) out.emplace(p.items, p.support_count);
  return out;
}

const Log kTiny = seqs({"ABC", "AC", "BC", "AB"});

// Frozen from oracle::frequent(kTiny, 2).
const std::map<Seq, std::size_t> kTinyAt50 = {{{'A'}, 3},      {{'B'}, 3},      {{'C'}, 3},
                                              {{'A', 'B'}, 2}, {{'A', 'C'}, 2}, {{'B', 'C'}, 2}};

AssociationRule<char> rule(std::string ante, std::string cons, std::size_t sup,
                           std::size_t ante_sup) {
  AssociationRule<char> r;
  r.antecedent.assign(ante.begin(), ante.end());
  r.consequent.assign(cons.begin(), cons.end());
  r.support_count = sup;
  r.antecedent_support_count = ante_sup;
  r.confidence_pct = percent_of(sup, ante_sup);
  return r;
}

}  // namespace

TEST(Oracle, TinyLogFrozenValues) {
  EXPECT_EQ(oracle::frequent(kTiny, 2), kTinyAt50);
}

TEST(Apriori, TinyLog) {
  const auto fs = mine_apriori(std::span<const Seq>(kTiny), at(50));
  EXPECT_EQ(as_map(fs), kTinyAt50);
  EXPECT_EQ(fs.stats.frequent_count, 6u);
  EXPECT_GE(fs.stats.candidate_count, fs.stats.frequent_count);
  // Canonical order: length, then lexicographic.
  EXPECT_EQ(fs.patterns.front().items, Seq{'A'});
  EXPECT_EQ(fs.patterns.back().items, (Seq{'B', 'C'}));
  EXPECT_DOUBLE_EQ(fs.patterns.front().support_pct, 75.0);
}

TEST(Apriori, FullThresholdIsEmpty) {
  EXPECT_TRUE(mine_apriori(std::span<const Seq>(kTiny), at(100)).patterns.empty());
}

TEST(Apriori, SingleSessionEverythingFrequent) {
  const auto log = seqs({"AB"});
  const std::map<Seq, std::size_t> expected = {{{'A'}, 1}, {{'B'}, 1}, {{'A', 'B'}, 1}};
  EXPECT_EQ(as_map(mine_apriori(std::span<const Seq>(log), at(100))), expected);
}

TEST(Apriori, RejectsBadParams) {
  EXPECT_THROW(mine_apriori(std::span<const Seq>(kTiny), at(0)), ConfigError);
  EXPECT_THROW(mine_apriori(std::span<const Seq>(kTiny), at(101)), ConfigError);
  auto p = at(50);
  p.min_confidence_pct = -1;
  EXPECT_THROW(mine_apriori(std::span<const Seq>(kTiny), p), ConfigError);
}

TEST(Apriori, MaxPatternLength) {
  const auto log = seqs({"ABCD", "ABCD"});
  auto p = at(50);
  p.max_pattern_length = 2;
  for (const auto& pat : mine_apriori(std::span<const Seq>(log), p).patterns)
    EXPECT_LE(pat.items.size(), 2u);
}

TEST(PatternGrowth, TinyLogMatchesApriori) {
  const auto a = mine_apriori(std::span<const Seq>(kTiny), at(50));
  const auto g = mine_patterngrowth(std::span<const Seq>(kTiny), at(50));
  EXPECT_EQ(g.patterns, a.patterns);
  // One projected database per frequent pattern.
  EXPECT_EQ(g.stats.candidate_count, g.stats.frequent_count);
}

TEST(PatternGrowth, EmptyInput) {
  const Log empty;
  EXPECT_TRUE(mine_patterngrowth(std::span<const Seq>(empty), at(50)).patterns.empty());
  EXPECT_TRUE(mine_apriori(std::span<const Seq>(empty), at(50)).patterns.empty());
  EXPECT_TRUE(mine_closed(std::span<const Seq>(empty), at(50)).patterns.empty());
}

TEST(PatternGrowth, RepeatedItems) {
  const auto log = seqs({"AAB", "ABA", "BAA"});
  EXPECT_EQ(as_map(mine_patterngrowth(std::span<const Seq>(log), at(60))),
            oracle::frequent(log, 2));
}

TEST(Closed, TinyLogAllClosed) {
  EXPECT_EQ(as_map(mine_closed(std::span<const Seq>(kTiny), at(50))), kTinyAt50);
}

TEST(Closed, AbsorbsEqualSupportSubsequences) {
  const auto log = seqs({"AB", "AB"});
  const std::map<Seq, std::size_t> expected = {{{'A', 'B'}, 2}};
  EXPECT_EQ(as_map(mine_closed(std::span<const Seq>(log), at(50))), expected);
}

TEST(Rules, TinyLogConfidence) {
  const auto fs = mine_apriori(std::span<const Seq>(kTiny), at(50));
  const auto rules = generate_rules(fs, std::span<const Seq>(kTiny), 0.0);
  ASSERT_EQ(rules.size(), 3u);
  const auto& r = rules.front();
  EXPECT_EQ(r.antecedent, Seq{'A'});
  EXPECT_EQ(r.consequent, Seq{'B'});
  EXPECT_EQ(r.support_count, 2u);
  EXPECT_EQ(r.antecedent_support_count, 3u);
  EXPECT_NEAR(r.confidence_pct, 66.67, 0.005);
  EXPECT_DOUBLE_EQ(r.support_pct, 50.0);

  EXPECT_EQ(generate_rules(fs, std::span<const Seq>(kTiny), 66.0).size(), 3u);
  EXPECT_TRUE(generate_rules(fs, std::span<const Seq>(kTiny), 67.0).empty());
}

TEST(Rules, SingletonsGiveNoRules) {
  const auto log = seqs({"A", "B"});
  const auto fs = mine_apriori(std::span<const Seq>(log), at(50));
  EXPECT_TRUE(generate_rules(fs, std::span<const Seq>(log), 0.0).empty());
}

TEST(Rules, EverySplitOfLongPatterns) {
  const auto log = seqs({"ABC", "ABC"});
  const auto fs = mine_apriori(std::span<const Seq>(log), at(100));
  // AB, AC, BC give one split each; ABC gives two.
  EXPECT_EQ(generate_rules(fs, std::span<const Seq>(log), 0.0).size(), 5u);
}

TEST(Rules, ClosedSetPrefixesCountedOnDemand) {
  const auto log = seqs({"AB", "AB"});
  const auto closed = mine_closed(std::span<const Seq>(log), at(50));
  const auto rules = generate_rules(closed, std::span<const Seq>(log), 0.0);
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].antecedent_support_count, 2u);
  EXPECT_DOUBLE_EQ(rules[0].confidence_pct, 100.0);
}

TEST(TopN, HighestConfidenceFirst) {
  std::vector<AssociationRule<char>> rules = {rule("A", "B", 1, 4), rule("A", "C", 3, 4),
                                              rule("B", "C", 2, 4)};
  const auto top = top_n(rules, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].consequent, Seq{'C'});
  EXPECT_EQ(top[0].antecedent, Seq{'A'});
  EXPECT_EQ(top[1].antecedent, Seq{'B'});
}

TEST(TopN, TieBreaks) {
  // Equal confidence: higher support first.
  auto top = top_n(std::vector{rule("A", "B", 1, 2), rule("C", "D", 3, 6)}, 5);
  EXPECT_EQ(top[0].antecedent, Seq{'C'});
  // Equal confidence and support: canonical order of the full sequence.
  top = top_n(std::vector{rule("B", "A", 2, 4), rule("A", "B", 2, 4), rule("A", "BC", 2, 4)}, 5);
  EXPECT_EQ(top[0].sequence(), (Seq{'A', 'B'}));
  EXPECT_EQ(top[1].sequence(), (Seq{'B', 'A'}));
  EXPECT_EQ(top[2].sequence(), (Seq{'A', 'B', 'C'}));
  // Same sequence: shorter antecedent first.
  top = top_n(std::vector{rule("AB", "C", 2, 4), rule("A", "BC", 2, 4)}, 5);
  EXPECT_EQ(top[0].antecedent.size(), 1u);
}

TEST(TopN, LargeAndZeroN) {
  std::vector<AssociationRule<char>> rules = {rule("A", "B", 1, 4), rule("A", "C", 3, 4)};
  EXPECT_EQ(top_n(rules, 10).size(), 2u);
  EXPECT_TRUE(top_n(rules, 0).empty());
}

// Exact confidence comparison: 1/3 and 333333/1000000 differ only in the
// seventh digit.
TEST(TopN, ExactRatioComparison) {
  const auto top = top_n(std::vector{rule("A", "B", 333333, 1000000), rule("C", "D", 1, 3)}, 2);
  EXPECT_EQ(top[0].antecedent, Seq{'C'});
}

// ---------------------------------------------------------------------------
// Properties against the brute-force oracle
// ---------------------------------------------------------------------------

TEST(Property, MinersMatchOracle) {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> pct(1.0, 100.0);
  for (int trial = 0; trial < 150; ++trial) {
    const auto log = oracle::random_log(rng, 8, 6, 5);
    const double p = pct(rng);
    const auto expected = oracle::frequent(log, min_support_count(p, log.size()));
    const std::span<const Seq> span(log);
    EXPECT_EQ(as_map(mine_apriori(span, at(p))), expected) << "trial " << trial;
    EXPECT_EQ(as_map(mine_patterngrowth(span, at(p))), expected) << "trial " << trial;
    EXPECT_EQ(as_map(mine_closed(span, at(p))), oracle::closed(expected)) << "trial " << trial;
  }
}

TEST(Property, CandidateCounts) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto log = oracle::random_log(rng, 8, 6, 4);
    const std::span<const Seq> span(log);
    const auto a = mine_apriori(span, at(30));
    const auto g = mine_patterngrowth(span, at(30));
    EXPECT_GE(a.stats.candidate_count, a.stats.frequent_count);
    EXPECT_EQ(g.stats.candidate_count, g.stats.frequent_count);
    EXPECT_LE(g.stats.candidate_count, a.stats.candidate_count);
  }
}

TEST(Property, ThresholdMonotonicity) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto log = oracle::random_log(rng, 8, 6, 4);
    const std::span<const Seq> span(log);
    auto prev = as_map(mine_patterngrowth(span, at(5)));
    auto prev_rules = generate_rules(mine_patterngrowth(span, at(5)), span, 10.0).size();
    for (double p : {20.0, 40.0, 60.0, 80.0, 100.0}) {
      const auto fs = mine_patterngrowth(span, at(p));
      const auto cur = as_map(fs);
      for (const auto& [pat, sup] : cur) {
        ASSERT_TRUE(prev.contains(pat));
        EXPECT_EQ(prev.at(pat), sup);
      }
      const auto n_rules = generate_rules(fs, span, 10.0).size();
      EXPECT_LE(n_rules, prev_rules);
      prev = cur;
      prev_rules = n_rules;
    }
  }
}

TEST(Property, RulesMatchOracleConfidence) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto log = oracle::random_log(rng, 8, 6, 4);
    const std::span<const Seq> span(log);
    const auto all = oracle::all_supports(log);
    const auto fs = mine_apriori(span, at(25));
    for (const auto& r : generate_rules(fs, span, 0.0)) {
      EXPECT_EQ(r.support_count, all.at(r.sequence()));
      EXPECT_EQ(r.antecedent_support_count, all.at(r.antecedent));
      EXPECT_LE(r.confidence_pct, 100.0);
    }
  }
}

TEST(Strings, MinersWorkOnLabels) {
  const std::vector<std::vector<std::string>> log = {{"WS1.op1", "WS2.op3"}, {"WS1.op1", "WS2.op3"}};
  const auto fs = mine_patterngrowth(std::span<const std::vector<std::string>>(log), at(100));
  EXPECT_EQ(fs.patterns.size(), 3u);
}
