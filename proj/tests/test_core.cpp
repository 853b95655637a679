#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "oracle.hpp"

using namespace seqcompose;
using testing_util::names;
using testing_util::session;

namespace {

// Ten rows, three sessions, interleaved and partly out of time order.
constexpr std::string_view kGolden =
    "session_id,timestamp,service,operation,response_time_ms,response_size_bytes\n"
    "u1,2024-01-01T00:00:01.000Z,A,a,10,100\n"
    "u2,2024-01-01T00:00:00.500Z,B,b,11,101\n"
    "u1,2024-01-01T00:00:00.000Z,C,c,12,102\n"
    "u3,2024-01-01T00:00:05.000Z,A,b,13,103\n"
    "u2,2024-01-01T00:00:00.500Z,C,a,14,104\n"
    "u1,2024-01-01T00:00:02.000Z,B,a,15,105\n"
    "u3,2024-01-01T00:00:04.000Z,D,d,16,106\n"
    "u2,2024-01-01T00:00:00.100Z,A,a,17,107\n"
    "u3,2024-01-01T00:00:06.000Z,A,b,18,108\n"
    "u1,2024-01-01T00:00:03.000Z,A,a,19,109\n";

std::vector<std::string> labels(const Session& s) {
  return session_labels(s, HierarchyLevel::OperationLevel);
}

}  // namespace

TEST(Timestamp, RoundTrip) {
  Timestamp t;
  ASSERT_TRUE(parse_timestamp("2024-02-29T23:59:59.999Z", t));
  EXPECT_EQ(format_timestamp(t), "2024-02-29T23:59:59.999Z");
}

TEST(Timestamp, RejectsMalformed) {
  Timestamp t;
  EXPECT_FALSE(parse_timestamp("2024-02-30T00:00:00.000Z", t));
  EXPECT_FALSE(parse_timestamp("2024-01-01 00:00:00.000Z", t));
  EXPECT_FALSE(parse_timestamp("2024-01-01T24:00:00.000Z", t));
  EXPECT_FALSE(parse_timestamp("2024-01-01T00:00:00Z", t));
}

TEST(ParseLog, GoldenFixture) {
  const auto records = parse_log(kGolden);
  ASSERT_EQ(records.size(), 10u);
  EXPECT_EQ(records[0].session_id, "u1");
  EXPECT_EQ(records[0].invocation.label(), "A.a");
  EXPECT_EQ(records[9].response_time_ms, 19u);
  EXPECT_EQ(records[9].response_size_bytes, 109u);
}

TEST(ParseLog, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_log(std::string(kLogHeader) + "\n").empty());
}

TEST(ParseLog, MissingHeader) {
  try {
    parse_log("u1,2024-01-01T00:00:01.000Z,A,a,10,100\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse_log(""), ParseError);
}

TEST(ParseLog, ReportsLineOfBadRow) {
  const std::string text = std::string(kLogHeader) +
                           "\nu1,2024-01-01T00:00:01.000Z,A,a,10,100\n"
                           "u1,2024-01-01T00:00:01.000Z,A,a,10\n";
  try {
    parse_log(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.kind(), "parse");
  }
}

TEST(ParseLog, RejectsBadFields) {
  const std::string h = std::string(kLogHeader) + "\n";
  EXPECT_THROW(parse_log(h + "u1,yesterday,A,a,1,1\n"), ParseError);
  EXPECT_THROW(parse_log(h + "u1,2024-01-01T00:00:01.000Z,A.x,a,1,1\n"), ParseError);
  EXPECT_THROW(parse_log(h + "u1,2024-01-01T00:00:01.000Z,A,,1,1\n"), ParseError);
  EXPECT_THROW(parse_log(h + "u1,2024-01-01T00:00:01.000Z,A,a,-1,1\n"), ParseError);
  EXPECT_THROW(parse_log(h + ",2024-01-01T00:00:01.000Z,A,a,1,1\n"), ParseError);
}

TEST(ParseLog, WriteRoundTrip) {
  const auto records = parse_log(kGolden);
  EXPECT_EQ(format_log(records), kGolden);
}

TEST(Sessionize, GoldenFixture) {
  const auto records = parse_log(kGolden);
  const auto sessions = sessionize(records);
  ASSERT_EQ(sessions.size(), 3u);
  EXPECT_EQ(sessions[0].session_id, "u1");
  EXPECT_EQ(sessions[1].session_id, "u2");
  EXPECT_EQ(sessions[2].session_id, "u3");
  EXPECT_EQ(labels(sessions[0]), (std::vector<std::string>{"C.c", "A.a", "B.a", "A.a"}));
  // B.b and C.a share a timestamp: file order is kept.
  EXPECT_EQ(labels(sessions[1]), (std::vector<std::string>{"A.a", "B.b", "C.a"}));
  EXPECT_EQ(labels(sessions[2]), (std::vector<std::string>{"D.d", "A.b", "A.b"}));
}

TEST(Sessionize, PreservesEveryRecord) {
  const auto records = parse_log(kGolden);
  std::size_t n = 0;
  for (const auto& s : sessionize(records)) n += s.invocations.size();
  EXPECT_EQ(n, records.size());
}

TEST(Projection, WorkedExample) {
  const auto s = session("x", {"A(a)", "A(b)", "C(d)", "D(a)", "A(c)"});
  EXPECT_EQ(names(project_service_level(s)), (std::vector<std::string>{"A", "C", "D"}));
}

TEST(Projection, EmptyAndSingle) {
  EXPECT_TRUE(project_service_level(session("x", {})).empty());
  EXPECT_EQ(names(project_service_level(session("x", {"B(a)", "B(b)"}))),
            (std::vector<std::string>{"B"}));
}

TEST(Projection, DistinctAndOrderPreserving) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> calls;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i)
      calls.push_back(std::string(1, static_cast<char>('A' + rng() % 5)) + "(o" +
                      std::to_string(rng() % 3) + ")");
    const auto s = session("x", calls);
    const auto p = names(project_service_level(s));
    std::set<std::string> unique(p.begin(), p.end());
    EXPECT_EQ(unique.size(), p.size());
    std::vector<std::string> services;
    for (const auto& inv : s.invocations) services.push_back(inv.service.name);
    EXPECT_TRUE(is_subsequence(p, services));
    EXPECT_EQ(unique, std::set<std::string>(services.begin(), services.end()));
  }
}

TEST(Subsequence, Examples) {
  const auto s = testing_util::seqs({"ABCAB"})[0];
  EXPECT_TRUE(is_subsequence(testing_util::seqs({"AC"})[0], s));
  EXPECT_TRUE(is_subsequence(testing_util::seqs({"BB"})[0], s));
  EXPECT_TRUE(is_subsequence(testing_util::seqs({"ABCAB"})[0], s));
  EXPECT_FALSE(is_subsequence(testing_util::seqs({"CC"})[0], s));
  EXPECT_FALSE(is_subsequence(testing_util::seqs({"BAC"})[0], s));
  EXPECT_TRUE(is_subsequence(std::vector<char>{}, s));
}

TEST(Support, Examples) {
  const auto log = testing_util::seqs({"ABC", "AC", "BC", "AB"});
  EXPECT_EQ(support(testing_util::seqs({"AB"})[0], log), 2u);
  EXPECT_EQ(support(testing_util::seqs({"ABC"})[0], log), 1u);
  EXPECT_EQ(support(testing_util::seqs({"C"})[0], log), 3u);
}

TEST(Support, CountsEachSessionOnce) {
  const auto log = testing_util::seqs({"AAAA", "A"});
  EXPECT_EQ(support(testing_util::seqs({"A"})[0], log), 2u);
}

TEST(Support, LabelledSessionsAtBothLevels) {
  const std::vector<Session> sessions = {session("1", {"A(a)", "A(b)", "B(a)"}),
                                         session("2", {"B(a)", "A(a)"})};
  EXPECT_EQ(support({"A", "B"}, sessions, HierarchyLevel::ServiceLevel), 1u);
  EXPECT_EQ(support({"A.a"}, sessions, HierarchyLevel::OperationLevel), 2u);
  EXPECT_EQ(support({"A.b", "B.a"}, sessions, HierarchyLevel::OperationLevel), 1u);
  EXPECT_EQ(support({"A", "A"}, sessions, HierarchyLevel::ServiceLevel), 0u);
}

// Every subsequence of a pattern has support at least that of the pattern.
TEST(Property, AntiMonotonicity) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto log = oracle::random_log(rng, 8, 6, 4);
    for (const auto& [p, c] : oracle::all_supports(log)) {
      EXPECT_EQ(support(p, log), c);
      for (std::size_t drop = 0; drop < p.size() && p.size() > 1; ++drop) {
        auto sub = p;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        EXPECT_GE(support(sub, log), c);
      }
    }
  }
}

TEST(Property, SubsequenceMatchesEnumeration) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pair = oracle::random_log(rng, 2, 6, 3);
    if (pair.size() < 2) continue;
    EXPECT_EQ(is_subsequence(pair[0], pair[1]), oracle::contains(pair[1], pair[0]));
  }
}

TEST(MinSupportCount, CeilingOfPercent) {
  EXPECT_EQ(min_support_count(3.5, 1000), 35u);
  EXPECT_EQ(min_support_count(3.7, 1000), 37u);
  EXPECT_EQ(min_support_count(50, 5), 3u);
  EXPECT_EQ(min_support_count(60, 5), 3u);
  EXPECT_EQ(min_support_count(100, 4), 4u);
  EXPECT_EQ(min_support_count(0.001, 10), 1u);
}

TEST(Vocabulary, LexicographicIds) {
  const Vocabulary v({"b", "a", "c", "a"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v.id("a"), 0u);
  EXPECT_EQ(v.id("c"), 2u);
  EXPECT_EQ(v.label(1), "b");
  EXPECT_THROW(v.id("zz"), ConfigError);
}

TEST(Encode, ServiceLevelUsesProjection) {
  const std::vector<Session> sessions = {session("1", {"B(a)", "A(b)", "B(c)"})};
  const auto log = encode(sessions, HierarchyLevel::ServiceLevel);
  ASSERT_EQ(log.sequences.size(), 1u);
  EXPECT_EQ(log.vocabulary.decode(log.sequences[0]), (std::vector<std::string>{"B", "A"}));
  const auto ops = encode(sessions, HierarchyLevel::OperationLevel);
  EXPECT_EQ(ops.vocabulary.decode(ops.sequences[0]),
            (std::vector<std::string>{"B.a", "A.b", "B.c"}));
}
