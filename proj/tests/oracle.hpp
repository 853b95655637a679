#pragma once

// Brute-force reference for the miners. Shares nothing with the library's
// mining code: supports come from enumerating every index subset of every
// session, and closedness from pairwise comparison of all frequent patterns.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Seq = std::vector<char>;

/// All distinct subsequences (non-empty) of one session.
inline std::set<Seq> subsequences(const Seq& s) {
  std::set<Seq> out;
  const std::uint32_t n = static_cast<std::uint32_t>(s.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Seq sub;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sub.push_back(s[i]);
    out.insert(std::move(sub));
  }
  return out;
}

/// Support of every subsequence occurring in at least one session.
inline std::map<Seq, std::size_t> all_supports(const std::vector<Seq>& sessions) {
  std::map<Seq, std::size_t> counts;
  for (const auto& s : sessions)
    for (const auto& sub : subsequences(s)) ++counts[sub];
  return counts;
}

inline std::map<Seq, std::size_t> frequent(const std::vector<Seq>& sessions,
                                           std::size_t min_count) {
  std::map<Seq, std::size_t> out;
  for (const auto& [p, c] : all_supports(sessions))
    if (c >= min_count) out.emplace(p, c);
  return out;
}

inline bool contains(const Seq& super, const Seq& sub) {
  return subsequences(super).contains(sub);
}

inline std::map<Seq, std::size_t> closed(const std::map<Seq, std::size_t>& freq) {
  std::map<Seq, std::size_t> out;
  for (const auto& [p, c] : freq) {
    bool absorbed = false;
    for (const auto& [q, d] : freq) {
      if (q.size() > p.size() && d == c && contains(q, p)) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) out.emplace(p, c);
  }
  return out;
}

/// Random log: up to max_sessions sessions of length 1..max_len over the
/// first `alphabet` letters.
inline std::vector<Seq> random_log(std::mt19937& rng, std::size_t max_sessions,
                                   std::size_t max_len, std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> n_sessions(1, max_sessions);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> item(0, alphabet - 1);
  std::vector<Seq> log(n_sessions(rng));
  for (auto& s : log) {
    s.resize(len(rng));
    for (auto& c : s) c = static_cast<char>('A' + item(rng));
  }
  return log;
}

}  // namespace oracle
