#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqcompose/error.hpp"

namespace seqcompose {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_csv_safe(std::string_view s) {
  return !s.empty() && s.find_first_of(",\n\r") == std::string_view::npos;
}

}  // namespace detail

/// Name of a web service. Non-empty, CSV-safe, and free of '.', which is
/// reserved as the service/operation separator in operation-level labels.
struct ServiceId {
  std::string name;

  static bool valid(std::string_view s) {
    return detail::is_csv_safe(s) && s.find('.') == std::string_view::npos;
  }

  friend auto operator<=>(const ServiceId&, const ServiceId&) = default;
};

/// One call of `operation` on `service`.
struct Invocation {
  ServiceId service;
  std::string operation;

  /// Operation-level item label, e.g. "WS3.op2".
  std::string label() const { return service.name + "." + operation; }

  friend auto operator<=>(const Invocation&, const Invocation&) = default;
};

struct LogRecord {
  std::string session_id;
  Timestamp timestamp;
  Invocation invocation;
  std::uint64_t response_time_ms = 0;
  std::uint64_t response_size_bytes = 0;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct Session {
  std::string session_id;
  std::vector<Invocation> invocations;

  friend bool operator==(const Session&, const Session&) = default;
};

enum class HierarchyLevel { ServiceLevel, OperationLevel };

inline std::string_view to_string(HierarchyLevel level) {
  return level == HierarchyLevel::ServiceLevel ? "service" : "operation";
}

inline HierarchyLevel parse_level(std::string_view s) {
  if (s == "service") return HierarchyLevel::ServiceLevel;
  if (s == "operation") return HierarchyLevel::OperationLevel;
  throw ConfigError("unknown hierarchy level '" + std::string(s) + "'");
}

/// An ordered item sequence at one hierarchy level together with the number
/// of sessions that contain it.
template <class Item>
struct Pattern {
  HierarchyLevel level = HierarchyLevel::OperationLevel;
  std::vector<Item> items;
  std::size_t support_count = 0;
  double support_pct = 0.0;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

inline double percent_of(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(count) * 100.0 / static_cast<double>(total);
}

/// Smallest absolute session count whose percentage of `total` is at least
/// `pct`. Never below 1.
inline std::size_t min_support_count(double pct, std::size_t total) {
  const double raw = pct * static_cast<double>(total) / 100.0;
  const auto c = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::max<std::size_t>(c, 1);
}

// ---------------------------------------------------------------------------
// Timestamps
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_digits(std::string_view s, int& out) {
  out = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + (c - '0');
  }
  return !s.empty();
}

}  // namespace detail

/// Parses `YYYY-MM-DDTHH:MM:SS.mmmZ`. Returns false on any deviation.
inline bool parse_timestamp(std::string_view s, Timestamp& out) {
  if (s.size() != 24 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != '.' || s[23] != 'Z')
    return false;
  int y, mo, d, h, mi, sec, ms;
  if (!detail::parse_digits(s.substr(0, 4), y) || !detail::parse_digits(s.substr(5, 2), mo) ||
      !detail::parse_digits(s.substr(8, 2), d) || !detail::parse_digits(s.substr(11, 2), h) ||
      !detail::parse_digits(s.substr(14, 2), mi) || !detail::parse_digits(s.substr(17, 2), sec) ||
      !detail::parse_digits(s.substr(20, 3), ms))
    return false;
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return false;
  out = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{ms};
  return true;
}

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  auto rem = t - day_start;
  const auto h = duration_cast<hours>(rem);
  rem -= h;
  const auto m = duration_cast<minutes>(rem);
  rem -= m;
  const auto s = duration_cast<seconds>(rem);
  rem -= s;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(rem.count()));
  return buf;
}

// ---------------------------------------------------------------------------
// Log CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kLogHeader =
    "session_id,timestamp,service,operation,response_time_ms,response_size_bytes";

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses a header-prefixed log CSV. One record per data row, in file order.
inline std::vector<LogRecord> parse_log(std::istream& in) {
  std::vector<LogRecord> records;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (line != kLogHeader) throw ParseError(1, "unexpected header '" + line + "'");

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 6)
      throw ParseError(lineno, "expected 6 fields, got " + std::to_string(fields.size()));
    LogRecord r;
    if (fields[0].empty()) throw ParseError(lineno, "empty session id");
    r.session_id = std::string(fields[0]);
    if (!parse_timestamp(fields[1], r.timestamp))
      throw ParseError(lineno, "bad timestamp '" + std::string(fields[1]) + "'");
    if (!ServiceId::valid(fields[2]))
      throw ParseError(lineno, "bad service name '" + std::string(fields[2]) + "'");
    r.invocation.service.name = std::string(fields[2]);
    if (fields[3].empty()) throw ParseError(lineno, "empty operation");
    r.invocation.operation = std::string(fields[3]);
    if (!detail::parse_u64(fields[4], r.response_time_ms))
      throw ParseError(lineno, "bad response time '" + std::string(fields[4]) + "'");
    if (!detail::parse_u64(fields[5], r.response_size_bytes))
      throw ParseError(lineno, "bad response size '" + std::string(fields[5]) + "'");
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<LogRecord> parse_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_log(in);
}

inline void write_log(std::ostream& out, std::span<const LogRecord> records) {
  out << kLogHeader << '\n';
  for (const auto& r : records) {
    out << r.session_id << ',' << format_timestamp(r.timestamp) << ','
        << r.invocation.service.name << ',' << r.invocation.operation << ','
        << r.response_time_ms << ',' << r.response_size_bytes << '\n';
  }
}

inline std::string format_log(std::span<const LogRecord> records) {
  std::ostringstream out;
  write_log(out, records);
  return out.str();
}

// ---------------------------------------------------------------------------
// Sessions and projections
// ---------------------------------------------------------------------------

/// Groups records by session id. Sessions appear in order of first
/// appearance; invocations are sorted by timestamp, ties kept in file order.
inline std::vector<Session> sessionize(std::span<const LogRecord> records) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<const LogRecord*>> groups;
  for (const auto& r : records) {
    auto [it, inserted] = index.try_emplace(r.session_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  std::vector<Session> sessions;
  sessions.reserve(groups.size());
  for (auto& g : groups) {
    std::stable_sort(g.begin(), g.end(), [](const LogRecord* a, const LogRecord* b) {
      return a->timestamp < b->timestamp;
    });
    Session s;
    s.session_id = g.front()->session_id;
    s.invocations.reserve(g.size());
    for (const auto* r : g) s.invocations.push_back(r->invocation);
    sessions.push_back(std::move(s));
  }
  return sessions;
}

/// Distinct services of a session in order of first occurrence.
inline std::vector<ServiceId> project_service_level(const Session& session) {
  std::vector<ServiceId> out;
  std::unordered_set<std::string> seen;
  for (const auto& inv : session.invocations) {
    if (seen.insert(inv.service.name).second) out.push_back(inv.service);
  }
  return out;
}

/// True iff `needle` embeds into `haystack` preserving order (gaps allowed).
template <class Item>
bool is_subsequence(std::span<const Item> needle, std::span<const Item> haystack) {
  std::size_t i = 0;
  for (std::size_t j = 0; i < needle.size() && j < haystack.size(); ++j) {
    if (needle[i] == haystack[j]) ++i;
  }
  return i == needle.size();
}

template <class Item>
bool is_subsequence(const std::vector<Item>& needle, const std::vector<Item>& haystack) {
  return is_subsequence(std::span<const Item>(needle), std::span<const Item>(haystack));
}

/// Number of sequences containing `pattern`; each sequence counts once.
template <class Item>
std::size_t support(std::span<const Item> pattern, std::span<const std::vector<Item>> sequences) {
  std::size_t n = 0;
  for (const auto& seq : sequences) {
    if (is_subsequence(pattern, std::span<const Item>(seq))) ++n;
  }
  return n;
}

template <class Item>
std::size_t support(const std::vector<Item>& pattern,
                    const std::vector<std::vector<Item>>& sequences) {
  return support(std::span<const Item>(pattern), std::span<const std::vector<Item>>(sequences));
}

/// Item labels of one session at `level`: service names after dedup
/// projection, or "service.operation" labels of the raw invocation sequence.
inline std::vector<std::string> session_labels(const Session& session, HierarchyLevel level) {
  std::vector<std::string> out;
  if (level == HierarchyLevel::ServiceLevel) {
    for (auto& s : project_service_level(session)) out.push_back(std::move(s.name));
  } else {
    out.reserve(session.invocations.size());
    for (const auto& inv : session.invocations) out.push_back(inv.label());
  }
  return out;
}

/// Support of a labelled pattern over sessions projected to `level`.
inline std::size_t support(const std::vector<std::string>& pattern,
                           std::span<const Session> sessions, HierarchyLevel level) {
  std::size_t n = 0;
  for (const auto& s : sessions) {
    if (is_subsequence(pattern, session_labels(s, level))) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Dense item encoding for the miners
// ---------------------------------------------------------------------------

using ItemId = std::uint32_t;

/// Bijection between item labels and dense ids. Ids follow the lexicographic
/// order of labels, so id order is a canonical, input-order-independent order.
class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    for (std::size_t i = 0; i < labels_.size(); ++i)
      ids_.emplace(labels_[i], static_cast<ItemId>(i));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(ItemId id) const { return labels_.at(id); }

  bool contains(const std::string& label) const { return ids_.contains(label); }
  ItemId id(const std::string& label) const {
    const auto it = ids_.find(label);
    if (it == ids_.end()) throw ConfigError("unknown item '" + label + "'");
    return it->second;
  }

  std::vector<std::string> decode(std::span<const ItemId> items) const {
    std::vector<std::string> out;
    out.reserve(items.size());
    for (ItemId i : items) out.push_back(label(i));
    return out;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, ItemId> ids_;
};

/// Sessions projected to one hierarchy level and encoded as dense ids.
struct EncodedLog {
  HierarchyLevel level = HierarchyLevel::OperationLevel;
  Vocabulary vocabulary;
  std::vector<std::string> session_ids;
  std::vector<std::vector<ItemId>> sequences;
};

inline EncodedLog encode(std::span<const Session> sessions, HierarchyLevel level) {
  std::vector<std::vector<std::string>> labelled;
  labelled.reserve(sessions.size());
  std::vector<std::string> all;
  for (const auto& s : sessions) {
    labelled.push_back(session_labels(s, level));
    all.insert(all.end(), labelled.back().begin(), labelled.back().end());
  }
  EncodedLog log;
  log.level = level;
  log.vocabulary = Vocabulary(std::move(all));
  log.session_ids.reserve(sessions.size());
  log.sequences.reserve(sessions.size());
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    log.session_ids.push_back(sessions[i].session_id);
    std::vector<ItemId> seq;
    seq.reserve(labelled[i].size());
    for (const auto& l : labelled[i]) seq.push_back(log.vocabulary.id(l));
    log.sequences.push_back(std::move(seq));
  }
  return log;
}

// ---------------------------------------------------------------------------
// Hashing of item sequences
// ---------------------------------------------------------------------------

struct SequenceHash {
  template <class Item>
  std::size_t operator()(const std::vector<Item>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (const auto& x : v) {
      h ^= std::hash<Item>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Items usable by the generic miners: totally ordered and hashable.
template <class T>
concept SequenceItem = std::totally_ordered<T> && requires(const T& t) {
  { std::hash<T>{}(t) } -> std::convertible_to<std::size_t>;
};

}  // namespace seqcompose
