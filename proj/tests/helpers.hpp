#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "seqcompose/seqcompose.hpp"

namespace testing_util {

namespace sc = seqcompose;

/// Fresh scratch directory under the build tree (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("SEQCOMPOSE_TEST_TMP");
  const std::filesystem::path root =
      base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "seqcompose";
  const auto dir = root / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Session from "Service(op)" tokens, e.g. {"A(a)", "C(d)"}.
inline sc::Session session(std::string id, const std::vector<std::string>& calls) {
  sc::Session s{std::move(id), {}};
  for (const auto& c : calls) {
    const auto open = c.find('(');
    s.invocations.push_back(
        sc::Invocation{sc::ServiceId{c.substr(0, open)}, c.substr(open + 1, c.size() - open - 2)});
  }
  return s;
}

inline std::vector<std::string> names(const std::vector<sc::ServiceId>& ids) {
  std::vector<std::string> out;
  for (const auto& i : ids) out.push_back(i.name);
  return out;
}

/// Single-char item sequences as strings, e.g. {"ABC", "AC"}.
inline std::vector<std::vector<char>> seqs(const std::vector<std::string>& rows) {
  std::vector<std::vector<char>> out;
  for (const auto& r : rows) out.emplace_back(r.begin(), r.end());
  return out;
}

}  // namespace testing_util
