#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "seqcompose/core.hpp"
#include "seqcompose/workload.hpp"

namespace seqcompose {

using json = nlohmann::json;

namespace files {
inline constexpr const char* kLog = "log.csv";
inline constexpr const char* kCatalog = "catalog.json";
inline constexpr const char* kCompositions = "compositions.json";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace files

inline json to_json(const IntRange& r) { return json::array({r.lo, r.hi}); }

inline IntRange range_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(std::string(key) + " must be a [lo, hi] array");
  return IntRange{j[0].get<std::uint64_t>(), j[1].get<std::uint64_t>()};
}

inline json to_json(const GeneratorConfig& c) {
  return json{{"n_services", c.n_services},
              {"ops_per_service_range", to_json(c.ops_per_service)},
              {"n_compositions", c.n_compositions},
              {"composition_length_range", to_json(c.composition_length)},
              {"n_sessions", c.n_sessions},
              {"noise_invocations_per_session_range", to_json(c.noise_invocations_per_session)},
              {"plant_gap_range", to_json(c.plant_gap)},
              {"seed", c.seed},
              {"session_start_epoch", format_timestamp(c.session_start_epoch)},
              {"inter_invocation_ms_range", to_json(c.inter_invocation_ms)}};
}

inline GeneratorConfig config_from_json(const json& j) {
  GeneratorConfig c;
  try {
    c.n_services = j.at("n_services").get<std::uint64_t>();
    c.ops_per_service = range_from_json(j.at("ops_per_service_range"), "ops_per_service_range");
    c.n_compositions = j.at("n_compositions").get<std::uint64_t>();
    c.composition_length =
        range_from_json(j.at("composition_length_range"), "composition_length_range");
    c.n_sessions = j.at("n_sessions").get<std::uint64_t>();
    c.noise_invocations_per_session = range_from_json(
        j.at("noise_invocations_per_session_range"), "noise_invocations_per_session_range");
    c.plant_gap = range_from_json(j.at("plant_gap_range"), "plant_gap_range");
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!parse_timestamp(j.at("session_start_epoch").get<std::string>(), c.session_start_epoch))
      throw ConfigError("bad session_start_epoch");
    c.inter_invocation_ms =
        range_from_json(j.at("inter_invocation_ms_range"), "inter_invocation_ms_range");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator config: ") + e.what());
  }
  return c;
}

inline json to_json(const Catalog& catalog) {
  json services = json::array();
  for (const auto& s : catalog.services)
    services.push_back(json{{"name", s.service.name}, {"operations", s.operations}});
  return json{{"services", services}};
}

inline Catalog catalog_from_json(const json& j) {
  Catalog c;
  for (const auto& s : j.at("services")) {
    c.services.push_back(CatalogEntry{ServiceId{s.at("name").get<std::string>()},
                                      s.at("operations").get<std::vector<std::string>>()});
  }
  return c;
}

inline json to_json(std::span<const Composition> compositions) {
  json arr = json::array();
  for (const auto& c : compositions) {
    json steps = json::array();
    for (const auto& s : c.steps)
      steps.push_back(json{{"service", s.service.name}, {"operation", s.operation}});
    arr.push_back(json{{"id", c.id}, {"steps", steps}});
  }
  return json{{"compositions", arr}};
}

inline std::vector<Composition> compositions_from_json(const json& j) {
  std::vector<Composition> out;
  try {
    for (const auto& c : j.at("compositions")) {
      Composition comp;
      comp.id = c.at("id").get<std::size_t>();
      for (const auto& s : c.at("steps")) {
        comp.steps.push_back(Invocation{ServiceId{s.at("service").get<std::string>()},
                                        s.at("operation").get<std::string>()});
      }
      out.push_back(std::move(comp));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("compositions: ") + e.what());
  }
  return out;
}

inline json manifest_json(const Dataset& d) {
  json plants = json::array();
  for (const auto& p : d.log.plants)
    plants.push_back(
        json{{"session", p.session}, {"composition", p.composition}, {"start_index", p.start_index}});
  return json{{"config", to_json(d.config)},
              {"seed", d.config.seed},
              {"rng", std::string(Rng::kAlgorithm)},
              {"record_count", d.log.records.size()},
              {"plants", plants}};
}

inline std::vector<Plant> plants_from_manifest(const json& manifest) {
  std::vector<Plant> out;
  for (const auto& p : manifest.at("plants"))
    out.push_back(Plant{p.at("session").get<std::string>(), p.at("composition").get<std::size_t>(),
                        p.at("start_index").get<std::size_t>()});
  return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.parent_path().string(), ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  if (!out) throw IoError(path.string(), "write failed");
}

inline json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw IoError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline std::vector<LogRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    return parse_log(in);
  } catch (const ParseError& e) {
    throw Error("parse", path.string() + ": " + e.what());
  }
}

/// Writes log.csv, catalog.json, compositions.json and manifest.json into
/// `dir`, creating it if needed.
inline void write_dataset(const Dataset& d, const std::filesystem::path& dir) {
  write_file(dir / files::kLog, format_log(d.log.records));
  write_file(dir / files::kCatalog, dump(to_json(d.catalog)));
  write_file(dir / files::kCompositions, dump(to_json(std::span<const Composition>(d.compositions))));
  write_file(dir / files::kManifest, dump(manifest_json(d)));
}

/// Reads back what write_dataset wrote. The config comes from the manifest.
inline Dataset read_dataset(const std::filesystem::path& dir) {
  Dataset d;
  const json manifest = read_json(dir / files::kManifest);
  d.config = config_from_json(manifest.at("config"));
  d.catalog = catalog_from_json(read_json(dir / files::kCatalog));
  d.compositions = compositions_from_json(read_json(dir / files::kCompositions));
  d.log.records = read_log(dir / files::kLog);
  d.log.plants = plants_from_manifest(manifest);
  return d;
}

}  // namespace seqcompose
