#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "seqcompose/core.hpp"

namespace seqcompose {

/// Seeded generator with a fixed, portable output stream: the standard
/// mt19937_64 engine (its sequence is pinned by the C++ standard) plus
/// rejection sampling for bounded integers, so no library distribution is
/// involved.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+rejection";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [lo, hi].
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    if (span == 0) return next();
    const std::uint64_t threshold = (0 - span) % span;
    std::uint64_t x;
    do {
      x = next();
    } while (x < threshold);
    return lo + x % span;
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform(0, n - 1)); }

 private:
  std::mt19937_64 engine_;
};

struct IntRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  bool contains(std::uint64_t v) const { return lo <= v && v <= hi; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct GeneratorConfig {
  std::uint64_t n_services = 100;
  IntRange ops_per_service{2, 15};
  std::uint64_t n_compositions = 50;
  IntRange composition_length{2, 3};
  std::uint64_t n_sessions = 1000;
  IntRange noise_invocations_per_session{15, 30};
  IntRange plant_gap{2, 10};
  std::uint64_t seed = 42;
  Timestamp session_start_epoch = std::chrono::sys_days{std::chrono::year{2024} /
                                                        std::chrono::January / 1};
  IntRange inter_invocation_ms{10, 2000};

  void validate() const {
    auto check_range = [](const IntRange& r, std::string_view name, std::uint64_t min_lo) {
      if (r.lo > r.hi)
        throw ConfigError(std::string(name) + " range is empty (" + std::to_string(r.lo) + " > " +
                          std::to_string(r.hi) + ")");
      if (r.lo < min_lo)
        throw ConfigError(std::string(name) + " lower bound must be at least " +
                          std::to_string(min_lo));
    };
    if (n_services == 0) throw ConfigError("services must be > 0");
    if (n_compositions == 0) throw ConfigError("compositions must be > 0");
    if (n_sessions == 0) throw ConfigError("sessions must be > 0");
    check_range(ops_per_service, "ops per service", 1);
    check_range(composition_length, "composition length", 2);
    check_range(noise_invocations_per_session, "noise invocations", 1);
    check_range(plant_gap, "plant gap", 1);
    check_range(inter_invocation_ms, "inter-invocation time", 1);
    if (n_services < composition_length.hi)
      throw ConfigError("services (" + std::to_string(n_services) +
                        ") must be at least the maximum composition length (" +
                        std::to_string(composition_length.hi) + ")");
  }

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct CatalogEntry {
  ServiceId service;
  std::vector<std::string> operations;

  friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

struct Catalog {
  std::vector<CatalogEntry> services;

  friend bool operator==(const Catalog&, const Catalog&) = default;
};

struct Composition {
  std::size_t id = 0;
  std::vector<Invocation> steps;

  /// Operation-level labels of the steps, e.g. {"WS7.op3", "WS2.op1"}.
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.label());
    return out;
  }

  friend bool operator==(const Composition&, const Composition&) = default;
};

/// One planted composition occurrence: steps occupy
/// invocations[start_index, start_index + length) of the named session.
struct Plant {
  std::string session;
  std::size_t composition = 0;
  std::size_t start_index = 0;

  friend bool operator==(const Plant&, const Plant&) = default;
};

struct GeneratedLog {
  std::vector<LogRecord> records;
  std::vector<Plant> plants;
};

inline Catalog generate_catalog(const GeneratorConfig& config, Rng& rng) {
  config.validate();
  Catalog catalog;
  catalog.services.reserve(config.n_services);
  for (std::uint64_t i = 1; i <= config.n_services; ++i) {
    CatalogEntry e{ServiceId{"WS" + std::to_string(i)}, {}};
    const auto k = rng.uniform(config.ops_per_service.lo, config.ops_per_service.hi);
    for (std::uint64_t j = 1; j <= k; ++j) e.operations.push_back("op" + std::to_string(j));
    catalog.services.push_back(std::move(e));
  }
  return catalog;
}

/// Number of distinct compositions the catalog admits, saturating at
/// UINT64_MAX: sum over lengths L of L! * e_L(op counts).
inline std::uint64_t count_possible_compositions(const Catalog& catalog, IntRange length) {
  using u128 = unsigned __int128;
  constexpr u128 cap = std::numeric_limits<std::uint64_t>::max();
  const std::size_t max_len = std::min<std::size_t>(length.hi, catalog.services.size());
  std::vector<u128> e(max_len + 1, 0);  // elementary symmetric polynomials
  e[0] = 1;
  for (const auto& s : catalog.services) {
    for (std::size_t l = max_len; l >= 1; --l)
      e[l] = std::min<u128>(cap, e[l] + e[l - 1] * s.operations.size());
  }
  u128 total = 0;
  for (std::size_t l = length.lo; l <= max_len; ++l) {
    u128 term = e[l];
    for (std::size_t f = 2; f <= l && term < cap; ++f) term = std::min<u128>(cap, term * f);
    total = std::min<u128>(cap, total + term);
  }
  return static_cast<std::uint64_t>(total);
}

/// Distinct compositions of pairwise-distinct services, each step with a
/// uniformly chosen operation. Duplicates are redrawn.
inline std::vector<Composition> generate_compositions(const Catalog& catalog,
                                                      const GeneratorConfig& config, Rng& rng) {
  config.validate();
  if (catalog.services.size() < config.composition_length.hi)
    throw ConfigError("catalog has fewer services than the maximum composition length");
  if (config.n_compositions > count_possible_compositions(catalog, config.composition_length))
    throw ConfigError("requested " + std::to_string(config.n_compositions) +
                      " compositions but the catalog admits fewer distinct ones");

  std::vector<Composition> out;
  std::set<std::vector<Invocation>> seen;
  std::vector<std::size_t> pool(catalog.services.size());
  while (out.size() < config.n_compositions) {
    const auto len = rng.uniform(config.composition_length.lo, config.composition_length.hi);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<Invocation> steps;
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
      const auto& svc = catalog.services[pool[i]];
      steps.push_back(Invocation{svc.service, svc.operations[rng.index(svc.operations.size())]});
    }
    if (!seen.insert(steps).second) continue;
    out.push_back(Composition{out.size(), std::move(steps)});
  }
  return out;
}

/// Sessions of uniformly random noise invocations with compositions planted
/// contiguously. A gap counter drawn from plant_gap counts noise
/// invocations; each time it runs out, one random composition is inserted
/// and the counter is redrawn.
inline GeneratedLog generate_log(const Catalog& catalog, std::span<const Composition> compositions,
                                 const GeneratorConfig& config, Rng& rng) {
  config.validate();
  if (catalog.services.empty() || compositions.empty())
    throw ConfigError("generate_log needs a non-empty catalog and composition list");

  GeneratedLog out;
  for (std::uint64_t si = 1; si <= config.n_sessions; ++si) {
    const std::string sid = "s" + std::to_string(si);
    Timestamp t = config.session_start_epoch + std::chrono::minutes(si - 1);
    std::size_t index = 0;

    auto emit = [&](const Invocation& inv) {
      if (index > 0)
        t += std::chrono::milliseconds(
            rng.uniform(config.inter_invocation_ms.lo, config.inter_invocation_ms.hi));
      LogRecord r{sid, t, inv, rng.uniform(1, 5000), rng.uniform(64, 65536)};
      out.records.push_back(std::move(r));
      ++index;
    };

    const auto noise = rng.uniform(config.noise_invocations_per_session.lo,
                                   config.noise_invocations_per_session.hi);
    auto gap = rng.uniform(config.plant_gap.lo, config.plant_gap.hi);
    std::uint64_t counter = 0;
    for (std::uint64_t n = 0; n < noise; ++n) {
      const auto& svc = catalog.services[rng.index(catalog.services.size())];
      emit(Invocation{svc.service, svc.operations[rng.index(svc.operations.size())]});
      if (++counter == gap) {
        const auto& comp = compositions[rng.index(compositions.size())];
        out.plants.push_back(Plant{sid, comp.id, index});
        for (const auto& step : comp.steps) emit(step);
        counter = 0;
        gap = rng.uniform(config.plant_gap.lo, config.plant_gap.hi);
      }
    }
  }
  return out;
}

struct Dataset {
  GeneratorConfig config;
  Catalog catalog;
  std::vector<Composition> compositions;
  GeneratedLog log;
};

/// Catalog, compositions and log from one rng stream seeded by config.seed.
inline Dataset generate_dataset(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Dataset d;
  d.config = config;
  d.catalog = generate_catalog(config, rng);
  d.compositions = generate_compositions(d.catalog, config, rng);
  d.log = generate_log(d.catalog, d.compositions, config, rng);
  return d;
}

/// Plants whose recorded position does not hold the composition's steps
/// contiguously. Empty when every plant checks out.
inline std::vector<Plant> verify_plants(std::span<const Session> sessions,
                                        std::span<const Composition> compositions,
                                        std::span<const Plant> plants) {
  std::unordered_map<std::string, const Session*> by_id;
  for (const auto& s : sessions) by_id.emplace(s.session_id, &s);
  std::vector<Plant> bad;
  for (const auto& p : plants) {
    const auto it = by_id.find(p.session);
    if (it == by_id.end() || p.composition >= compositions.size()) {
      bad.push_back(p);
      continue;
    }
    const auto& inv = it->second->invocations;
    const auto& steps = compositions[p.composition].steps;
    const bool ok = p.start_index + steps.size() <= inv.size() &&
                    std::equal(steps.begin(), steps.end(), inv.begin() + p.start_index);
    if (!ok) bad.push_back(p);
  }
  return bad;
}

}  // namespace seqcompose
