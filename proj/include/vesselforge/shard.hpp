#pragma once

// Shard production: many samples generated in parallel plus an index file
// enabling verification and bit-exact regeneration. Output is independent of
// the worker count because every sample is a pure function of
// (config, dataset_seed, index); workers only partition the index range.

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vesselforge/presets.hpp"
#include "vesselforge/sample.hpp"

namespace vesselforge {

struct ShardEntry {
  std::string sample_dir;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::string checksum;
  std::int64_t config_id = -1;  // -1 for fixed-config shards
  bool stalled = false;
};

struct ShardIndex {
  std::string mode;  // "fixed" or "varied"
  std::uint64_t dataset_seed = 0;
  std::uint64_t count = 0;
  std::uint64_t configs = 0;     // varied mode only
  std::uint64_t per_config = 0;  // varied mode only
  std::vector<ShardEntry> entries;
};

inline std::string sample_dir_name(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06llu", static_cast<unsigned long long>(index));
  return buf;
}

inline void write_shard_index(const ShardIndex& idx, const std::filesystem::path& out) {
  nlohmann::json entries = nlohmann::json::array();
  for (const ShardEntry& e : idx.entries) {
    nlohmann::json je = {{"sample_dir", e.sample_dir},
                         {"seed", e.seed},
                         {"index", e.index},
                         {"checksum", e.checksum},
                         {"stalled", e.stalled}};
    if (e.config_id >= 0) je["config_id"] = e.config_id;
    entries.push_back(std::move(je));
  }
  nlohmann::json j = {{"mode", idx.mode},
                      {"dataset_seed", idx.dataset_seed},
                      {"count", idx.count},
                      {"generator_version", kGeneratorVersion},
                      {"rng_algorithm", kRngAlgorithm},
                      {"entries", entries}};
  if (idx.mode == "varied") {
    j["configs"] = idx.configs;
    j["per_config"] = idx.per_config;
  }
  std::ofstream f(out / "index.json");
  f << j.dump(2) << "\n";
  if (!f) throw IoError("failed writing " + (out / "index.json").string());
}

inline ShardIndex read_shard_index(const std::filesystem::path& out) {
  const nlohmann::json j = load_json_file(out / "index.json");
  ShardIndex idx;
  idx.mode = j.at("mode").get<std::string>();
  idx.dataset_seed = j.at("dataset_seed").get<std::uint64_t>();
  idx.count = j.at("count").get<std::uint64_t>();
  idx.configs = j.value("configs", 0ull);
  idx.per_config = j.value("per_config", 0ull);
  for (const auto& je : j.at("entries")) {
    ShardEntry e;
    e.sample_dir = je.at("sample_dir").get<std::string>();
    e.seed = je.at("seed").get<std::uint64_t>();
    e.index = je.at("index").get<std::uint64_t>();
    e.checksum = je.at("checksum").get<std::string>();
    e.stalled = je.value("stalled", false);
    e.config_id = je.value("config_id", static_cast<std::int64_t>(-1));
    idx.entries.push_back(std::move(e));
  }
  return idx;
}

namespace detail {

// Runs fn(i) for i in [0, count) across `workers` threads. The first thrown
// exception is rethrown on the caller thread after all workers join.
template <typename Fn>
inline void parallel_for_index(std::uint64_t count, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (workers == 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

// Fixed-config shard: `count` samples of one recipe.
inline ShardIndex generate_shard(const GenConfig& cfg, std::uint64_t count, std::uint64_t dataset_seed,
                                 int workers, const std::filesystem::path& out) {
  if (count < 1) throw std::invalid_argument("generate_shard: count must be >= 1");
  cfg.validate();
  std::filesystem::create_directories(out);

  ShardIndex idx;
  idx.mode = "fixed";
  idx.dataset_seed = dataset_seed;
  idx.count = count;
  idx.entries.resize(count);

  detail::parallel_for_index(count, workers, [&](std::uint64_t i) {
    const Sample s = generate_sample(cfg, dataset_seed, i);
    const std::string dir_name = sample_dir_name(i);
    write_sample(s, out / dir_name);
    idx.entries[i] = {dir_name, dataset_seed, i, checksum_hex(s.volume), -1, s.meta.stalled};
  });

  write_shard_index(idx, out);
  return idx;
}

// Varied shard: `configs` independently drawn recipes, `per_config` samples
// each. Sample i uses config i / per_config; total count is the product.
inline ShardIndex generate_varied_shard(std::uint64_t configs, std::uint64_t per_config,
                                        std::uint64_t dataset_seed, int workers,
                                        const std::filesystem::path& out) {
  if (configs < 1 || per_config < 1) throw std::invalid_argument("generate_varied_shard: counts must be >= 1");
  std::filesystem::create_directories(out);

  std::vector<GenConfig> recipes(configs);
  for (std::uint64_t g = 0; g < configs; ++g) {
    RandomStream cs = varied_config_stream(dataset_seed, g);
    recipes[g] = sample_varied_config(cs);
  }

  const std::uint64_t count = configs * per_config;
  ShardIndex idx;
  idx.mode = "varied";
  idx.dataset_seed = dataset_seed;
  idx.count = count;
  idx.configs = configs;
  idx.per_config = per_config;
  idx.entries.resize(count);

  detail::parallel_for_index(count, workers, [&](std::uint64_t i) {
    const std::uint64_t g = i / per_config;
    const Sample s = generate_sample(recipes[g], dataset_seed, i);
    const std::string dir_name = sample_dir_name(i);
    write_sample(s, out / dir_name);
    idx.entries[i] = {dir_name, dataset_seed, i, checksum_hex(s.volume), static_cast<std::int64_t>(g),
                      s.meta.stalled};
  });

  write_shard_index(idx, out);
  return idx;
}

}  // namespace vesselforge
