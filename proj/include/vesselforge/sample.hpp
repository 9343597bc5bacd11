#pragma once

// One datapoint end to end: stream layout, the three-stage pipeline, and the
// on-disk sample format (volume.raw + meta.json + graph.json + checksum).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vesselforge/core.hpp"
#include "vesselforge/graph.hpp"
#include "vesselforge/imaging.hpp"
#include "vesselforge/mask.hpp"
#include "vesselforge/presets.hpp"

namespace vesselforge {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SampleMeta {
  std::uint64_t dataset_seed = 0;
  std::uint64_t sample_index = 0;
  GenConfig config;
  std::string generator_version = kGeneratorVersion;
  std::string rng_algorithm = kRngAlgorithm;
  bool stalled = false;  // growth ended before reaching n_max
};

struct Sample {
  ScalarVolume volume;
  VesselGraph graph;
  SampleMeta meta;
};

// ---- config <-> json ----

inline void to_json(nlohmann::json& j, const GraphConfig& c) {
  j = {{"n_max", c.n_max},       {"e_max", c.e_max},
       {"d_min", c.d_min},       {"d_max", c.d_max},
       {"w_min", c.w_min},       {"w_max", c.w_max},
       {"bounds", {c.bounds.x, c.bounds.y, c.bounds.z}},
       {"cone_half_angle_deg", c.cone_half_angle_deg}};
}

inline void from_json(const nlohmann::json& j, GraphConfig& c) {
  j.at("n_max").get_to(c.n_max);
  j.at("e_max").get_to(c.e_max);
  j.at("d_min").get_to(c.d_min);
  j.at("d_max").get_to(c.d_max);
  j.at("w_min").get_to(c.w_min);
  j.at("w_max").get_to(c.w_max);
  c.bounds = {j.at("bounds")[0].get<double>(), j.at("bounds")[1].get<double>(), j.at("bounds")[2].get<double>()};
  j.at("cone_half_angle_deg").get_to(c.cone_half_angle_deg);
}

inline void to_json(nlohmann::json& j, const MaskConfig& c) {
  j = {{"straight_lines", c.straight_lines},
       {"invert", c.invert},
       {"samples_per_unit_length", c.samples_per_unit_length},
       {"jitter_amplitude", c.jitter_amplitude}};
}

inline void from_json(const nlohmann::json& j, MaskConfig& c) {
  j.at("straight_lines").get_to(c.straight_lines);
  j.at("invert").get_to(c.invert);
  j.at("samples_per_unit_length").get_to(c.samples_per_unit_length);
  j.at("jitter_amplitude").get_to(c.jitter_amplitude);
}

inline void to_json(nlohmann::json& j, const BlobConfig& c) {
  j = {{"max_count", c.max_count},
       {"max_size", c.max_size},
       {"complexity_range", {c.complexity_min, c.complexity_max}},
       {"elongation_range", {c.elongation_min, c.elongation_max}},
       {"curvature_range", {c.curvature_min, c.curvature_max}},
       {"intensity_range", {c.intensity_min, c.intensity_max}}};
}

inline void from_json(const nlohmann::json& j, BlobConfig& c) {
  j.at("max_count").get_to(c.max_count);
  j.at("max_size").get_to(c.max_size);
  c.complexity_min = j.at("complexity_range")[0].get<int>();
  c.complexity_max = j.at("complexity_range")[1].get<int>();
  c.elongation_min = j.at("elongation_range")[0].get<double>();
  c.elongation_max = j.at("elongation_range")[1].get<double>();
  c.curvature_min = j.at("curvature_range")[0].get<double>();
  c.curvature_max = j.at("curvature_range")[1].get<double>();
  c.intensity_min = j.at("intensity_range")[0].get<double>();
  c.intensity_max = j.at("intensity_range")[1].get<double>();
}

inline void to_json(nlohmann::json& j, const ImagingConfig& c) {
  j = {{"psf_size", c.psf_size},
       {"psf_sigma", c.psf_sigma},
       {"noise_level", c.noise_level},
       {"background_noise", c.background_noise},
       {"gaussian_std", c.gaussian_std},
       {"background_brightness", c.background_brightness},
       {"perlin_scale", c.perlin_scale},
       {"perlin_strength", c.perlin_strength},
       {"perlin_darkness", c.perlin_darkness},
       {"brighten_scale", c.brighten_scale},
       {"brighten_strength", c.brighten_strength},
       {"octaves", c.octaves},
       {"blob", c.blob},
       {"alpha", c.alpha}};
}

inline void from_json(const nlohmann::json& j, ImagingConfig& c) {
  j.at("psf_size").get_to(c.psf_size);
  j.at("psf_sigma").get_to(c.psf_sigma);
  j.at("noise_level").get_to(c.noise_level);
  j.at("background_noise").get_to(c.background_noise);
  j.at("gaussian_std").get_to(c.gaussian_std);
  j.at("background_brightness").get_to(c.background_brightness);
  j.at("perlin_scale").get_to(c.perlin_scale);
  j.at("perlin_strength").get_to(c.perlin_strength);
  j.at("perlin_darkness").get_to(c.perlin_darkness);
  j.at("brighten_scale").get_to(c.brighten_scale);
  j.at("brighten_strength").get_to(c.brighten_strength);
  j.at("octaves").get_to(c.octaves);
  j.at("blob").get_to(c.blob);
  j.at("alpha").get_to(c.alpha);
}

inline void to_json(nlohmann::json& j, const GenConfig& c) {
  j = {{"graph", c.graph}, {"mask", c.mask}, {"imaging", c.imaging}, {"dims", c.dims}};
}

inline void from_json(const nlohmann::json& j, GenConfig& c) {
  j.at("graph").get_to(c.graph);
  j.at("mask").get_to(c.mask);
  j.at("imaging").get_to(c.imaging);
  j.at("dims").get_to(c.dims);
}

// ---- stream layout ----

// Fork indices under the dataset root stream; config draws and per-sample
// streams live in disjoint namespaces so varied-mode config sampling never
// shares draws with sample generation.
inline constexpr std::uint64_t kConfigNamespace = 0;
inline constexpr std::uint64_t kSampleNamespace = 1;

struct SampleStreams {
  RandomStream graph;
  RandomStream mask;
  RandomStream imaging;
};

inline SampleStreams sample_streams(std::uint64_t dataset_seed, std::uint64_t index) {
  const RandomStream s = RandomStream(dataset_seed).fork(kSampleNamespace).fork(index);
  return {s.fork(0), s.fork(1), s.fork(2)};
}

inline RandomStream varied_config_stream(std::uint64_t dataset_seed, std::uint64_t config_id) {
  return RandomStream(dataset_seed).fork(kConfigNamespace).fork(config_id);
}

// ---- generation ----

// Three-stage pipeline on streams forked from (dataset_seed, index); a pure
// function of its arguments. A stalled growth is propagated as a flagged,
// still valid sample.
inline Sample generate_sample(const GenConfig& cfg, std::uint64_t dataset_seed, std::uint64_t index) {
  cfg.validate();
  SampleStreams streams = sample_streams(dataset_seed, index);

  GrowthResult growth = grow_graph(cfg.graph, streams.graph);
  ScalarVolume mask = build_mask(growth.graph, cfg.dims[0], cfg.dims[1], cfg.dims[2], cfg.mask, streams.mask);
  ScalarVolume volume = compose_image(mask, cfg.imaging, streams.imaging);

  Sample s;
  s.volume = std::move(volume);
  s.graph = std::move(growth.graph);
  s.meta.dataset_seed = dataset_seed;
  s.meta.sample_index = index;
  s.meta.config = cfg;
  s.meta.stalled = growth.stalled;
  return s;
}

// ---- disk format ----

inline std::string checksum_hex(const ScalarVolume& v) {
  const std::uint64_t h = fnv1a64(v.data.data(), v.data.size() * sizeof(float));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::json graph_to_json(const VesselGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const VesselNode& n : g.nodes) {
    nodes.push_back({{"id", n.id}, {"pos", {n.pos.x, n.pos.y, n.pos.z}}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const VesselEdge& e : g.edges) {
    edges.push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

inline VesselGraph graph_from_json(const nlohmann::json& j) {
  VesselGraph g;
  for (const auto& jn : j.at("nodes")) {
    g.nodes.push_back({jn.at("id").get<int>(),
                       Vec3{jn.at("pos")[0].get<double>(), jn.at("pos")[1].get<double>(), jn.at("pos")[2].get<double>()}});
  }
  for (const auto& je : j.at("edges")) {
    g.edges.push_back({je.at("a").get<int>(), je.at("b").get<int>(), je.at("weight").get<double>()});
  }
  for (const VesselEdge& e : g.edges) {
    const auto known = [&](int id) {
      for (const VesselNode& n : g.nodes)
        if (n.id == id) return true;
      return false;
    };
    if (!known(e.a) || !known(e.b)) {
      throw ValidationError("graph.json: edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                            " references a missing node id");
    }
  }
  return g;
}

inline nlohmann::json meta_to_json(const SampleMeta& m, const ScalarVolume& v) {
  return {{"dims", {v.dx, v.dy, v.dz}},
          {"dtype", "f32"},
          {"axis_order", "zyx"},
          {"dataset_seed", m.dataset_seed},
          {"sample_index", m.sample_index},
          {"rng_algorithm", m.rng_algorithm},
          {"generator_version", m.generator_version},
          {"checksum_algorithm", kChecksumAlgorithm},
          {"stalled", m.stalled},
          {"config", m.config}};
}

inline void write_sample(const Sample& s, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("write_sample: cannot create " + dir.string() + ": " + ec.message());

  {
    std::ofstream f(dir / "volume.raw", std::ios::binary);
    if (!f) throw IoError("write_sample: cannot open volume.raw for writing");
    f.write(reinterpret_cast<const char*>(s.volume.data.data()),
            static_cast<std::streamsize>(s.volume.data.size() * sizeof(float)));
    if (!f) throw IoError("write_sample: short write on volume.raw");
  }
  {
    std::ofstream f(dir / "meta.json");
    f << meta_to_json(s.meta, s.volume).dump(2) << "\n";
    if (!f) throw IoError("write_sample: failed writing meta.json");
  }
  {
    std::ofstream f(dir / "graph.json");
    f << graph_to_json(s.graph).dump(2) << "\n";
    if (!f) throw IoError("write_sample: failed writing graph.json");
  }
  {
    std::ofstream f(dir / "checksum");
    f << checksum_hex(s.volume) << "\n";
    if (!f) throw IoError("write_sample: failed writing checksum");
  }
}

inline nlohmann::json load_json_file(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot open " + p.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed json in " + p.string() + ": " + e.what());
  }
  return j;
}

inline Sample read_sample(const std::filesystem::path& dir) {
  const nlohmann::json meta_j = load_json_file(dir / "meta.json");

  Sample s;
  s.meta.dataset_seed = meta_j.at("dataset_seed").get<std::uint64_t>();
  s.meta.sample_index = meta_j.at("sample_index").get<std::uint64_t>();
  s.meta.rng_algorithm = meta_j.at("rng_algorithm").get<std::string>();
  s.meta.generator_version = meta_j.at("generator_version").get<std::string>();
  s.meta.stalled = meta_j.value("stalled", false);
  meta_j.at("config").get_to(s.meta.config);

  const auto dims = meta_j.at("dims");
  const int dx = dims[0].get<int>(), dy = dims[1].get<int>(), dz = dims[2].get<int>();
  const std::size_t expected_bytes = static_cast<std::size_t>(dx) * dy * dz * sizeof(float);

  {
    std::ifstream f(dir / "volume.raw", std::ios::binary | std::ios::ate);
    if (!f) throw IoError("cannot open " + (dir / "volume.raw").string());
    const auto actual = static_cast<std::size_t>(f.tellg());
    if (actual != expected_bytes) {
      throw IoError("volume.raw length mismatch at byte offset " + std::to_string(std::min(actual, expected_bytes)) +
                    ": expected " + std::to_string(expected_bytes) + " bytes, found " + std::to_string(actual));
    }
    f.seekg(0);
    s.volume = ScalarVolume(dx, dy, dz);
    f.read(reinterpret_cast<char*>(s.volume.data.data()), static_cast<std::streamsize>(expected_bytes));
    if (!f) throw IoError("short read on volume.raw");
  }
  {
    std::ifstream f(dir / "checksum");
    if (!f) throw IoError("cannot open " + (dir / "checksum").string());
    std::string stored;
    f >> stored;
    const std::string actual = checksum_hex(s.volume);
    if (stored != actual) {
      throw IoError("checksum mismatch for volume.raw (offset 0.." + std::to_string(expected_bytes) +
                    "): stored " + stored + ", computed " + actual);
    }
  }
  for (const float v : s.volume.data) {
    if (!std::isfinite(v)) throw ValidationError("volume.raw contains a non-finite value");
  }

  s.graph = graph_from_json(load_json_file(dir / "graph.json"));
  return s;
}

}  // namespace vesselforge
