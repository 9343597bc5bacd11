// Command-line surface for the synthetic vessel dataset pipeline:
// shard generation (fixed or varied recipes), sample inspection,
// maximum-intensity projections, and graph-prediction scoring.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or I/O error,
// 3 validation failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vesselforge/vesselforge.hpp"

namespace vf = vesselforge;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitValidation = 3;

int default_workers() {
  if (const char* env = std::getenv("VESSELFORGE_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

struct GenerateArgs {
  std::string preset = "homogeneous";
  std::string config_path;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  int workers = default_workers();
  std::string out;
  std::string format = "text";
};

struct VariedArgs {
  std::uint64_t configs = 0;
  std::uint64_t per_config = 0;
  std::uint64_t seed = 0;
  int workers = default_workers();
  std::string out;
  bool dry_run = false;
  std::string format = "text";
};

struct EvalArgs {
  std::string pred_path;
  std::string truth_path;
  double tau = 5.0;
  double edge_threshold = 0.5;
  double alpha = 1.0;
  double beta = 1.0;
  std::string format = "text";
};

struct ProjectArgs {
  std::string sample_dir;
  std::string axis = "z";
  std::string out;
};

struct InspectArgs {
  std::string sample_dir;
  std::string format = "text";
};

vf::GenConfig load_config(const GenerateArgs& a) {
  if (!a.config_path.empty()) {
    vf::GenConfig cfg;
    vf::load_json_file(a.config_path).get_to(cfg);
    cfg.validate();
    return cfg;
  }
  if (a.preset == "homogeneous") return vf::homogeneous_config();
  throw vf::ValidationError("unknown preset '" + a.preset + "' (expected 'homogeneous')");
}

int run_generate(const GenerateArgs& a) {
  const vf::GenConfig cfg = load_config(a);
  const auto start = std::chrono::steady_clock::now();
  const vf::ShardIndex idx = vf::generate_shard(cfg, a.count, a.seed, a.workers, a.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double per_sec = static_cast<double>(idx.count) / std::max(secs, 1e-9);
  const double per_min_per_core = per_sec * 60.0 / std::max(1, a.workers);

  if (a.format == "json") {
    json j = {{"samples", idx.count},    {"seed", a.seed},
              {"workers", a.workers},    {"out", a.out},
              {"wall_seconds", secs},    {"samples_per_sec", per_sec},
              {"samples_per_min_per_core", per_min_per_core}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "generated " << idx.count << " samples to " << a.out << "\n"
              << "wall time " << secs << " s, " << per_sec << " samples/sec, "
              << per_min_per_core << " samples/min/core (workers=" << a.workers << ")\n";
  }
  return kExitOk;
}

int run_varied(const VariedArgs& a) {
  const std::uint64_t planned = a.configs * a.per_config;
  std::cout << "planned samples: " << planned << " (" << a.configs << " configs x "
            << a.per_config << " per config)\n";
  if (a.dry_run) return kExitOk;

  const auto start = std::chrono::steady_clock::now();
  const vf::ShardIndex idx = vf::generate_varied_shard(a.configs, a.per_config, a.seed, a.workers, a.out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (a.format == "json") {
    json j = {{"samples", idx.count}, {"configs", a.configs},     {"per_config", a.per_config},
              {"seed", a.seed},       {"workers", a.workers},     {"out", a.out},
              {"wall_seconds", secs}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "generated " << idx.count << " samples (" << a.configs << " configs) to "
              << a.out << " in " << secs << " s\n";
  }
  return kExitOk;
}

int run_eval(const EvalArgs& a) {
  const vf::Prediction pred = vf::parse_prediction(vf::load_json_file(a.pred_path));
  const vf::VesselGraph truth_graph = vf::graph_from_json(vf::load_json_file(a.truth_path));
  const std::vector<vf::Vec3> truth_pos = vf::positions_by_id(truth_graph);
  const vf::Matrix truth_adj = vf::adjacency_from_graph(truth_graph);

  const vf::Matching metric_match = vf::hungarian_match(pred.nodes, truth_pos);
  const vf::Metrics node_m = vf::node_metrics(metric_match, a.tau);

  const vf::Matching loss_match = vf::match_by_confidence(pred.nodes, pred.confidence, truth_pos);
  const vf::NodeLosses losses =
      vf::total_loss(pred.nodes, truth_pos, pred.confidence, loss_match, a.alpha, a.beta);

  bool have_edges = false;
  vf::Metrics edge_m;
  double bce = 0.0;
  if (pred.has_adjacency) {
    if (pred.nodes.size() == truth_pos.size()) {
      const vf::Matrix reordered = vf::reorder_adjacency(pred.adjacency, metric_match.permutation);
      edge_m = vf::edge_metrics(reordered, truth_adj, a.edge_threshold);
      bce = vf::edge_bce(reordered, truth_adj);
      have_edges = true;
    } else if (!metric_match.pairs.empty()) {
      // Node counts differ: compare connectivity over the matched pairs only.
      const std::size_t n = metric_match.pairs.size();
      vf::Matrix ps(n, std::vector<double>(n, 0.0)), ts(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          ps[i][j] = pred.adjacency[metric_match.pairs[i].pred][metric_match.pairs[j].pred];
          ts[i][j] = truth_adj[metric_match.pairs[i].truth][metric_match.pairs[j].truth];
        }
      }
      edge_m = vf::edge_metrics(ps, ts, a.edge_threshold);
      bce = vf::edge_bce(ps, ts);
      have_edges = true;
    }
  }

  if (a.format == "json") {
    json j = {{"node", {{"precision", node_m.precision}, {"recall", node_m.recall}, {"f1", node_m.f1},
                        {"tp", node_m.tp}, {"fp", node_m.fp}, {"fn", node_m.fn}}},
              {"loss",
               {{"matched", losses.matched},
                {"excess", losses.excess},
                {"confidence", losses.confidence},
                {"edge_bce", have_edges ? json(bce) : json(nullptr)},
                {"total", losses.total},
                {"alpha", a.alpha},
                {"beta", a.beta}}},
              {"tau", a.tau},
              {"edge_threshold", a.edge_threshold}};
    if (have_edges) {
      j["edge"] = {{"precision", edge_m.precision}, {"recall", edge_m.recall}, {"f1", edge_m.f1},
                   {"tp", edge_m.tp}, {"fp", edge_m.fp}, {"fn", edge_m.fn}};
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "node  precision " << node_m.precision << "  recall " << node_m.recall << "  f1 "
              << node_m.f1 << "  (tp " << node_m.tp << " fp " << node_m.fp << " fn " << node_m.fn
              << ", tau " << a.tau << ")\n";
    if (have_edges) {
      std::cout << "edge  precision " << edge_m.precision << "  recall " << edge_m.recall << "  f1 "
                << edge_m.f1 << "  (tp " << edge_m.tp << " fp " << edge_m.fp << " fn " << edge_m.fn
                << ", threshold " << a.edge_threshold << ")\n";
    } else {
      std::cout << "edge  skipped (no adjacency in prediction)\n";
    }
    std::cout << "loss  matched " << losses.matched << "  excess " << losses.excess
              << "  confidence " << losses.confidence;
    if (have_edges) std::cout << "  edge_bce " << bce;
    std::cout << "\nloss  total " << losses.total << "  (alpha " << a.alpha << ", beta " << a.beta
              << ")\n";
  }
  return kExitOk;
}

int run_project(const ProjectArgs& a) {
  const vf::Sample s = vf::read_sample(a.sample_dir);
  const vf::Image2D img = vf::max_intensity_projection(s.volume, vf::axis_from_string(a.axis));
  vf::write_pgm(img, a.out);
  std::cout << "wrote " << a.out << " (" << img.width << "x" << img.height << ")\n";
  return kExitOk;
}

int run_inspect(const InspectArgs& a) {
  const vf::Sample s = vf::read_sample(a.sample_dir);

  double w_min = 0.0, w_max = 0.0;
  if (!s.graph.edges.empty()) {
    w_min = w_max = s.graph.edges.front().weight;
    for (const auto& e : s.graph.edges) {
      w_min = std::min(w_min, e.weight);
      w_max = std::max(w_max, e.weight);
    }
  }

  // Mask occupancy from a deterministic re-rasterization of the stored graph.
  vf::SampleStreams streams = vf::sample_streams(s.meta.dataset_seed, s.meta.sample_index);
  const vf::ScalarVolume mask =
      vf::build_mask(s.graph, s.volume.dx, s.volume.dy, s.volume.dz, s.meta.config.mask, streams.mask);
  std::size_t on = 0;
  for (const float v : mask.data) on += v != 0.0f;
  const double occupancy = static_cast<double>(on) / static_cast<double>(mask.size());

  std::array<std::size_t, 16> hist{};
  for (const float v : s.volume.data) {
    const int bin = std::min(15, static_cast<int>(v * 16.0f));
    ++hist[std::max(0, bin)];
  }

  const auto violations = vf::validate_graph(s.graph, s.meta.config.graph);

  if (a.format == "json") {
    json j = {{"nodes", s.graph.nodes.size()},
              {"edges", s.graph.edges.size()},
              {"weight_range", {w_min, w_max}},
              {"mask_occupancy", occupancy},
              {"stalled", s.meta.stalled},
              {"histogram", hist},
              {"violations", violations.size()}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "nodes " << s.graph.nodes.size() << ", edges " << s.graph.edges.size()
              << ", weights [" << w_min << ", " << w_max << "]"
              << (s.meta.stalled ? " (stalled growth)" : "") << "\n";
    std::cout << "mask occupancy " << occupancy << "\n";
    std::cout << "intensity histogram (16 bins over [0,1]):";
    for (const auto h : hist) std::cout << " " << h;
    std::cout << "\n";
    std::cout << "validation: " << (violations.empty() ? "ok" : "FAILED") << "\n";
    for (const auto& v : violations) std::cout << "  violation: " << v.detail << "\n";
  }
  return violations.empty() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vesselforge: synthetic blood-vessel dataset generator and evaluation kit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "Generate a fixed-recipe shard");
  cmd_gen->add_option("--preset", gen.preset, "Named preset (homogeneous)");
  cmd_gen->add_option("--config", gen.config_path, "GenConfig json file (overrides --preset)")
      ->check(CLI::ExistingFile);
  cmd_gen->add_option("--count", gen.count, "Number of samples")->required()->check(CLI::PositiveNumber);
  cmd_gen->add_option("--seed", gen.seed, "Dataset seed")->required();
  cmd_gen->add_option("--workers", gen.workers, "Worker threads (default: VESSELFORGE_WORKERS or cores)");
  cmd_gen->add_option("--out", gen.out, "Output shard directory")->required();
  cmd_gen->add_option("--format", gen.format, "Report format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  VariedArgs var;
  auto* cmd_var = app.add_subcommand("varied", "Generate a varied-recipe shard");
  cmd_var->add_option("--configs", var.configs, "Number of distinct configurations")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_var->add_option("--per-config", var.per_config, "Samples per configuration")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_var->add_option("--seed", var.seed, "Dataset seed")->required();
  cmd_var->add_option("--workers", var.workers, "Worker threads (default: VESSELFORGE_WORKERS or cores)");
  cmd_var->add_option("--out", var.out, "Output shard directory")->required();
  cmd_var->add_flag("--dry-run", var.dry_run, "Print the planned sample count and exit");
  cmd_var->add_option("--format", var.format, "Report format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  EvalArgs ev;
  auto* cmd_eval = app.add_subcommand("eval", "Score a prediction against a ground-truth graph");
  cmd_eval->add_option("--pred", ev.pred_path, "Prediction json")->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--truth", ev.truth_path, "Ground-truth graph.json")->required()->check(CLI::ExistingFile);
  cmd_eval->add_option("--tau", ev.tau, "Node correctness radius (voxels)")->check(CLI::PositiveNumber);
  cmd_eval->add_option("--edge-threshold", ev.edge_threshold, "Edge binarization threshold");
  cmd_eval->add_option("--alpha", ev.alpha, "Excess-loss weight");
  cmd_eval->add_option("--beta", ev.beta, "Confidence-loss weight");
  cmd_eval->add_option("--format", ev.format, "Report format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  ProjectArgs pr;
  auto* cmd_project = app.add_subcommand("project", "Write a maximum-intensity projection as PGM");
  cmd_project->add_option("--sample", pr.sample_dir, "Sample directory")->required();
  cmd_project->add_option("--axis", pr.axis, "Projection axis: x|y|z")->check(CLI::IsMember({"x", "y", "z"}));
  cmd_project->add_option("--out", pr.out, "Output PGM path")->required();

  InspectArgs ins;
  auto* cmd_inspect = app.add_subcommand("inspect", "Print sample statistics and validate the graph");
  cmd_inspect->add_option("--sample", ins.sample_dir, "Sample directory")->required();
  cmd_inspect->add_option("--format", ins.format, "Report format: text|json")
      ->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_var->parsed()) return run_varied(var);
    if (cmd_eval->parsed()) return run_eval(ev);
    if (cmd_project->parsed()) return run_project(pr);
    if (cmd_inspect->parsed()) return run_inspect(ins);
  } catch (const vf::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const vf::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
