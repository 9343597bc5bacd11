#pragma once

// Constrained growth of 3D vessel graphs. Networks grow from a single random
// seed segment; a priority queue processes thicker segments first, each
// expansion is either a same-diameter extension or a binary bifurcation whose
// daughter diameters preserve cubed-radius flow capacity.

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "vesselforge/core.hpp"
#include "vesselforge/geometry.hpp"

namespace vesselforge {

struct GraphConfig {
  int n_max = 32;       // max node count
  int e_max = 0;        // max edge count, 0 = uncapped
  double d_min = 5.0;   // min node spacing, voxel units
  double d_max = 30.0;  // max segment length, voxel units
  double w_min = 3.0;   // min vessel diameter
  double w_max = 10.0;  // max vessel diameter
  Vec3 bounds{64.0, 64.0, 64.0};
  double cone_half_angle_deg = 60.0;  // child direction cone around the parent

  void validate() const {
    if (n_max < 2) throw std::invalid_argument("GraphConfig: n_max must be >= 2");
    if (!(d_min > 0.0 && d_min < d_max)) throw std::invalid_argument("GraphConfig: need 0 < d_min < d_max");
    if (!(w_min > 0.0 && w_min < w_max)) throw std::invalid_argument("GraphConfig: need 0 < w_min < w_max");
    if (0.8 * w_max <= w_min) throw std::invalid_argument("GraphConfig: degenerate branch probability denominator");
    if (!(bounds.x > 0.0 && bounds.y > 0.0 && bounds.z > 0.0)) throw std::invalid_argument("GraphConfig: bounds must be positive");
    if (e_max < 0) throw std::invalid_argument("GraphConfig: e_max must be >= 0");
  }
};

struct VesselNode {
  int id = 0;
  Vec3 pos;
};

struct VesselEdge {
  int a = 0;
  int b = 0;
  double weight = 0.0;  // vessel diameter, voxel units
};

struct VesselGraph {
  std::vector<VesselNode> nodes;
  std::vector<VesselEdge> edges;
};

// Probability that a segment of diameter w bifurcates, clamped to [0, 1]
// (the raw expression exceeds 1 near w_max).
inline double branch_probability(double w, double w_min, double w_max) {
  const double denom = 0.8 * w_max - w_min;
  if (denom <= 0.0) throw std::invalid_argument("branch_probability: 0.8*w_max must exceed w_min");
  const double p = 0.2 + 0.6 * (w - w_min) / denom;
  return std::clamp(p, 0.0, 1.0);
}

// Daughter radii preserving r_p^3 = sum r_i^3 for the given flow fractions.
inline std::vector<double> murray_daughters(double parent_radius, const std::vector<double>& ratios) {
  if (parent_radius <= 0.0) throw std::invalid_argument("murray_daughters: parent radius must be positive");
  std::vector<double> out;
  out.reserve(ratios.size());
  for (const double f : ratios) out.push_back(std::cbrt(f) * parent_radius);
  return out;
}

// Distance-based node placement acceptance: positions closer than d_min to
// any existing node are rejected outright; beyond that the acceptance
// probability rises toward 1 with the distance to the nearest node
// (sigma = d_min / 3).
inline bool accept_position(const Vec3& candidate, const std::vector<Vec3>& existing,
                            double d_min, RandomStream& rng) {
  if (existing.empty()) return true;
  double nearest_sq = std::numeric_limits<double>::infinity();
  for (const Vec3& v : existing) {
    const Vec3 d = candidate - v;
    nearest_sq = std::min(nearest_sq, dot(d, d));
  }
  if (nearest_sq < d_min * d_min) return false;
  const double sigma = d_min / 3.0;
  const double p_accept = 1.0 - std::exp(-nearest_sq / (2.0 * sigma * sigma));
  return rng.uniform01() < p_accept;
}

struct GrowthResult {
  VesselGraph graph;
  bool stalled = false;  // growth exhausted before reaching n_max
};

namespace detail {

struct ActiveSegment {
  double weight;
  std::uint64_t seq;  // insertion order, breaks weight ties deterministically
  int node_id;
  Vec3 direction;
};

struct ActiveSegmentOrder {
  bool operator()(const ActiveSegment& a, const ActiveSegment& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;  // max-heap on weight
    return a.seq > b.seq;                                  // FIFO among equals
  }
};

inline bool inside_bounds(const Vec3& p, const Vec3& bounds) {
  return p.x >= 0.0 && p.x <= bounds.x && p.y >= 0.0 && p.y <= bounds.y && p.z >= 0.0 && p.z <= bounds.z;
}

// Uniform direction within a cone of half-angle `half_angle` around axis.
inline Vec3 sample_cone(const Vec3& axis, double half_angle_rad, RandomStream& rng) {
  const double cos_min = std::cos(half_angle_rad);
  const double cos_theta = rng.uniform(cos_min, 1.0);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  // Orthonormal basis around the axis.
  const Vec3 helper = std::fabs(axis.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const Vec3 u = normalized(cross(axis, helper));
  const Vec3 v = cross(axis, u);
  return normalized(axis * cos_theta + (u * std::cos(phi) + v * std::sin(phi)) * sin_theta);
}

}  // namespace detail

// Grows a vessel graph under the config's spacing, size, and diameter
// constraints. Never throws for valid configs; if expansion stalls before
// n_max nodes exist, the partial graph is returned with `stalled` set.
inline GrowthResult grow_graph(const GraphConfig& cfg, RandomStream& rng) {
  cfg.validate();
  constexpr int kCandidateTries = 64;  // rejections per expansion before a segment is blocked
  constexpr double kMinDaughterAngleDeg = 30.0;
  const double cone_rad = cfg.cone_half_angle_deg * 3.14159265358979323846 / 180.0;
  const double min_daughter_cos = std::cos(kMinDaughterAngleDeg * 3.14159265358979323846 / 180.0);

  GrowthResult result;
  VesselGraph& g = result.graph;
  std::vector<Vec3> positions;

  // Seed segment: random placement, diameter from the upper half of the range.
  bool seeded = false;
  Vec3 seed_dir;
  for (int attempt = 0; attempt < 4096 && !seeded; ++attempt) {
    const Vec3 p0{rng.uniform(0.0, cfg.bounds.x), rng.uniform(0.0, cfg.bounds.y), rng.uniform(0.0, cfg.bounds.z)};
    const Vec3 dir = rng.unit_vec3();
    const double len = rng.uniform(cfg.d_min, cfg.d_max);
    const Vec3 p1 = p0 + dir * len;
    if (!detail::inside_bounds(p1, cfg.bounds)) continue;
    const double w0 = rng.uniform(0.5 * (cfg.w_min + cfg.w_max), cfg.w_max);
    g.nodes.push_back({0, p0});
    g.nodes.push_back({1, p1});
    g.edges.push_back({0, 1, w0});
    positions.push_back(p0);
    positions.push_back(p1);
    seed_dir = dir;
    seeded = true;
  }
  if (!seeded) {
    result.stalled = true;
    return result;
  }

  std::priority_queue<detail::ActiveSegment, std::vector<detail::ActiveSegment>, detail::ActiveSegmentOrder> active;
  std::uint64_t seq = 0;
  // The seed vessel may extend at either end.
  active.push({g.edges[0].weight, seq++, 1, seed_dir});
  active.push({g.edges[0].weight, seq++, 0, seed_dir * -1.0});

  const auto edge_budget_left = [&]() {
    return cfg.e_max == 0 ? std::numeric_limits<int>::max() : cfg.e_max - static_cast<int>(g.edges.size());
  };
  const auto node_budget_left = [&]() { return cfg.n_max - static_cast<int>(g.nodes.size()); };

  // One candidate endpoint for a child of `parent`, or nullopt after the try
  // budget. `sibling_dir` enforces the minimum split angle between daughters.
  const auto place_child = [&](int parent, const Vec3& parent_dir, double child_weight,
                               const std::optional<Vec3>& sibling_dir) -> std::optional<Vec3> {
    const Vec3 base = g.nodes[parent].pos;
    for (int attempt = 0; attempt < kCandidateTries; ++attempt) {
      const Vec3 dir = detail::sample_cone(parent_dir, cone_rad, rng);
      if (sibling_dir && dot(dir, *sibling_dir) > min_daughter_cos) continue;
      const double len = rng.uniform(cfg.d_min, cfg.d_max);
      const Vec3 cand = base + dir * len;
      if (!detail::inside_bounds(cand, cfg.bounds)) continue;
      if (!accept_position(cand, positions, cfg.d_min, rng)) continue;
      // Tube clearance against edges not incident to the parent node.
      bool clear = true;
      for (const VesselEdge& e : g.edges) {
        if (e.a == parent || e.b == parent) continue;
        const double gap = segment_min_distance(base, cand, g.nodes[e.a].pos, g.nodes[e.b].pos);
        if (gap < 0.5 * (child_weight + e.weight)) {
          clear = false;
          break;
        }
      }
      if (clear) return cand;
    }
    return std::nullopt;
  };

  const auto commit_child = [&](int parent, const Vec3& pos, double weight) -> int {
    const int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back({id, pos});
    positions.push_back(pos);
    g.edges.push_back({parent, id, weight});
    const Vec3 dir = normalized(pos - g.nodes[parent].pos);
    active.push({weight, seq++, id, dir});
    return id;
  };

  while (!active.empty() && node_budget_left() > 0 && edge_budget_left() > 0) {
    const detail::ActiveSegment seg = active.top();
    active.pop();

    bool branch = rng.bernoulli(branch_probability(seg.weight, cfg.w_min, cfg.w_max));
    if (branch && (node_budget_left() < 2 || edge_budget_left() < 2)) branch = false;

    if (branch) {
      const double fraction = rng.uniform(0.3, 0.7);
      const auto daughters = murray_daughters(seg.weight, {fraction, 1.0 - fraction});
      if (daughters[0] < cfg.w_min || daughters[1] < cfg.w_min) continue;  // terminal: diameter floor
      const auto first = place_child(seg.node_id, seg.direction, daughters[0], std::nullopt);
      if (!first) continue;  // blocked
      const int first_id = commit_child(seg.node_id, *first, daughters[0]);
      const Vec3 first_dir = normalized(*first - g.nodes[seg.node_id].pos);
      const auto second = place_child(seg.node_id, seg.direction, daughters[1], first_dir);
      if (second) commit_child(seg.node_id, *second, daughters[1]);
      (void)first_id;
    } else {
      const auto child = place_child(seg.node_id, seg.direction, seg.weight, std::nullopt);
      if (child) commit_child(seg.node_id, *child, seg.weight);
    }
  }

  result.stalled = static_cast<int>(g.nodes.size()) < cfg.n_max && active.empty() &&
                   (cfg.e_max == 0 || static_cast<int>(g.edges.size()) < cfg.e_max);
  return result;
}

struct GraphViolation {
  enum class Kind { NodeCap, EdgeCap, MinSpacing, EdgeLength };
  Kind kind;
  std::string detail;
};

// Checks the four constraint families: node cap, edge cap, pairwise minimum
// spacing, and maximum edge length. Empty result means all hold.
inline std::vector<GraphViolation> validate_graph(const VesselGraph& g, const GraphConfig& cfg) {
  using Kind = GraphViolation::Kind;
  std::vector<GraphViolation> out;
  if (static_cast<int>(g.nodes.size()) > cfg.n_max) {
    out.push_back({Kind::NodeCap, "node count " + std::to_string(g.nodes.size()) + " exceeds " + std::to_string(cfg.n_max)});
  }
  if (cfg.e_max > 0 && static_cast<int>(g.edges.size()) > cfg.e_max) {
    out.push_back({Kind::EdgeCap, "edge count " + std::to_string(g.edges.size()) + " exceeds " + std::to_string(cfg.e_max)});
  }
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      const double d = distance(g.nodes[i].pos, g.nodes[j].pos);
      if (d < cfg.d_min) {
        out.push_back({Kind::MinSpacing, "nodes " + std::to_string(i) + "," + std::to_string(j) +
                                             " at distance " + std::to_string(d)});
      }
    }
  }
  for (const VesselEdge& e : g.edges) {
    const double len = distance(g.nodes[e.a].pos, g.nodes[e.b].pos);
    if (len > cfg.d_max) {
      out.push_back({Kind::EdgeLength, "edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                                           " length " + std::to_string(len)});
    }
  }
  return out;
}

}  // namespace vesselforge
