#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <vector>

#include "vesselforge/graph.hpp"

using namespace vesselforge;

namespace {

GraphConfig homogeneous_graph_cfg() {
  GraphConfig cfg;
  cfg.n_max = 32;
  cfg.e_max = 0;
  cfg.d_min = 5.0;
  cfg.d_max = 30.0;
  cfg.w_min = 3.0;
  cfg.w_max = 10.0;
  cfg.bounds = {64.0, 64.0, 64.0};
  return cfg;
}

// Children of each node when the growth tree is rooted at node 0.
std::vector<std::vector<int>> rooted_children(const VesselGraph& g, std::vector<double>& parent_weight) {
  const int n = static_cast<int>(g.nodes.size());
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const VesselEdge& e : g.edges) {
    adj[e.a].push_back({e.b, e.weight});
    adj[e.b].push_back({e.a, e.weight});
  }
  std::vector<std::vector<int>> children(n);
  parent_weight.assign(n, -1.0);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (const auto& [u, w] : adj[v]) {
      if (seen[u]) continue;
      seen[u] = 1;
      children[v].push_back(u);
      parent_weight[u] = w;
      q.push(u);
    }
  }
  return children;
}

}  // namespace

TEST_CASE("branch probability formula and clamping") {
  REQUIRE(branch_probability(3.0, 3.0, 10.0) == Catch::Approx(0.2).margin(1e-12));
  REQUIRE(branch_probability(8.0, 3.0, 10.0) == Catch::Approx(0.8).margin(1e-12));
  // raw value 1.04 clamps to 1
  REQUIRE(branch_probability(10.0, 3.0, 10.0) == 1.0);
  REQUIRE_THROWS_AS(branch_probability(2.0, 2.0, 2.5), std::invalid_argument);
}

TEST_CASE("murray daughters") {
  SECTION("single daughter keeps the parent radius") {
    const auto r = murray_daughters(6.0, {1.0});
    REQUIRE(r.size() == 1);
    REQUIRE(r[0] == Catch::Approx(6.0).margin(1e-12));
  }
  SECTION("even split of a radius-6 parent") {
    const auto r = murray_daughters(6.0, {0.5, 0.5});
    REQUIRE(r[0] == Catch::Approx(4.762203155904598).margin(1e-9));
    REQUIRE(r[1] == Catch::Approx(4.762203155904598).margin(1e-9));
  }
  SECTION("0.8 / 0.2 split of a radius-5 parent") {
    const auto r = murray_daughters(5.0, {0.8, 0.2});
    REQUIRE(r[0] == Catch::Approx(4.641588833612778).margin(1e-9));
    REQUIRE(r[1] == Catch::Approx(2.924017738212866).margin(1e-9));
  }
  SECTION("cubed sum is preserved for random splits") {
    RandomStream rng(11);
    for (int i = 0; i < 200; ++i) {
      const double rp = rng.uniform(0.5, 12.0);
      const double f = rng.uniform(0.05, 0.95);
      const auto r = murray_daughters(rp, {f, 1.0 - f});
      const double sum_cubes = r[0] * r[0] * r[0] + r[1] * r[1] * r[1];
      REQUIRE(std::fabs(sum_cubes - rp * rp * rp) <= 1e-9 * rp * rp * rp);
    }
  }
}

TEST_CASE("accept position") {
  RandomStream rng(3);
  const std::vector<Vec3> existing = {{10, 10, 10}};

  SECTION("empty existing set accepts unconditionally") {
    std::vector<Vec3> none;
    for (int i = 0; i < 50; ++i) REQUIRE(accept_position({1, 2, 3}, none, 5.0, rng));
  }
  SECTION("coincident candidate is rejected") {
    for (int i = 0; i < 50; ++i) REQUIRE_FALSE(accept_position({10, 10, 10}, existing, 5.0, rng));
  }
  SECTION("just inside d_min is rejected") {
    REQUIRE_FALSE(accept_position({10, 10, 12.4}, existing, 5.0, rng));
  }
  SECTION("far candidates are accepted nearly always") {
    int accepted = 0;
    const Vec3 far{10, 10, 10 + 50.0};  // 10 * d_min
    for (int i = 0; i < 10000; ++i) accepted += accept_position(far, existing, 5.0, rng);
    REQUIRE(accepted >= 9990);
  }
}

TEST_CASE("grow graph with n_max 2 yields a single segment") {
  GraphConfig cfg = homogeneous_graph_cfg();
  cfg.n_max = 2;
  RandomStream rng(5);
  const GrowthResult res = grow_graph(cfg, rng);
  REQUIRE(res.graph.nodes.size() == 2);
  REQUIRE(res.graph.edges.size() == 1);
  REQUIRE_FALSE(res.stalled);
  const double w = res.graph.edges[0].weight;
  REQUIRE(w >= 0.5 * (cfg.w_min + cfg.w_max));
  REQUIRE(w <= cfg.w_max);
}

TEST_CASE("grown graphs satisfy every structural invariant") {
  const GraphConfig cfg = homogeneous_graph_cfg();
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    RandomStream rng = RandomStream(1234).fork(seed);
    const GrowthResult res = grow_graph(cfg, rng);
    const VesselGraph& g = res.graph;

    REQUIRE(validate_graph(g, cfg).empty());
    REQUIRE(g.nodes.size() >= 2);
    REQUIRE(g.edges.size() == g.nodes.size() - 1);  // tree

    for (const VesselNode& n : g.nodes) {
      REQUIRE(n.pos.x >= 0.0);
      REQUIRE(n.pos.x <= cfg.bounds.x);
      REQUIRE(n.pos.y >= 0.0);
      REQUIRE(n.pos.y <= cfg.bounds.y);
      REQUIRE(n.pos.z >= 0.0);
      REQUIRE(n.pos.z <= cfg.bounds.z);
    }
    for (const VesselEdge& e : g.edges) {
      REQUIRE(e.a != e.b);
      REQUIRE(e.weight >= cfg.w_min);
      REQUIRE(e.weight <= cfg.w_max);
    }

    // undirected: at most one edge per unordered pair
    std::set<std::pair<int, int>> pairs;
    for (const VesselEdge& e : g.edges) {
      const auto key = std::minmax(e.a, e.b);
      REQUIRE(pairs.insert({key.first, key.second}).second);
    }

    // connected, monotone weights root-to-leaf, Murray at bifurcations
    std::vector<double> parent_weight;
    const auto children = rooted_children(g, parent_weight);
    int reached = 0;
    for (std::size_t v = 0; v < g.nodes.size(); ++v) reached += (v == 0 || parent_weight[v] >= 0.0);
    REQUIRE(reached == static_cast<int>(g.nodes.size()));

    std::vector<double> child_cubes(g.nodes.size(), 0.0);
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
      for (const int c : children[v]) {
        if (v != 0) {
          REQUIRE(parent_weight[c] <= parent_weight[v] + 1e-12);  // non-increasing hierarchy
        }
        child_cubes[v] += std::pow(parent_weight[c], 3.0);
      }
      if (v != 0 && children[v].size() >= 2) {
        const double wp3 = std::pow(parent_weight[v], 3.0);
        REQUIRE(std::fabs(wp3 - child_cubes[v]) <= 1e-9 * wp3);
      }
    }
  }
}

TEST_CASE("grow graph keeps non-adjacent tubes separated") {
  const GraphConfig cfg = homogeneous_graph_cfg();
  RandomStream rng(777);
  const VesselGraph g = grow_graph(cfg, rng).graph;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      const VesselEdge& e1 = g.edges[i];
      const VesselEdge& e2 = g.edges[j];
      if (e1.a == e2.a || e1.a == e2.b || e1.b == e2.a || e1.b == e2.b) continue;
      const double gap = segment_min_distance(g.nodes[e1.a].pos, g.nodes[e1.b].pos,
                                              g.nodes[e2.a].pos, g.nodes[e2.b].pos);
      REQUIRE(gap >= 0.5 * (e1.weight + e2.weight) - 1e-9);
    }
  }
}

TEST_CASE("grow graph is deterministic in (cfg, seed)") {
  const GraphConfig cfg = homogeneous_graph_cfg();
  RandomStream a(42), b(42);
  const VesselGraph g1 = grow_graph(cfg, a).graph;
  const VesselGraph g2 = grow_graph(cfg, b).graph;
  REQUIRE(g1.nodes.size() == g2.nodes.size());
  REQUIRE(g1.edges.size() == g2.edges.size());
  for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
    REQUIRE(g1.nodes[i].pos.x == g2.nodes[i].pos.x);
    REQUIRE(g1.nodes[i].pos.y == g2.nodes[i].pos.y);
    REQUIRE(g1.nodes[i].pos.z == g2.nodes[i].pos.z);
  }
  for (std::size_t i = 0; i < g1.edges.size(); ++i) {
    REQUIRE(g1.edges[i].a == g2.edges[i].a);
    REQUIRE(g1.edges[i].b == g2.edges[i].b);
    REQUIRE(g1.edges[i].weight == g2.edges[i].weight);
  }
}

TEST_CASE("different seeds give different node sets") {
  const GraphConfig cfg = homogeneous_graph_cfg();
  int distinct = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    RandomStream a = RandomStream(1).fork(2 * s);
    RandomStream b = RandomStream(1).fork(2 * s + 1);
    const VesselGraph g1 = grow_graph(cfg, a).graph;
    const VesselGraph g2 = grow_graph(cfg, b).graph;
    bool differ = g1.nodes.size() != g2.nodes.size();
    if (!differ) {
      for (std::size_t i = 0; i < g1.nodes.size() && !differ; ++i) {
        differ = distance(g1.nodes[i].pos, g2.nodes[i].pos) > 1e-12;
      }
    }
    distinct += differ;
  }
  REQUIRE(distinct == 100);
}

TEST_CASE("growth in a cramped box stalls without violating constraints") {
  GraphConfig cfg = homogeneous_graph_cfg();
  cfg.bounds = {12.0, 12.0, 12.0};
  cfg.d_max = 10.0;
  bool saw_stall = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng = RandomStream(9).fork(seed);
    const GrowthResult res = grow_graph(cfg, rng);
    saw_stall |= res.stalled;
    REQUIRE(validate_graph(res.graph, cfg).empty());
  }
  REQUIRE(saw_stall);
}

TEST_CASE("edge cap is honored") {
  GraphConfig cfg = homogeneous_graph_cfg();
  cfg.e_max = 4;
  RandomStream rng(15);
  const GrowthResult res = grow_graph(cfg, rng);
  REQUIRE(res.graph.edges.size() <= 4);
  REQUIRE(validate_graph(res.graph, cfg).empty());
}

TEST_CASE("validate graph reports constructed violations") {
  const GraphConfig cfg = homogeneous_graph_cfg();

  SECTION("nodes closer than d_min") {
    VesselGraph g;
    g.nodes = {{0, {0, 0, 0}}, {1, {2.5, 0, 0}}};  // d_min / 2
    g.edges = {{0, 1, 5.0}};
    const auto v = validate_graph(g, cfg);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].kind == GraphViolation::Kind::MinSpacing);
  }
  SECTION("edge longer than d_max") {
    VesselGraph g;
    g.nodes = {{0, {0, 0, 0}}, {1, {40, 0, 0}}};
    g.edges = {{0, 1, 5.0}};
    const auto v = validate_graph(g, cfg);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].kind == GraphViolation::Kind::EdgeLength);
  }
  SECTION("node cap exceeded") {
    GraphConfig small = cfg;
    small.n_max = 2;
    VesselGraph g;
    g.nodes = {{0, {0, 0, 0}}, {1, {10, 0, 0}}, {2, {20, 0, 0}}};
    g.edges = {{0, 1, 5.0}, {1, 2, 5.0}};
    const auto v = validate_graph(g, small);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].kind == GraphViolation::Kind::NodeCap);
  }
  SECTION("edge cap exceeded") {
    GraphConfig small = cfg;
    small.e_max = 1;
    VesselGraph g;
    g.nodes = {{0, {0, 0, 0}}, {1, {10, 0, 0}}, {2, {20, 0, 0}}};
    g.edges = {{0, 1, 5.0}, {1, 2, 5.0}};
    const auto v = validate_graph(g, small);
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].kind == GraphViolation::Kind::EdgeCap);
  }
  SECTION("generated graphs validate cleanly") {
    RandomStream rng(4);
    REQUIRE(validate_graph(grow_graph(cfg, rng).graph, cfg).empty());
  }
}
