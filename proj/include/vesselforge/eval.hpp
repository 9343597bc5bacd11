#pragma once

// Scoring and reference-loss math for predicted vessel graphs: minimum-cost
// Euclidean node matching, tau-radius node metrics, adjacency reordering and
// symmetrization, edge metrics, and the three node-loss terms plus edge BCE.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "vesselforge/core.hpp"
#include "vesselforge/graph.hpp"
#include "vesselforge/sample.hpp"

namespace vesselforge {

struct MatchPair {
  int pred = -1;
  int truth = -1;
  double dist = 0.0;
};

struct Matching {
  std::vector<MatchPair> pairs;        // size min(n_pred, n_truth), minimal total cost
  std::vector<int> unmatched_pred;     // ascending
  std::vector<int> unmatched_truth;    // ascending
  std::vector<int> permutation;        // perm[t] = pred index aligned to truth t; empty unless sizes match
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0, fp = 0, fn = 0;
};

namespace detail {

// Shortest-augmenting-path assignment with potentials; requires
// rows <= cols. Returns, per row, the column it is assigned to.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const int m = static_cast<int>(cost[0].size());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

inline std::vector<std::vector<double>> distance_matrix(const std::vector<Vec3>& rows,
                                                        const std::vector<Vec3>& cols) {
  std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size(), 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) cost[i][j] = distance(rows[i], cols[j]);
  return cost;
}

}  // namespace detail

// Minimum-total-Euclidean-cost one-to-one matching of size min(|pred|, |truth|).
inline Matching hungarian_match(const std::vector<Vec3>& pred, const std::vector<Vec3>& truth) {
  Matching m;
  const int np = static_cast<int>(pred.size());
  const int nt = static_cast<int>(truth.size());
  std::vector<int> pred_to_truth(np, -1);
  if (np <= nt) {
    const auto row_to_col = detail::min_cost_assignment(detail::distance_matrix(pred, truth));
    for (int i = 0; i < np; ++i) pred_to_truth[i] = row_to_col[i];
  } else {
    const auto row_to_col = detail::min_cost_assignment(detail::distance_matrix(truth, pred));
    for (int t = 0; t < nt; ++t) pred_to_truth[row_to_col[t]] = t;
  }

  std::vector<char> truth_used(nt, 0);
  for (int i = 0; i < np; ++i) {
    if (pred_to_truth[i] < 0) {
      m.unmatched_pred.push_back(i);
      continue;
    }
    const int t = pred_to_truth[i];
    truth_used[t] = 1;
    m.pairs.push_back({i, t, distance(pred[i], truth[t])});
  }
  for (int t = 0; t < nt; ++t) {
    if (!truth_used[t]) m.unmatched_truth.push_back(t);
  }
  if (np == nt) {
    m.permutation.assign(nt, -1);
    for (const MatchPair& p : m.pairs) m.permutation[p.truth] = p.pred;
  }
  return m;
}

// Matching used by the loss terms: when there are more predictions than
// ground-truth nodes, only the |truth| most confident predictions compete
// for matches; the rest are unmatched by construction.
inline Matching match_by_confidence(const std::vector<Vec3>& pred, const std::vector<double>& conf,
                                    const std::vector<Vec3>& truth) {
  const int np = static_cast<int>(pred.size());
  const int nt = static_cast<int>(truth.size());
  if (np <= nt) return hungarian_match(pred, truth);

  std::vector<int> order(np);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return conf[a] > conf[b]; });
  std::vector<int> selected(order.begin(), order.begin() + nt);
  std::sort(selected.begin(), selected.end());

  std::vector<Vec3> subset;
  subset.reserve(nt);
  for (const int i : selected) subset.push_back(pred[i]);

  const Matching sub = hungarian_match(subset, truth);
  Matching m;
  for (const MatchPair& p : sub.pairs) m.pairs.push_back({selected[p.pred], p.truth, p.dist});
  std::vector<char> in_subset(np, 0);
  for (const int i : selected) in_subset[i] = 1;
  for (int i = 0; i < np; ++i) {
    if (!in_subset[i]) m.unmatched_pred.push_back(i);
  }
  m.unmatched_truth = sub.unmatched_truth;
  return m;
}

namespace detail {

inline Metrics metrics_from_counts(long tp, long fp, long fn) {
  Metrics out;
  out.tp = tp;
  out.fp = fp;
  out.fn = fn;
  if (tp + fp + fn == 0) {
    out.precision = out.recall = out.f1 = 1.0;  // empty prediction vs empty truth
    return out;
  }
  out.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  out.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double pr = out.precision + out.recall;
  out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

}  // namespace detail

// Node detection quality at correctness radius tau. A pair matched beyond
// tau counts against both sides.
inline Metrics node_metrics(const Matching& m, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("node_metrics: tau must be positive");
  long tp = 0, beyond = 0;
  for (const MatchPair& p : m.pairs) {
    if (p.dist <= tau)
      ++tp;
    else
      ++beyond;
  }
  const long fp = static_cast<long>(m.unmatched_pred.size()) + beyond;
  const long fn = static_cast<long>(m.unmatched_truth.size()) + beyond;
  return detail::metrics_from_counts(tp, fp, fn);
}

using Matrix = std::vector<std::vector<double>>;

inline void require_square(const Matrix& a, const char* what) {
  for (const auto& row : a) {
    if (row.size() != a.size()) throw ValidationError(std::string(what) + ": matrix is not square");
  }
}

// Elementwise (A + A^T) / 2.
inline Matrix symmetrize(const Matrix& a) {
  require_square(a, "symmetrize");
  const std::size_t n = a.size();
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = 0.5 * (a[i][j] + a[j][i]);
  return out;
}

// Rows and columns permuted together: out[i][j] = a[perm[i]][perm[j]].
inline Matrix reorder_adjacency(const Matrix& a, const std::vector<int>& perm) {
  require_square(a, "reorder_adjacency");
  if (perm.size() != a.size()) throw ValidationError("reorder_adjacency: permutation size mismatch");
  const std::size_t n = a.size();
  Matrix out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = a[perm[i]][perm[j]];
  return out;
}

// Edge detection quality: the upper triangle of `pred` is binarized at
// `threshold` and compared against the upper triangle of `truth`
// (diagonal excluded).
inline Metrics edge_metrics(const Matrix& pred, const Matrix& truth, double threshold) {
  require_square(pred, "edge_metrics");
  require_square(truth, "edge_metrics");
  if (pred.size() != truth.size()) throw ValidationError("edge_metrics: size mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool p = pred[i][j] >= threshold;
      const bool t = truth[i][j] != 0.0;
      if (p && t) ++tp;
      if (p && !t) ++fp;
      if (!p && t) ++fn;
    }
  }
  return detail::metrics_from_counts(tp, fp, fn);
}

inline constexpr double kProbEps = 1e-7;  // clamp for BCE terms

// Distance-weighted coordinate loss over matched pairs:
// sum ||P_i - T_i|| * (2 - conf_i).
inline double matched_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& truth,
                           const std::vector<double>& conf, const Matching& m) {
  (void)truth;
  double total = 0.0;
  for (const MatchPair& p : m.pairs) total += p.dist * (2.0 - conf[p.pred]);
  (void)pred;
  return total;
}

// Confidence-proportional penalty for unmatched predictions:
// sum min_j ||P_i - T_j|| * conf_i.
inline double excess_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& truth,
                          const std::vector<double>& conf, const Matching& m) {
  double total = 0.0;
  for (const int i : m.unmatched_pred) {
    double nearest = 0.0;
    if (!truth.empty()) {
      nearest = std::numeric_limits<double>::infinity();
      for (const Vec3& t : truth) nearest = std::min(nearest, distance(pred[i], t));
    }
    total += nearest * conf[i];
  }
  return total;
}

// BCE toward distance-derived targets: t_i = exp(-d_i) with d_i the matched
// distance, and d_i = 1 for unmatched predictions.
inline double confidence_loss(const std::vector<double>& conf, const Matching& m) {
  const auto bce = [](double target, double c) {
    c = std::clamp(c, kProbEps, 1.0 - kProbEps);
    return -(target * std::log(c) + (1.0 - target) * std::log(1.0 - c));
  };
  double total = 0.0;
  for (const MatchPair& p : m.pairs) total += bce(std::exp(-p.dist), conf[p.pred]);
  for (const int i : m.unmatched_pred) total += bce(std::exp(-1.0), conf[i]);
  return total;
}

// Full-matrix binary cross-entropy (both triangles and the diagonal, as the
// double sum is written).
inline double edge_bce(const Matrix& pred, const Matrix& truth) {
  require_square(pred, "edge_bce");
  require_square(truth, "edge_bce");
  if (pred.size() != truth.size()) throw ValidationError("edge_bce: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double p = std::clamp(pred[i][j], kProbEps, 1.0 - kProbEps);
      const double y = truth[i][j];
      total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
  }
  return total;
}

struct NodeLosses {
  double matched = 0.0;
  double excess = 0.0;
  double confidence = 0.0;
  double total = 0.0;
};

// The combined node loss with explicit excess/confidence weights.
inline NodeLosses total_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& truth,
                             const std::vector<double>& conf, const Matching& m,
                             double alpha, double beta) {
  NodeLosses out;
  out.matched = matched_loss(pred, truth, conf, m);
  out.excess = excess_loss(pred, truth, conf, m);
  out.confidence = confidence_loss(conf, m);
  out.total = out.matched + alpha * out.excess + beta * out.confidence;
  return out;
}

// ---- prediction document ----

struct Prediction {
  std::vector<Vec3> nodes;
  std::vector<double> confidence;
  Matrix adjacency;  // empty when the document omits it
  bool has_adjacency = false;
};

// Parses {nodes: [{pos, confidence}], adjacency: ...}; the adjacency may be
// nested rows or a flat row-major array. Asymmetry beyond 1e-6 is a schema
// violation; smaller asymmetry is averaged away.
inline Prediction parse_prediction(const nlohmann::json& j) {
  Prediction p;
  for (const auto& jn : j.at("nodes")) {
    const auto& pos = jn.at("pos");
    p.nodes.push_back({pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()});
    p.confidence.push_back(jn.at("confidence").get<double>());
  }
  for (const double c : p.confidence) {
    if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("prediction: confidence outside [0, 1]");
  }
  if (!j.contains("adjacency")) return p;

  const auto& ja = j.at("adjacency");
  const std::size_t n = p.nodes.size();
  if (!ja.is_array()) throw ValidationError("prediction: adjacency must be an array");
  if (!ja.empty() && ja.front().is_array()) {
    for (const auto& row : ja) p.adjacency.push_back(row.get<std::vector<double>>());
  } else {
    const auto flat = ja.get<std::vector<double>>();
    if (n == 0 && flat.empty()) {
      p.has_adjacency = true;
      return p;
    }
    if (flat.size() != n * n) throw ValidationError("prediction: flat adjacency must hold n*n values");
    p.adjacency.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) p.adjacency[i][k] = flat[i * n + k];
  }
  if (p.adjacency.size() != n) throw ValidationError("prediction: adjacency size differs from node count");
  require_square(p.adjacency, "prediction adjacency");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(p.adjacency[i][k] >= -1e-9 && p.adjacency[i][k] <= 1.0 + 1e-9)) {
        throw ValidationError("prediction: adjacency entry outside [0, 1]");
      }
      if (std::fabs(p.adjacency[i][k] - p.adjacency[k][i]) > 1e-6) {
        throw ValidationError("prediction: adjacency asymmetric beyond 1e-6");
      }
    }
  }
  p.adjacency = symmetrize(p.adjacency);
  p.has_adjacency = true;
  return p;
}

// Ground-truth adjacency from a vessel graph; rows follow ascending node id.
inline Matrix adjacency_from_graph(const VesselGraph& g) {
  std::vector<int> ids;
  ids.reserve(g.nodes.size());
  for (const VesselNode& n : g.nodes) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  const auto row_of = [&](int id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  Matrix a(g.nodes.size(), std::vector<double>(g.nodes.size(), 0.0));
  for (const VesselEdge& e : g.edges) {
    a[row_of(e.a)][row_of(e.b)] = 1.0;
    a[row_of(e.b)][row_of(e.a)] = 1.0;
  }
  return a;
}

// Truth node positions ordered to match adjacency_from_graph rows.
inline std::vector<Vec3> positions_by_id(const VesselGraph& g) {
  std::vector<VesselNode> nodes = g.nodes;
  std::sort(nodes.begin(), nodes.end(), [](const VesselNode& a, const VesselNode& b) { return a.id < b.id; });
  std::vector<Vec3> out;
  out.reserve(nodes.size());
  for (const VesselNode& n : nodes) out.push_back(n.pos);
  return out;
}

}  // namespace vesselforge
