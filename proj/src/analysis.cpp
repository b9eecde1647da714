#include "bcdyn/analysis.hpp"

#include "bcdyn/errors.hpp"
#include "bcdyn/hull.hpp"
#include "bcdyn/krasovsky.hpp"
#include "bcdyn/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bcdyn {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(idx(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[idx(a)] != a) a = parent[idx(a)] = parent[idx(parent[idx(a)])];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[idx(std::max(a, b))] = std::min(a, b);
  }
};

void note_witness(PropertyReport& r, double t) {
  if (r.witness_t.size() < 16) r.witness_t.push_back(t);
}

}  // namespace

PropertyReport check_average_invariance(const Trajectory& traj, double tol) {
  PropertyReport r{"P1_average", true, 0.0, {}, {}};
  if (traj.empty()) return r;
  const Point ref = average(traj.initial().x);
  for (const auto& s : traj.samples) {
    const double dev = (average(s.x) - ref).norm();
    if (dev > r.deviation) r.deviation = dev;
    if (dev > tol) {
      r.pass = false;
      note_witness(r, s.t);
    }
  }
  r.metrics["final_drift"] = (average(traj.terminal().x) - ref).norm();
  return r;
}

std::vector<std::pair<std::size_t, std::size_t>> nested_pairs(const Trajectory& traj, int count) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = traj.samples.size();
  if (n < 2 || count <= 0) return out;
  const double last = static_cast<double>(n - 1);
  for (int m = 0; m < count; ++m) {
    // Early times paired with progressively later ones.
    auto a = static_cast<std::size_t>(std::floor(last * m / (2.0 * count)));
    auto b = static_cast<std::size_t>(std::floor(last * (m + 1.0) / count));
    b = std::min(std::max(b, a + 1), n - 1);
    if (a < b) out.emplace_back(a, b);
  }
  return out;
}

PropertyReport check_support_contractivity(const Trajectory& traj, double tol,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  PropertyReport r{"P2_support", true, 0.0, {}, {}};
  for (const auto& [a, b] : pairs) {
    if (a >= traj.samples.size() || b >= traj.samples.size() || !(traj.samples[a].t < traj.samples[b].t))
      throw PreconditionError("support pairs need valid sample indices with T1 < T2");
    const Positions& x1 = traj.samples[a].x;
    const Positions& x2 = traj.samples[b].x;
    std::vector<Eigen::VectorXd> hull;
    for (Eigen::Index i = 0; i < x1.rows(); ++i) hull.push_back(x1.row(i).transpose());
    for (Eigen::Index i = 0; i < x2.rows(); ++i) {
      const auto hm = hull_membership(hull, x2.row(i).transpose(), tol);
      r.deviation = std::max(r.deviation, hm.distance);
      if (!hm.inside) {
        r.pass = false;
        note_witness(r, traj.samples[b].t);
      }
    }
  }
  r.metrics["pairs"] = static_cast<double>(pairs.size());
  return r;
}

std::vector<int> ClusterPartition::labels() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.size());
  std::vector<int> out(idx(n), -1);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (int i : blocks[k]) out[idx(i)] = static_cast<int>(k);
  return out;
}

ClusterPartition detect_clusters(const Positions& x, const ModelSpec& spec, double eps_cluster) {
  if (!(eps_cluster > 0.0)) throw PreconditionError("cluster tolerance must be positive");
  const int n = static_cast<int>(x.rows());
  UnionFind uf(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (distance(x, i, j) <= eps_cluster) uf.unite(i, j);

  ClusterPartition p;
  std::vector<int> block_of(idx(n), -1);
  for (int i = 0; i < n; ++i) {
    const int root = uf.find(i);
    if (block_of[idx(root)] < 0) {
      block_of[idx(root)] = static_cast<int>(p.blocks.size());
      p.blocks.emplace_back();
    }
    p.blocks[idx(block_of[idx(root)])].push_back(i);
  }
  p.representatives = Positions::Zero(static_cast<Eigen::Index>(p.blocks.size()), x.cols());
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    for (int i : p.blocks[b]) p.representatives.row(static_cast<Eigen::Index>(b)) += x.row(i);
    p.representatives.row(static_cast<Eigen::Index>(b)) /= static_cast<double>(p.blocks[b].size());
  }

  p.is_cluster_point = true;
  for (int i = 0; i < n && p.is_cluster_point; ++i) {
    const auto nbrs = spec.is_metric() ? metric_neighbors(x, i, spec.radius - eps_cluster)
                                       : topological_neighbors(x, i, spec.kappa);
    for (int j : nbrs)
      if (uf.find(j) != uf.find(i)) p.is_cluster_point = false;
  }
  return p;
}

double default_cluster_eps(const Trajectory& traj) {
  const double d = traj.empty() ? 0.0 : diameter(traj.initial().x);
  return 1e-6 * (d > 0.0 ? d : 1.0);
}

double lyapunov_V_metric(const Positions& x, const InteractionKernel& kernel, double radius) {
  double v = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = i + 1; j < x.rows(); ++j) v += 2.0 * kernel.integral(std::min(distance(x, i, j), radius));
  return v;
}

double lyapunov_W_topological(const Positions& x, const InteractionKernel& kernel, int kappa) {
  double w = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j : topological_neighbors(x, i, kappa)) w += kernel.integral(distance(x, i, j));
  return w;
}

PropertyReport monitor_monotonicity(const Trajectory& traj, const std::function<double(const Positions&)>& fn,
                                    double tol, bool skip_events, const std::string& name) {
  PropertyReport r{name, true, 0.0, {}, {}};
  if (traj.samples.size() < 2) return r;
  int positive = 0;
  int counted = 0;
  double prev = fn(traj.samples.front().x);
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const double cur = fn(traj.samples[k].x);
    const double t0 = traj.samples[k - 1].t;
    const double t1 = traj.samples[k].t;
    const double inc = cur - prev;
    prev = cur;
    if (skip_events && std::any_of(traj.events.begin(), traj.events.end(),
                                   [&](const EventMarker& e) { return e.t > t0 && e.t <= t1; }))
      continue;
    ++counted;
    if (inc > 0.0) ++positive;
    if (inc > r.deviation) r.deviation = inc;
    if (inc > tol) {
      r.pass = false;
      note_witness(r, t1);
    }
  }
  r.metrics["positive_fraction"] = counted ? static_cast<double>(positive) / counted : 0.0;
  r.metrics["increments"] = counted;
  return r;
}

PseudoforestReport pseudoforest_check(const InteractionGraph& graph) {
  const int n = graph.size();
  for (int i = 0; i < n; ++i)
    if (graph.out[idx(i)].size() != 1) throw PreconditionError("pseudoforest check needs out-degree 1 everywhere");
  PseudoforestReport rep;
  rep.ok = true;
  UnionFind uf(n);
  for (int i = 0; i < n; ++i) uf.unite(i, graph.out[idx(i)].front());
  auto succ = [&](int i) { return graph.out[idx(i)].front(); };

  std::vector<int> roots;
  for (int i = 0; i < n; ++i)
    if (uf.find(i) == i) roots.push_back(i);
  rep.components = static_cast<int>(roots.size());

  // Cycle nodes: nodes that return to themselves after at most n steps.
  std::vector<bool> on_cycle(idx(n), false);
  for (int i = 0; i < n; ++i) {
    int v = succ(i);
    for (int s = 0; s < n && v != i; ++s) v = succ(v);
    on_cycle[idx(i)] = v == i;
  }
  for (int r : roots) {
    std::vector<int> cyc;
    for (int i = 0; i < n; ++i)
      if (uf.find(i) == r && on_cycle[idx(i)]) cyc.push_back(i);
    // Out-degree 1 forces exactly one cycle per weak component; check its length.
    if (cyc.size() != 2) {
      rep.ok = false;
      rep.diagnostics.push_back("component of agent " + std::to_string(r) + " has a cycle of length " +
                                std::to_string(cyc.size()));
      continue;
    }
    for (int i = 0; i < n; ++i) {
      if (uf.find(i) != r) continue;
      int v = i;
      bool hit = false;
      for (int s = 0; s <= n && !hit; ++s, v = succ(v)) hit = v == cyc[0] || v == cyc[1];
      if (!hit) {
        rep.ok = false;
        rep.diagnostics.push_back("agent " + std::to_string(i) + " does not reach its cycle");
      }
    }
  }
  return rep;
}

std::optional<ClusterPartition> detect_convergence(const Trajectory& traj, const ModelSpec& spec,
                                                   const InteractionKernel& kernel, double eps_conv, double window) {
  if (traj.empty()) return std::nullopt;
  const double t_end = traj.terminal().t;
  const double eps_cluster = default_cluster_eps(traj);
  const auto blocks = detect_clusters(traj.terminal().x, spec, eps_cluster).blocks;

  // Cheap pass: stable blocks, and either a small field or a state on a discontinuity manifold.
  std::vector<std::size_t> on_manifold;
  for (std::size_t k = traj.samples.size(); k-- > 0;) {
    const Sample& s = traj.samples[k];
    if (s.t < t_end - window) break;
    if (detect_clusters(s.x, spec, eps_cluster).blocks != blocks) return std::nullopt;
    if (vector_field(spec, kernel, s.x).cwiseAbs().maxCoeff() <= eps_conv) continue;
    const double tol_active = 1e-7 * length_scale(s.x);
    if (discontinuity_distance(s.x, spec) > tol_active) return std::nullopt;
    on_manifold.push_back(k);
  }

  // Krasovsky test at discontinuities; repeated states are checked once.
  const Positions* last_ok = nullptr;
  for (std::size_t k : on_manifold) {
    const Positions& x = traj.samples[k].x;
    if (last_ok && *last_ok == x) continue;
    try {
      const auto set = limit_field_vertices(x, spec, kernel, spec.is_metric() ? 1e-7 * length_scale(x) : 1e-7);
      if (set.vertices.size() < 2) return std::nullopt;
      std::vector<Eigen::VectorXd> pts;
      for (const auto& v : set.vertices) pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()));
      if (min_norm_point(pts, eps_conv).distance > eps_conv) return std::nullopt;
    } catch (const CombinatorialBlowupError&) {
      return std::nullopt;
    }
    last_ok = &x;
  }
  return detect_clusters(traj.terminal().x, spec, eps_cluster);
}

bool is_caratheodory_equilibrium(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel) {
  return vector_field(spec, kernel, x).isZero(0.0);
}

}  // namespace bcdyn
