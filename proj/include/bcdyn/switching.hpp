#pragma once

// Discontinuity manifolds of the metric and topological right-hand sides.
//
// Metric pair (i, j):          θ(x) = ||x_i - x_j||^2 - radius^2
// Topological triple (i, j, k): θ(x) = ||x_j - x_i||^2 - ||x_k - x_i||^2
//
// On the negative side of a manifold the "minus" resolution is active: the
// metric edge i~j is on, or agent i prefers j over k. The plus side is the
// edge off / k preferred. All switching functions use squared distances so
// that they stay smooth when agents coincide.

#include "bcdyn/model.hpp"

#include <string>
#include <vector>

namespace bcdyn {

struct Manifold {
  enum class Kind { MetricPair, TopologicalTriple };
  Kind kind = Kind::MetricPair;
  int i = 0;
  int j = 0;
  int k = -1;

  static Manifold pair(int i, int j) { return {Kind::MetricPair, std::min(i, j), std::max(i, j), -1}; }
  static Manifold triple(int i, int j, int k) { return {Kind::TopologicalTriple, i, j, k}; }

  bool is_pair() const { return kind == Kind::MetricPair; }
  /// "pair(i,j)" or "triple(i,j,k)", zero-based.
  std::string to_string() const;

  friend bool operator==(const Manifold&, const Manifold&) = default;
};

double switching_value(const Positions& x, const Manifold& m, double radius);
/// ∇θ(x), shaped like x.
Positions switching_gradient(const Positions& x, const Manifold& m);
/// ∇θ(x) · v.
double switching_rate(const Positions& x, const Manifold& m, const Velocities& v);

/// Side graphs of `m` built from `base`: first = minus resolution, second = plus resolution.
std::pair<InteractionGraph, InteractionGraph> side_graphs(const InteractionGraph& base, const Manifold& m);

/// Scale used by relative tolerances: 1 + diameter(x).
double length_scale(const Positions& x);

/// Coincidence threshold used to recognize agents sharing a position.
double coincide_threshold(const Positions& x, double rel_tol);

/// A requirement `sign * θ_m(x) >= 0` that keeps a frozen graph consistent
/// with the pointwise neighbor rule.
struct Constraint {
  Manifold manifold;
  double sign = 1.0;
};

/// Constraints that must hold for `graph` to realize the pointwise rule of `spec`.
/// Topological constraints between coincident competitors are kept but evaluate
/// as satisfied while the two competitors share a position.
std::vector<Constraint> graph_constraints(const ModelSpec& spec, const InteractionGraph& graph);

/// Margin of one constraint, or +infinity when it is inactive because the
/// competitors coincide (within `coincide_abs`).
double constraint_margin(const Positions& x, const Constraint& c, double radius, double coincide_abs);

/// Discontinuity manifolds through x: metric pairs with | ||x_i-x_j|| - radius | <= tol;
/// topological triples (i, j, k) at agent i's κ-th-nearest boundary with
/// |θ| <= tol * scale^2, one representative per coincident position.
std::vector<Manifold> active_manifolds(const Positions& x, const ModelSpec& spec, double tol,
                                       double coincide_rel = 1e-12);

/// One admissible tie resolution of the neighbor rule at x.
struct Resolution {
  InteractionGraph graph;
  std::string provenance;
};

/// Every tie resolution over the active manifolds at x (metric: each boundary
/// pair on/off; topological: each tied group resolved, respecting κ). The
/// resolution realizing the pointwise rule comes first when it is present.
/// Throws CombinatorialBlowupError above 2^20 resolutions.
std::vector<Resolution> tie_resolutions(const Positions& x, const ModelSpec& spec, double tol,
                                        double coincide_rel = 1e-12);

/// Smallest gap between x and a discontinuity manifold, in distance units:
/// metric min |d_ij - radius|; topological min over i, j in N_i(x), k outside
/// (positions distinct) of d_ik - d_ij.
double discontinuity_distance(const Positions& x, const ModelSpec& spec, double coincide_rel = 1e-12);

}  // namespace bcdyn
