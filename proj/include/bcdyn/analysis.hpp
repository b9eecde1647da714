#pragma once

// Property verifiers along trajectories, clusters and equilibria, Lyapunov
// monitors and the κ = 1 pseudoforest check.

#include "bcdyn/integrator.hpp"
#include "bcdyn/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bcdyn {

struct PropertyReport {
  std::string property;
  bool pass = true;
  double deviation = 0.0;
  std::vector<double> witness_t;
  std::map<std::string, double> metrics;
};

/// Max over samples of |x_ave(t) - x_ave(t0)|.
PropertyReport check_average_invariance(const Trajectory& traj, double tol);

/// `count` sample-index pairs (a, b) with t_a < t_b spread over the trajectory.
std::vector<std::pair<std::size_t, std::size_t>> nested_pairs(const Trajectory& traj, int count = 10);

/// Every x_i(T2) lies in conv{x_j(T1)} for each pair (T1, T2).
PropertyReport check_support_contractivity(const Trajectory& traj, double tol,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct ClusterPartition {
  std::vector<std::vector<int>> blocks;
  Positions representatives;  ///< one row per block (block mean)
  bool is_cluster_point = false;

  /// Block index of every agent.
  std::vector<int> labels() const;
};

/// Blocks are connected components of {(i, j): |x_i - x_j| <= eps}. x is a
/// cluster point when every pointwise neighbor of i sits in i's block; metric
/// pairs within eps of the radius count as non-interacting.
ClusterPartition detect_clusters(const Positions& x, const ModelSpec& spec, double eps_cluster);

/// 1e-6 times the initial diameter (or 1e-6 for a collapsed start).
double default_cluster_eps(const Trajectory& traj);

/// V(x) = Σ_{i≠j} I(min(|x_i - x_j|, radius)), I(r) = ∫_0^r a(s) s ds.
double lyapunov_V_metric(const Positions& x, const InteractionKernel& kernel, double radius = 1.0);

/// W(x) = Σ_i Σ_{j ∈ N_i^t(x)} I(|x_j - x_i|).
double lyapunov_W_topological(const Positions& x, const InteractionKernel& kernel, int kappa);

/// Largest increase of `fn` between consecutive samples. With skip_events,
/// steps whose interval contains an event are ignored. Reports the fraction of
/// strictly positive increments as metric "positive_fraction".
PropertyReport monitor_monotonicity(const Trajectory& traj, const std::function<double(const Positions&)>& fn,
                                    double tol, bool skip_events = false, const std::string& name = "monotone");

struct PseudoforestReport {
  bool ok = false;
  int components = 0;
  std::vector<std::string> diagnostics;
};

/// Every weakly connected component of an out-degree-1 graph holds exactly one
/// cycle, of length 2, reachable from all its nodes.
PseudoforestReport pseudoforest_check(const InteractionGraph& graph);

/// Converged when |f(x(t))| (or, at discontinuities, the distance from 0 to the
/// Krasovsky hull) stays below eps_conv over the trailing window and the
/// cluster blocks do not change there. Returns the terminal partition.
std::optional<ClusterPartition> detect_convergence(const Trajectory& traj, const ModelSpec& spec,
                                                   const InteractionKernel& kernel, double eps_conv = 1e-8,
                                                   double window = 1.0);

/// The pointwise field vanishes exactly.
bool is_caratheodory_equilibrium(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel);

}  // namespace bcdyn
