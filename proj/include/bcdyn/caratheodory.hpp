#pragma once

// Caratheodory solutions: the Γ-graph construction for the κ = 1 topological
// model and an event-driven integrator that freezes the interaction graph
// between topology changes.

#include "bcdyn/integrator.hpp"
#include "bcdyn/piecewise.hpp"
#include "bcdyn/switching.hpp"

#include <string>
#include <vector>

namespace bcdyn {

/// Neighbor assignment Γ(i) for κ = 1; -1 marks an unassigned agent.
struct GammaGraph {
  std::vector<int> gamma;
  /// Construction step (1, 2 or 3) that assigned each agent; 0 if unassigned.
  std::vector<int> step;

  int size() const { return static_cast<int>(gamma.size()); }
  bool total() const;
  InteractionGraph to_graph() const;
};

/// ψ_i(l) = (x_l - x_i)·(a(|x_Γ(l) - x_l|)(x_Γ(l) - x_l) - a(|x_l - x_i|)(x_l - x_i)).
/// Throws PreconditionError if Γ(l) is unassigned.
double psi(const Positions& x, const InteractionKernel& kernel, const std::vector<int>& gamma, int i, int l);

/// Nearest-neighbor sets A_i; distances within tie_tol * scale^2 (squared) of the minimum count as tied.
std::vector<std::vector<int>> nearest_sets(const Positions& x, double tie_tol = 0.0);

/// Steps 1-4 of the κ = 1 construction. Pair scans and argmin ties go to the lowest index.
GammaGraph build_gamma(const Positions& x, const InteractionKernel& kernel, double tie_tol = 0.0);

/// x_i' = a(|x_Γ(i) - x_i|)(x_Γ(i) - x_i).
Velocities carath_rhs(const Positions& x, const InteractionKernel& kernel, const GammaGraph& gamma);

/// min over i and k outside {i, Γ(i)} of |x_i - x_k| - |x_i - x_Γ(i)|, skipping
/// competitors that coincide with Γ(i) (within coincide_abs). +inf if nothing is compared.
double validity_margin(const Positions& x, const GammaGraph& gamma, double coincide_abs = 0.0);

/// True when no graph constraint that is (nearly) tight at x is being violated
/// at first order by the graph's own field.
bool forward_admissible(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel,
                        const InteractionGraph& graph, double tie_tol, double coincide_rel);

struct CaratheodoryOptions {
  /// Index into caratheodory_start_options(); 0 is the default continuation.
  int start_branch = 0;
  /// Relative tie tolerance on squared distances used when rebuilding graphs.
  double tie_tol = 1e-9;
  /// Relative coincidence tolerance (Case 1 of the construction).
  double coincide_tol = 1e-12;
};

/// Admissible starting graphs at x. The first entry is the default: the
/// Γ-graph for κ = 1, the strict pointwise graph otherwise.
std::vector<Resolution> caratheodory_start_options(const Positions& x, const ModelSpec& spec,
                                                   const InteractionKernel& kernel, double tie_tol = 1e-9,
                                                   double coincide_rel = 1e-12);

/// Event-driven piecewise integration with a frozen graph per segment. Throws
/// RunawayEventsError past ctrl.max_events and NumericError on step failure.
PiecewiseTrajectory simulate_caratheodory(const Configuration& x0, const ModelSpec& spec,
                                          const InteractionKernel& kernel, const StepControl& ctrl, double horizon,
                                          const CaratheodoryOptions& options = {});

struct ResidualReport {
  double max_residual = 0.0;
  int violations = 0;
  int checked = 0;
  double worst_t = 0.0;
  bool passed() const { return violations == 0; }
};

/// Compares finite-difference derivatives with vector_field at samples farther
/// than tol_manifold from every discontinuity manifold.
ResidualReport verify_caratheodory(const Trajectory& traj, const ModelSpec& spec, const InteractionKernel& kernel,
                                   double tol, double tol_manifold = 1e-6);

}  // namespace bcdyn
