#pragma once

// Piecewise-smooth trajectories shared by both solution engines.

#include "bcdyn/integrator.hpp"
#include "bcdyn/switching.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bcdyn {

struct Segment {
  enum class Mode { Frozen, Sliding };
  double t0 = 0.0;
  double t1 = 0.0;
  /// Frozen graph; for sliding segments, the plus-side graph.
  InteractionGraph graph;
  Mode mode = Mode::Frozen;
  std::optional<Manifold> manifold;  ///< sliding manifold
  double alpha = 0.0;                ///< sliding coefficient at t0
};

struct ForkEvent {
  double t = 0.0;
  Manifold manifold;
  std::string choice;
};

struct PiecewiseTrajectory {
  Trajectory path;
  std::vector<Segment> segments;
  int branch_id = 0;
  int parent = -1;
  std::string label;
  /// Decision that created this branch (absent for the root).
  std::optional<ForkEvent> fork;
  /// Choices taken at every multi-option decision along this branch.
  std::vector<ForkEvent> decisions;
  bool best_effort = false;

  const Sample& terminal() const { return path.terminal(); }
};

}  // namespace bcdyn
