#pragma once

// Shared numerical machinery: fixed-step RK4, event bracketing by bisection,
// the exact propagator of frozen linear segments, and the explicit Euler
// oracle used for independent cross-checks.

#include "bcdyn/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bcdyn {

struct StepControl {
  double h = 1e-3;
  /// Event times are refined until the bracket is narrower than eps_event * (1 + |t|).
  double eps_event = 1e-10;
  /// Sliding band, relative: |θ| <= eps_manifold * (1 + ||x||).
  double eps_manifold = 1e-9;
  int max_events = 10000;
  long max_steps = 50'000'000;
  /// Record every k-th regular step (event and terminal states are always recorded).
  int sample_stride = 1;

  void validate() const;
};

struct Sample {
  double t = 0.0;
  Positions x;
};

struct EventMarker {
  double t = 0.0;
  std::string descriptor;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<EventMarker> events;

  bool empty() const { return samples.empty(); }
  const Sample& initial() const { return samples.front(); }
  const Sample& terminal() const { return samples.back(); }
  /// Throws PreconditionError unless times strictly increase and shapes agree.
  void validate() const;
};

using Field = std::function<Velocities(const Positions&)>;

/// One classical fourth-order Runge-Kutta step. Throws NumericError on non-finite output.
Positions rk4_step(const Field& rhs, const Positions& x, double h);

struct EventBracket {
  double t_lo = 0.0;  ///< last time with the initial sign pattern
  double t_hi = 0.0;  ///< first known time past the sign change
  int index = -1;     ///< monitored function that changed sign at t_hi
};

/// Bisection for the earliest sign change of any monitored switching function
/// along `path` on [t0, t1]. Signs are taken relative to t0 (zero counts as
/// positive). Throws PreconditionError if nothing changes sign at t1.
EventBracket locate_event(const std::function<Eigen::VectorXd(const Positions&)>& switches,
                          const std::function<Positions(double)>& path, double t0, double t1, double eps_event);

/// Derivative at sample k from a five-point Lagrange stencil on (possibly
/// non-uniform) sample times. Returns nothing when fewer than five samples
/// exist or an event time lies strictly inside the stencil.
std::optional<Velocities> finite_difference(const Trajectory& traj, std::size_t k);

/// exp(A) by scaling and squaring of a truncated Taylor series.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

/// Exact flow of the frozen linear system x_i' = c * sum_{j in out(i)} (x_j - x_i)
/// for a constant kernel a ≡ c. Throws UnsupportedError for other kernels.
Positions propagate_linear_exact(const InteractionKernel& kernel, const InteractionGraph& graph, const Positions& x0,
                                 double dt);

/// Naive explicit Euler re-evaluating the pointwise neighbor rule every step.
/// Requires h_fine <= 1e-4. Records one sample every `record_every` steps plus the endpoint.
Trajectory euler_oracle(const ModelSpec& spec, const InteractionKernel& kernel, const Configuration& x0, double h_fine,
                        double horizon, long record_every = 1000);

}  // namespace bcdyn
