#pragma once

// Smooth-segment runner shared by the solution engines.

#include "bcdyn/errors.hpp"
#include "bcdyn/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace bcdyn::detail {

/// Advances a state by dt along the current smooth dynamics.
using StepFn = std::function<Positions(const Positions&, double)>;
/// Values that must stay nonnegative along the segment.
using MonitorFn = std::function<Eigen::VectorXd(const Positions&)>;

struct SegmentOutcome {
  double t = 0.0;
  Positions x;
  int fired = -1;  ///< monitor index that went negative, or -1 at t_end
};

struct StepBudget {
  long steps = 0;
  long max_steps = 0;
  int stride = 1;
};

inline bool reached(double t, double t_end) { return t_end - t <= 1e-13 * (1.0 + std::abs(t_end)); }

/// Integrates with fixed steps until t_end or until a monitor turns negative
/// (bisected to ctrl.eps_event). Appends samples to `out`; the final state is
/// always recorded.
inline SegmentOutcome run_segment(const StepFn& step, const MonitorFn& monitors, double t, Positions x, double t_end,
                                  const StepControl& ctrl, Trajectory& out, StepBudget& budget) {
  auto record = [&](double ts, const Positions& xs) {
    if (out.samples.empty() || ts > out.samples.back().t) out.samples.push_back({ts, xs});
  };
  while (!reached(t, t_end)) {
    if (++budget.steps > budget.max_steps) throw NumericError("step budget exhausted before the horizon");
    // The step nearest the horizon lands on it exactly; accumulated round-off
    // must not leave a sliver step behind.
    const double dt = t_end - t <= ctrl.h * (1.0 + 1e-6) ? t_end - t : ctrl.h;
    Positions next = step(x, dt);
    const Eigen::VectorXd m = monitors(next);
    bool violated = false;
    for (Eigen::Index c = 0; c < m.size(); ++c)
      if (m(c) < 0.0) violated = true;
    if (violated) {
      const double t0 = t;
      const Positions x0 = x;
      auto path = [&](double s) -> Positions { return s <= t0 ? x0 : step(x0, s - t0); };
      EventBracket br = locate_event(monitors, path, t0, t0 + dt, ctrl.eps_event);
      Positions xe = path(br.t_hi);
      record(br.t_hi, xe);
      return {br.t_hi, std::move(xe), br.index};
    }
    t = (dt == t_end - t) ? t_end : t + dt;
    x = std::move(next);
    if (budget.steps % budget.stride == 0 || reached(t, t_end)) record(t, x);
  }
  if (!out.samples.empty() && reached(out.samples.back().t, t_end) && out.samples.back().x == x)
    out.samples.back().t = t_end;
  else
    record(t_end, x);
  return {t_end, std::move(x), -1};
}

}  // namespace bcdyn::detail
