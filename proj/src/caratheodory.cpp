#include "bcdyn/caratheodory.hpp"

#include "bcdyn/errors.hpp"
#include "segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bcdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

bool all_assigned(const std::vector<int>& gamma, const std::vector<int>& set) {
  return std::all_of(set.begin(), set.end(), [&](int j) { return gamma[idx(j)] >= 0; });
}

}  // namespace

bool GammaGraph::total() const {
  return std::all_of(gamma.begin(), gamma.end(), [](int g) { return g >= 0; });
}

InteractionGraph GammaGraph::to_graph() const {
  InteractionGraph g(size());
  for (int i = 0; i < size(); ++i)
    if (gamma[idx(i)] >= 0) g.out[idx(i)] = {gamma[idx(i)]};
  return g;
}

double psi(const Positions& x, const InteractionKernel& kernel, const std::vector<int>& gamma, int i, int l) {
  const int n = static_cast<int>(x.rows());
  if (i < 0 || i >= n || l < 0 || l >= n || static_cast<int>(gamma.size()) != n)
    throw PreconditionError("psi: index or assignment size out of range");
  const int gl = gamma[idx(l)];
  if (gl < 0) throw PreconditionError("psi: Gamma(" + std::to_string(l) + ") is not assigned");
  const Eigen::RowVectorXd to_gl = x.row(gl) - x.row(l);
  const Eigen::RowVectorXd li = x.row(l) - x.row(i);
  return li.dot(kernel(to_gl.norm()) * to_gl - kernel(li.norm()) * li);
}

std::vector<std::vector<int>> nearest_sets(const Positions& x, double tie_tol) {
  const int n = static_cast<int>(x.rows());
  const double scale = length_scale(x);
  const double slack = tie_tol * scale * scale;
  std::vector<std::vector<int>> a(idx(n));
  for (int i = 0; i < n; ++i) {
    double best = kInf;
    for (int j = 0; j < n; ++j)
      if (j != i) best = std::min(best, squared_distance(x, i, j));
    for (int j = 0; j < n; ++j)
      if (j != i && squared_distance(x, i, j) <= best + slack) a[idx(i)].push_back(j);
  }
  return a;
}

GammaGraph build_gamma(const Positions& x, const InteractionKernel& kernel, double tie_tol) {
  const int n = static_cast<int>(x.rows());
  if (n < 2) throw PreconditionError("build_gamma needs at least two agents");
  const auto a = nearest_sets(x, tie_tol);
  GammaGraph g{std::vector<int>(idx(n), -1), std::vector<int>(idx(n), 0)};

  // Step 1: unique nearest neighbor.
  for (int i = 0; i < n; ++i)
    if (a[idx(i)].size() == 1) {
      g.gamma[idx(i)] = a[idx(i)].front();
      g.step[idx(i)] = 1;
    }

  // Step 2: mutual nearest pairs among unassigned agents.
  for (int i = 0; i < n; ++i) {
    if (g.gamma[idx(i)] >= 0) continue;
    for (int j : a[idx(i)]) {
      if (g.gamma[idx(j)] >= 0) continue;
      const auto& aj = a[idx(j)];
      if (std::find(aj.begin(), aj.end(), i) == aj.end()) continue;
      g.gamma[idx(i)] = j;
      g.gamma[idx(j)] = i;
      g.step[idx(i)] = g.step[idx(j)] = 2;
      break;
    }
  }

  // Steps 3-4.
  while (!g.total()) {
    int pick = -1;
    for (int i = 0; i < n && pick < 0; ++i)
      if (g.gamma[idx(i)] < 0 && all_assigned(g.gamma, a[idx(i)])) pick = i;
    if (pick < 0) {
      if (tie_tol > 0.0) return build_gamma(x, kernel, 0.0);
      throw NumericError("Gamma construction stalled with unassigned agents");
    }
    int best = -1;
    double best_psi = kInf;
    for (int l : a[idx(pick)]) {
      const double v = psi(x, kernel, g.gamma, pick, l);
      if (v < best_psi) {
        best_psi = v;
        best = l;
      }
    }
    g.gamma[idx(pick)] = best;
    g.step[idx(pick)] = 3;
  }
  return g;
}

Velocities carath_rhs(const Positions& x, const InteractionKernel& kernel, const GammaGraph& gamma) {
  if (!gamma.total()) throw PreconditionError("carath_rhs needs a total assignment");
  return graph_field(kernel, gamma.to_graph(), x);
}

double validity_margin(const Positions& x, const GammaGraph& gamma, double coincide_abs) {
  const int n = static_cast<int>(x.rows());
  double best = kInf;
  for (int i = 0; i < n; ++i) {
    const int g = gamma.gamma[idx(i)];
    if (g < 0) throw PreconditionError("validity_margin needs a total assignment");
    const double dg = distance(x, i, g);
    for (int k = 0; k < n; ++k) {
      if (k == i || k == g) continue;
      if ((x.row(k) - x.row(g)).norm() <= coincide_abs) continue;
      best = std::min(best, distance(x, i, k) - dg);
    }
  }
  return best;
}

bool forward_admissible(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel,
                        const InteractionGraph& graph, double tie_tol, double coincide_rel) {
  const double scale = length_scale(x);
  const double near = tie_tol * scale * scale;
  const double co = coincide_rel * scale;
  const Velocities v = graph_field(kernel, graph, x);
  const double tiny = 1e-12 * scale * (scale + v.cwiseAbs().maxCoeff());
  for (const auto& c : graph_constraints(spec, graph)) {
    const double m = constraint_margin(x, c, spec.radius, co);
    if (!std::isfinite(m) || m > near) continue;
    if (m < -near) return false;
    if (c.sign * switching_rate(x, c.manifold, v) < -tiny) return false;
  }
  return true;
}

std::vector<Resolution> caratheodory_start_options(const Positions& x, const ModelSpec& spec,
                                                   const InteractionKernel& kernel, double tie_tol,
                                                   double coincide_rel) {
  spec.validate(static_cast<int>(x.rows()));
  std::vector<Resolution> out;
  const double scale = length_scale(x);
  const double tol = spec.is_metric() ? tie_tol * scale : tie_tol;
  if (spec.is_topological() && spec.kappa == 1) {
    InteractionGraph g = build_gamma(x, kernel, tie_tol).to_graph();
    out.push_back({g, "gamma"});
    for (auto& r : tie_resolutions(x, spec, tol, coincide_rel))
      if (!(r.graph == g) && forward_admissible(x, spec, kernel, r.graph, tie_tol, coincide_rel))
        out.push_back(std::move(r));
    return out;
  }
  for (auto& r : tie_resolutions(x, spec, tol, coincide_rel))
    if (forward_admissible(x, spec, kernel, r.graph, tie_tol, coincide_rel)) out.push_back(std::move(r));
  if (out.empty()) out.push_back({pointwise_graph(spec, x), "pointwise"});
  return out;
}

PiecewiseTrajectory simulate_caratheodory(const Configuration& x0, const ModelSpec& spec,
                                          const InteractionKernel& kernel, const StepControl& ctrl, double horizon,
                                          const CaratheodoryOptions& options) {
  ctrl.validate();
  spec.validate(x0.agents());
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("horizon must be positive and finite");

  PiecewiseTrajectory out;
  out.label = options.start_branch == 0 ? "caratheodory" : "caratheodory/alt" + std::to_string(options.start_branch);
  out.best_effort = spec.is_topological() && spec.kappa > 1;

  double t = x0.t();
  Positions x = x0.x();
  const double t_end = t + horizon;
  out.path.samples.push_back({t, x});

  auto starts = caratheodory_start_options(x, spec, kernel, options.tie_tol, options.coincide_tol);
  if (options.start_branch < 0 || options.start_branch >= static_cast<int>(starts.size()))
    throw ConfigError("start branch " + std::to_string(options.start_branch) + " not available (" +
                      std::to_string(starts.size()) + " admissible start graphs)");
  InteractionGraph graph = starts[idx(options.start_branch)].graph;

  detail::StepBudget budget{0, ctrl.max_steps, ctrl.sample_stride};
  int events = 0;
  while (true) {
    const auto constraints = graph_constraints(spec, graph);
    const double scale = length_scale(x);
    const double co = options.coincide_tol * scale;
    const double eps_abs = 1e-12 * scale * scale;
    Eigen::VectorXd thr(static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      const double m = constraint_margin(x, constraints[c], spec.radius, co);
      thr(static_cast<Eigen::Index>(c)) = std::min(0.0, m) - eps_abs;
    }
    auto monitors = [&](const Positions& y) {
      Eigen::VectorXd m(thr.size());
      for (std::size_t c = 0; c < constraints.size(); ++c)
        m(static_cast<Eigen::Index>(c)) =
            constraint_margin(y, constraints[c], spec.radius, co) - thr(static_cast<Eigen::Index>(c));
      return m;
    };

    Segment seg{t, t, graph, Segment::Mode::Frozen, std::nullopt, 0.0};
    detail::SegmentOutcome res;
    if (graph_field(kernel, graph, x).isZero(0.0)) {
      // Frozen equilibrium: nothing moves, no constraint can change.
      out.path.samples.push_back({t_end, x});
      res = {t_end, x, -1};
    } else {
      auto step = [&](const Positions& y, double dt) {
        return rk4_step([&](const Positions& z) { return graph_field(kernel, graph, z); }, y, dt);
      };
      res = detail::run_segment(step, monitors, t, x, t_end, ctrl, out.path, budget);
    }
    seg.t1 = res.t;
    out.segments.push_back(std::move(seg));
    t = res.t;
    x = std::move(res.x);
    if (res.fired < 0) break;
    if (++events > ctrl.max_events)
      throw RunawayEventsError("more than " + std::to_string(ctrl.max_events) + " topology changes before t=" +
                               std::to_string(t));
    out.path.events.push_back({t, constraints[idx(res.fired)].manifold.to_string()});
    graph = caratheodory_start_options(x, spec, kernel, options.tie_tol, options.coincide_tol).front().graph;
  }
  return out;
}

ResidualReport verify_caratheodory(const Trajectory& traj, const ModelSpec& spec, const InteractionKernel& kernel,
                                   double tol, double tol_manifold) {
  if (!(tol > 0.0)) throw PreconditionError("residual tolerance must be positive");
  ResidualReport rep;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto d = finite_difference(traj, k);
    if (!d) continue;
    const Positions& x = traj.samples[k].x;
    if (discontinuity_distance(x, spec) <= tol_manifold) continue;
    const double r = (*d - vector_field(spec, kernel, x)).cwiseAbs().maxCoeff();
    ++rep.checked;
    if (r > tol) ++rep.violations;
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst_t = traj.samples[k].t;
    }
  }
  return rep;
}

}  // namespace bcdyn
