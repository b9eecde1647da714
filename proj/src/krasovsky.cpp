#include "bcdyn/krasovsky.hpp"

#include "bcdyn/errors.hpp"
#include "bcdyn/hull.hpp"
#include "segment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace bcdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

Eigen::VectorXd flatten(const Velocities& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index d = 0; d < v.cols(); ++d) out(i * v.cols() + d) = v(i, d);
  return out;
}

bool nearly_equal(const Velocities& a, const Velocities& b) {
  const double s = 1.0 + std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() <= 1e-14 * s;
}

double active_tol(const ModelSpec& spec, const Positions& x, double rel) {
  return spec.is_metric() ? rel * length_scale(x) : rel;
}

double parse_time(const std::string& s) {
  if (s == "inf" || s == "forever") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !(v >= 0.0)) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad exit time '" + s + "'");
  }
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur.push_back(ch);
    }
  }
  if (!cur.empty() || !parts.empty()) parts.push_back(cur);
  return parts;
}

std::string format_time(double t) {
  if (std::isinf(t)) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

// Newton projection onto θ = 0 along ∇θ. The gradient rows sum to zero, so the average is kept.
void project(Positions& x, const Manifold& m, double radius) {
  for (int it = 0; it < 8; ++it) {
    const double th = switching_value(x, m, radius);
    const double scale = length_scale(x);
    if (std::abs(th) <= 1e-15 * scale * scale) return;
    const Positions g = switching_gradient(x, m);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) return;
    x -= (th / g2) * g;
  }
}

double blend_alpha(double a, double b) { return a == b ? 0.5 : b / (b - a); }

bool same_manifold(const Manifold& a, const Manifold& b) {
  if (a.kind != b.kind || a.i != b.i) return false;
  if (a.is_pair()) return a.j == b.j;
  return (a.j == b.j && a.k == b.k) || (a.j == b.k && a.k == b.j);
}

}  // namespace

// ---------------------------------------------------------------------------

LimitFieldSet limit_field_vertices(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel,
                                   double tol) {
  LimitFieldSet set;
  for (auto& r : tie_resolutions(x, spec, tol)) {
    Velocities v = graph_field(kernel, r.graph, x);
    bool dup = false;
    for (const auto& w : set.vertices)
      if (nearly_equal(v, w)) dup = true;
    if (dup) continue;
    set.vertices.push_back(std::move(v));
    set.provenance.push_back(r.provenance);
    set.graphs.push_back(std::move(r.graph));
  }
  return set;
}

bool zero_in_krasovsky(const Positions& x, const ModelSpec& spec, const InteractionKernel& kernel, double tol,
                       double tol_active) {
  const auto set = limit_field_vertices(x, spec, kernel, active_tol(spec, x, tol_active));
  std::vector<Eigen::VectorXd> pts;
  for (const auto& v : set.vertices) pts.push_back(flatten(v));
  return hull_membership(pts, Eigen::VectorXd::Zero(x.size()), tol).inside;
}

std::optional<double> sliding_coefficient(const Positions& x, const Manifold& m, const Velocities& f_minus,
                                          const Velocities& f_plus) {
  const double a = switching_rate(x, m, f_minus);
  const double b = switching_rate(x, m, f_plus);
  if (a == b) {
    if (b == 0.0) return 0.5;
    return std::nullopt;
  }
  const double alpha = b / (b - a);
  if (alpha >= 0.0 && alpha <= 1.0) return alpha;
  return std::nullopt;
}

std::string to_string(EventClassification::Kind kind) {
  switch (kind) {
    case EventClassification::Kind::CrossUp: return "cross_up";
    case EventClassification::Kind::CrossDown: return "cross_down";
    case EventClassification::Kind::Slide: return "slide";
    case EventClassification::Kind::Leave: return "leave";
  }
  return "?";
}

EventClassification classify_event(const Positions& x, const Manifold& m, const InteractionGraph& base,
                                   const InteractionKernel& kernel) {
  const auto [gm, gp] = side_graphs(base, m);
  const Velocities fm = graph_field(kernel, gm, x);
  const Velocities fp = graph_field(kernel, gp, x);
  EventClassification c;
  const double a = c.rate_minus = switching_rate(x, m, fm);
  const double b = c.rate_plus = switching_rate(x, m, fp);
  using K = EventClassification::Kind;
  if (a == 0.0 && b == 0.0) {
    c.kind = K::Slide;
  } else if (b <= 0.0 && a >= 0.0) {
    c.kind = K::Slide;
  } else if (b > 0.0 && a <= 0.0) {
    c.kind = K::Leave;
  } else if (a > 0.0 && b > 0.0) {
    c.kind = K::CrossUp;
  } else {
    c.kind = K::CrossDown;
  }
  if (c.kind == K::Slide || c.kind == K::Leave) {
    c.sliding_admissible = true;
    c.alpha = sliding_coefficient(x, m, fm, fp);
  }
  return c;
}

EventClassification classify_event(const Positions& x, const Manifold& m, const ModelSpec& spec,
                                   const InteractionKernel& kernel) {
  return classify_event(x, m, pointwise_graph(spec, x), kernel);
}

// ---------------------------------------------------------------------------

BranchChoice BranchChoice::parse(std::string_view text) {
  std::string s(text);
  if (s == "cross_minus" || s == "cross-minus") return {Kind::CrossMinus, 0.0};
  if (s == "cross_plus" || s == "cross-plus") return {Kind::CrossPlus, 0.0};
  if (s == "slide" || s == "slide-forever") return {Kind::Slide, kInf};
  if (s.rfind("slide@", 0) == 0) return {Kind::Slide, parse_time(s.substr(6))};
  throw ConfigError("unknown branch choice '" + s + "' (cross_minus, cross_plus, slide, slide@T)");
}

std::string BranchChoice::to_string() const {
  switch (kind) {
    case Kind::CrossMinus: return "cross_minus";
    case Kind::CrossPlus: return "cross_plus";
    case Kind::Slide: return std::isinf(exit_time) ? "slide" : "slide@" + format_time(exit_time);
  }
  return "?";
}

BranchPolicy BranchPolicy::parse(std::string_view text) {
  BranchPolicy p;
  std::string s(text);
  if (s.empty() || s == "default") return p;
  if (s.rfind("enumerate", 0) == 0) {
    p.mode = Mode::Enumerate;
    if (s.size() > 9) {
      if (s[9] != ':') throw ConfigError("policy must look like 'enumerate:T1,T2'");
      for (const auto& part : split_list(s.substr(10))) {
        const double t = parse_time(part);
        if (!std::isinf(t)) p.exit_times.push_back(t);
      }
    }
    return p;
  }
  if (s.rfind("fixed:", 0) == 0) s = s.substr(6);
  for (const auto& part : split_list(s)) p.choices.push_back(BranchChoice::parse(part));
  return p;
}

std::string BranchPolicy::to_string() const {
  std::string out;
  if (mode == Mode::Enumerate) {
    out = "enumerate";
    for (std::size_t k = 0; k < exit_times.size(); ++k) out += (k ? "," : ":") + format_time(exit_times[k]);
    return out;
  }
  if (choices.empty()) return "default";
  out = "fixed:";
  for (std::size_t k = 0; k < choices.size(); ++k) out += (k ? "," : "") + choices[k].to_string();
  return out;
}

void BranchPolicy::validate() const {
  if (max_branches < 1 || max_depth < 0) throw ConfigError("branch limits must be positive");
  for (double t : exit_times)
    if (!(t >= 0.0)) throw ConfigError("slide exit times must be nonnegative");
}

// ---------------------------------------------------------------------------

namespace {

struct Branch {
  PiecewiseTrajectory traj;
  double t = 0.0;
  Positions x;
  bool sliding = false;
  InteractionGraph graph;  // frozen graph, or the plus graph while sliding
  InteractionGraph minus;  // minus graph while sliding
  Manifold manifold;
  double slide_exit = kInf;
  std::size_t next_choice = 0;
  int depth = 0;
  int events = 0;
  std::vector<std::string> label_parts;
};

class KrasovskyRunner {
 public:
  KrasovskyRunner(const ModelSpec& spec, const InteractionKernel& kernel, const BranchPolicy& policy,
                  const StepControl& ctrl, double t_end, const KrasovskyOptions& opt)
      : spec_(spec), kernel_(kernel), policy_(policy), ctrl_(ctrl), t_end_(t_end), opt_(opt) {}

  std::vector<PiecewiseTrajectory> run(const Configuration& x0) {
    Branch root;
    root.t = x0.t();
    root.x = x0.x();
    root.traj.path.samples.push_back({root.t, root.x});
    root.traj.best_effort = spec_.is_topological() && spec_.kappa > 1;
    ++spawned_;
    start(root);
    queue_.push_front(std::move(root));

    std::vector<PiecewiseTrajectory> done;
    while (!queue_.empty()) {
      Branch b = std::move(queue_.front());
      queue_.pop_front();
      advance(b);
      b.traj.label = b.label_parts.empty() ? "default" : "";
      for (std::size_t k = 0; k < b.label_parts.size(); ++k) b.traj.label += (k ? "/" : "") + b.label_parts[k];
      done.push_back(std::move(b.traj));
    }
    std::sort(done.begin(), done.end(), [](const auto& a, const auto& b) { return a.branch_id < b.branch_id; });
    return done;
  }

 private:
  // Default side when a repulsive manifold leaves the choice open: the metric
  // edge stays off, the topological agent keeps its pointwise neighbor.
  BranchChoice default_cross() const {
    return {spec_.is_metric() ? BranchChoice::Kind::CrossPlus : BranchChoice::Kind::CrossMinus, 0.0};
  }

  void mark(Branch& b, const std::string& what) { b.traj.path.events.push_back({b.t, what}); }

  void apply(Branch& b, const Manifold& m, const InteractionGraph& base, const BranchChoice& c) {
    auto [gm, gp] = side_graphs(base, m);
    switch (c.kind) {
      case BranchChoice::Kind::CrossMinus:
        b.sliding = false;
        b.graph = std::move(gm);
        break;
      case BranchChoice::Kind::CrossPlus:
        b.sliding = false;
        b.graph = std::move(gp);
        break;
      case BranchChoice::Kind::Slide:
        b.sliding = true;
        b.minus = std::move(gm);
        b.graph = std::move(gp);
        b.manifold = m;
        b.slide_exit = std::isinf(c.exit_time) ? kInf : b.t + c.exit_time;
        project(b.x, m, spec_.radius);
        b.traj.path.samples.back().x = b.x;
        break;
    }
  }

  // Resolves a decision, spawning sibling branches when enumerating.
  void decide(Branch& b, const Manifold& m, const InteractionGraph& base, const std::vector<BranchChoice>& options,
              std::size_t default_idx) {
    if (options.size() == 1) {
      apply(b, m, base, options.front());
      return;
    }
    auto record = [&](Branch& br, const BranchChoice& c) {
      const ForkEvent ev{br.t, m, c.to_string()};
      br.traj.decisions.push_back(ev);
      br.label_parts.push_back(c.to_string());
      mark(br, m.to_string() + ":" + c.to_string());
    };
    if (policy_.mode == BranchPolicy::Mode::Fixed) {
      BranchChoice c = options[default_idx];
      if (b.next_choice < policy_.choices.size()) {
        c = policy_.choices[b.next_choice++];
        const bool ok = std::any_of(options.begin(), options.end(), [&](const auto& o) { return o.kind == c.kind; });
        if (!ok)
          throw ConfigError("branch choice '" + c.to_string() + "' is not admissible at " + m.to_string() +
                            ", t=" + format_time(b.t));
      }
      record(b, c);
      apply(b, m, base, c);
      return;
    }
    if (b.depth >= policy_.max_depth) {
      record(b, options[default_idx]);
      apply(b, m, base, options[default_idx]);
      return;
    }
    for (std::size_t k = 0; k < options.size(); ++k) {
      if (k == default_idx) continue;
      if (spawned_ >= policy_.max_branches)
        throw BranchOverflowError("branch budget of " + std::to_string(policy_.max_branches) + " exceeded at " +
                                  m.to_string() + ", t=" + format_time(b.t));
      Branch child = b;
      child.traj.branch_id = spawned_++;
      child.traj.parent = b.traj.branch_id;
      child.traj.fork = ForkEvent{b.t, m, options[k].to_string()};
      child.depth = b.depth + 1;
      record(child, options[k]);
      apply(child, m, base, options[k]);
      queue_.push_back(std::move(child));
    }
    ++b.depth;
    record(b, options[default_idx]);
    apply(b, m, base, options[default_idx]);
  }

  std::vector<BranchChoice> leave_options(bool offer_slide) const {
    std::vector<BranchChoice> o{{BranchChoice::Kind::CrossMinus, 0.0}, {BranchChoice::Kind::CrossPlus, 0.0}};
    if (offer_slide) {
      o.push_back({BranchChoice::Kind::Slide, kInf});
      if (policy_.mode == BranchPolicy::Mode::Enumerate)
        for (double t : policy_.exit_times) o.push_back({BranchChoice::Kind::Slide, t});
    }
    return o;
  }

  std::size_t default_index() const { return spec_.is_metric() ? 1 : 0; }

  // Continuation at a manifold reached by (or starting on) the trajectory.
  void resolve(Branch& b, const Manifold& m, const InteractionGraph& base, bool offer_slide) {
    const auto cls = classify_event(b.x, m, base, kernel_);
    using K = EventClassification::Kind;
    switch (cls.kind) {
      case K::CrossUp:
        apply(b, m, base, {BranchChoice::Kind::CrossPlus, 0.0});
        break;
      case K::CrossDown:
        apply(b, m, base, {BranchChoice::Kind::CrossMinus, 0.0});
        break;
      case K::Slide:
        mark(b, m.to_string() + ":slide");
        apply(b, m, base, {BranchChoice::Kind::Slide, kInf});
        break;
      case K::Leave:
        decide(b, m, base, leave_options(offer_slide), default_index());
        break;
    }
  }

  void start(Branch& b) {
    const auto active = active_manifolds(b.x, spec_, active_tol(spec_, b.x, opt_.tie_tol), opt_.coincide_tol);
    const InteractionGraph base = pointwise_graph(spec_, b.x);
    if (active.empty()) {
      b.graph = base;
    } else if (active.size() == 1) {
      resolve(b, active.front(), base, true);
    } else {
      b.graph = caratheodory_start_options(b.x, spec_, kernel_, opt_.tie_tol, opt_.coincide_tol).front().graph;
    }
  }

  void count_event(Branch& b) {
    if (++b.events > ctrl_.max_events)
      throw RunawayEventsError("more than " + std::to_string(ctrl_.max_events) + " events on branch " +
                               std::to_string(b.traj.branch_id));
  }

  void advance(Branch& b) {
    detail::StepBudget budget{0, ctrl_.max_steps, ctrl_.sample_stride};
    while (!detail::reached(b.t, t_end_)) {
      if (b.sliding)
        slide(b, budget);
      else
        frozen(b, budget);
    }
  }

  void frozen(Branch& b, detail::StepBudget& budget) {
    const InteractionGraph graph = b.graph;
    const auto constraints = graph_constraints(spec_, graph);
    const double scale = length_scale(b.x);
    const double co = opt_.coincide_tol * scale;
    const double eps_abs = 1e-12 * scale * scale;
    Eigen::VectorXd thr(static_cast<Eigen::Index>(constraints.size()));
    for (std::size_t c = 0; c < constraints.size(); ++c)
      thr(static_cast<Eigen::Index>(c)) =
          std::min(0.0, constraint_margin(b.x, constraints[c], spec_.radius, co)) - eps_abs;
    auto monitors = [&](const Positions& y) {
      Eigen::VectorXd m(thr.size());
      for (std::size_t c = 0; c < constraints.size(); ++c)
        m(static_cast<Eigen::Index>(c)) =
            constraint_margin(y, constraints[c], spec_.radius, co) - thr(static_cast<Eigen::Index>(c));
      return m;
    };
    Segment seg{b.t, b.t, graph, Segment::Mode::Frozen, std::nullopt, 0.0};
    detail::SegmentOutcome res;
    if (graph_field(kernel_, graph, b.x).isZero(0.0)) {
      b.traj.path.samples.push_back({t_end_, b.x});
      res = {t_end_, b.x, -1};
    } else {
      auto step = [&](const Positions& y, double dt) {
        return rk4_step([&](const Positions& z) { return graph_field(kernel_, graph, z); }, y, dt);
      };
      res = detail::run_segment(step, monitors, b.t, b.x, t_end_, ctrl_, b.traj.path, budget);
    }
    seg.t1 = res.t;
    b.traj.segments.push_back(std::move(seg));
    b.t = res.t;
    b.x = std::move(res.x);
    if (res.fired < 0) return;
    count_event(b);
    const Constraint& hit = constraints[idx(res.fired)];
    mark(b, hit.manifold.to_string());
    const auto cls = classify_event(b.x, hit.manifold, graph, kernel_);
    if (cls.kind == EventClassification::Kind::Slide) {
      mark(b, hit.manifold.to_string() + ":slide");
      apply(b, hit.manifold, graph, {BranchChoice::Kind::Slide, kInf});
    } else {
      // Arriving from one side, the trajectory passes to the other one.
      const bool from_minus = hit.sign < 0.0;
      apply(b, hit.manifold, graph,
            {from_minus ? BranchChoice::Kind::CrossPlus : BranchChoice::Kind::CrossMinus, 0.0});
    }
  }

  void slide(Branch& b, detail::StepBudget& budget) {
    const Manifold m = b.manifold;
    const InteractionGraph gm = b.minus;
    const InteractionGraph gp = b.graph;
    const double radius = spec_.radius;

    auto rates = [&](const Positions& y, Velocities& fm, Velocities& fp) {
      fm = graph_field(kernel_, gm, y);
      fp = graph_field(kernel_, gp, y);
      return std::pair{switching_rate(y, m, fm), switching_rate(y, m, fp)};
    };
    auto rhs = [&](const Positions& y) -> Velocities {
      Velocities fm, fp;
      const auto [a, bb] = rates(y, fm, fp);
      const double alpha = blend_alpha(a, bb);
      return alpha * fm + (1.0 - alpha) * fp;
    };

    // Other constraints of both side graphs stay monitored while sliding.
    std::vector<Constraint> others;
    for (const auto* g : {&gm, &gp})
      for (const auto& c : graph_constraints(spec_, *g)) {
        if (same_manifold(c.manifold, m)) continue;
        const bool dup = std::any_of(others.begin(), others.end(), [&](const Constraint& o) {
          return o.manifold == c.manifold && o.sign == c.sign;
        });
        if (!dup) others.push_back(c);
      }
    const double scale = length_scale(b.x);
    const double co = opt_.coincide_tol * scale;
    const double eps_abs = 1e-12 * scale * scale;
    Eigen::VectorXd thr(static_cast<Eigen::Index>(others.size()));
    for (std::size_t c = 0; c < others.size(); ++c)
      thr(static_cast<Eigen::Index>(c)) = std::min(0.0, constraint_margin(b.x, others[c], radius, co)) - eps_abs;
    const double slack = opt_.alpha_slack;
    auto monitors = [&](const Positions& y) {
      Eigen::VectorXd v(thr.size() + 2);
      Velocities fm, fp;
      const auto [a, bb] = rates(y, fm, fp);
      const double alpha = blend_alpha(a, bb);
      v(0) = alpha + slack;
      v(1) = 1.0 - alpha + slack;
      for (std::size_t c = 0; c < others.size(); ++c)
        v(static_cast<Eigen::Index>(c) + 2) =
            constraint_margin(y, others[c], radius, co) - thr(static_cast<Eigen::Index>(c));
      return v;
    };

    Velocities fm0, fp0;
    const auto [a0, b0] = rates(b.x, fm0, fp0);
    Segment seg{b.t, b.t, gp, Segment::Mode::Sliding, m, blend_alpha(a0, b0)};
    const double seg_end = std::min(t_end_, b.slide_exit);
    detail::SegmentOutcome res;
    if (rhs(b.x).isZero(0.0)) {
      b.traj.path.samples.push_back({seg_end, b.x});
      res = {seg_end, b.x, -1};
    } else {
      auto step = [&](const Positions& y, double dt) {
        Positions next = rk4_step(rhs, y, dt);
        project(next, m, radius);
        return next;
      };
      res = detail::run_segment(step, monitors, b.t, b.x, seg_end, ctrl_, b.traj.path, budget);
    }
    seg.t1 = res.t;
    b.traj.segments.push_back(std::move(seg));
    b.t = res.t;
    b.x = std::move(res.x);

    if (res.fired >= 2) {
      const Manifold& other = others[idx(res.fired - 2)].manifold;
      throw UnsupportedSlidingError("sliding on " + m.to_string() + " reached " + other.to_string() +
                                    " at t=" + format_time(b.t) + "; joint sliding is not supported");
    }
    if (res.fired >= 0) {
      // α left [0, 1]: the manifold has become transversal.
      count_event(b);
      mark(b, m.to_string() + ":exit");
      const auto cls = classify_event(b.x, m, gp, kernel_);
      BranchChoice c = default_cross();
      if (cls.kind == EventClassification::Kind::CrossUp) c = {BranchChoice::Kind::CrossPlus, 0.0};
      if (cls.kind == EventClassification::Kind::CrossDown) c = {BranchChoice::Kind::CrossMinus, 0.0};
      apply(b, m, gp, c);
      return;
    }
    if (detail::reached(b.t, t_end_)) return;
    // Scheduled exit from the slide.
    count_event(b);
    b.slide_exit = kInf;
    const auto cls = classify_event(b.x, m, gp, kernel_);
    if (cls.kind == EventClassification::Kind::Slide) return;  // attracting: no way off
    resolve(b, m, gp, false);
  }

  const ModelSpec& spec_;
  const InteractionKernel& kernel_;
  const BranchPolicy& policy_;
  const StepControl& ctrl_;
  double t_end_;
  KrasovskyOptions opt_;
  std::deque<Branch> queue_;
  int spawned_ = 0;
};

}  // namespace

std::vector<PiecewiseTrajectory> simulate_krasovsky(const Configuration& x0, const ModelSpec& spec,
                                                    const InteractionKernel& kernel, const BranchPolicy& policy,
                                                    const StepControl& ctrl, double horizon,
                                                    const KrasovskyOptions& options) {
  ctrl.validate();
  policy.validate();
  spec.validate(x0.agents());
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw PreconditionError("horizon must be positive and finite");
  KrasovskyRunner runner(spec, kernel, policy, ctrl, x0.t() + horizon, options);
  return runner.run(x0);
}

CertificateReport krasovsky_certificate(const Trajectory& traj, const ModelSpec& spec,
                                        const InteractionKernel& kernel, double tol_hull, double tol_active,
                                        int n_samples) {
  if (!(tol_hull > 0.0)) throw PreconditionError("hull tolerance must be positive");
  std::vector<std::size_t> usable;
  std::vector<Velocities> derivs;
  for (std::size_t k = 0; k < traj.samples.size(); ++k)
    if (auto d = finite_difference(traj, k)) {
      usable.push_back(k);
      derivs.push_back(std::move(*d));
    }
  CertificateReport rep;
  if (usable.empty()) return rep;
  const std::size_t want = static_cast<std::size_t>(std::max(1, n_samples));
  const std::size_t stride = std::max<std::size_t>(1, usable.size() / want);
  for (std::size_t u = 0; u < usable.size(); u += stride) {
    const auto& s = traj.samples[usable[u]];
    const auto set = limit_field_vertices(s.x, spec, kernel, active_tol(spec, s.x, tol_active));
    std::vector<Eigen::VectorXd> pts;
    for (const auto& v : set.vertices) pts.push_back(flatten(v));
    const auto hm = hull_membership(pts, flatten(derivs[u]), tol_hull);
    ++rep.checked;
    if (!hm.inside) ++rep.violations;
    if (hm.distance > rep.max_distance) {
      rep.max_distance = hm.distance;
      rep.worst_t = s.t;
    }
  }
  return rep;
}

SlideExitTargets slide_exit_targets(const Configuration& x0, double exit_time) {
  if (x0.agents() != 3 || x0.dim() != 1)
    throw UnsupportedError("slide exit targets are only known for three agents on a line");
  const double x1 = x0.x()(0, 0);
  const double x2 = x0.x()(1, 0);
  const double x3 = x0.x()(2, 0);
  const double d0 = x2 - x1;
  if (!(d0 > 0.0 && d0 < 1.0) || std::abs(x3 - x2 - 1.0) > 1e-12 * (1.0 + std::abs(x3)))
    throw UnsupportedError("slide exit targets need x = (x1, x2, x2 + 1) with 0 < x2 - x1 < 1");
  if (!(exit_time >= 0.0)) throw PreconditionError("exit time must be nonnegative");
  // On the slide d = x2 - x1 obeys d' = -3d/2 and x3' = -d/2.
  const double decay = std::isinf(exit_time) ? 0.0 : std::exp(-1.5 * exit_time);
  SlideExitTargets out;
  out.x3_at_exit = x3 - d0 / 3.0 * (1.0 - decay);
  const double mean = (x1 + x2 + x3) / 3.0;
  const double xs = (3.0 * mean - out.x3_at_exit) / 2.0;
  out.stop_interacting_limit = Positions(3, 1);
  out.stop_interacting_limit << xs, xs, out.x3_at_exit;
  out.interacting_limit = Positions::Constant(3, 1, mean);
  return out;
}

}  // namespace bcdyn
