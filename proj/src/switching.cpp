#include "bcdyn/switching.hpp"

#include "bcdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace bcdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxResolutions = std::size_t{1} << 20;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

void add_edge(std::vector<int>& out, int j) {
  if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
}

void remove_edge(std::vector<int>& out, int j) { out.erase(std::remove(out.begin(), out.end(), j), out.end()); }

// Groups the given agents into classes of (numerically) coincident positions.
// Classes keep ascending member order and are ordered by their lowest member.
std::vector<std::vector<int>> coincidence_classes(const Positions& x, const std::vector<int>& members,
                                                  double coincide_abs) {
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::vector<int>> classes;
  for (int m : sorted) {
    bool placed = false;
    for (auto& cls : classes) {
      if ((x.row(m) - x.row(cls.front())).norm() <= coincide_abs) {
        cls.push_back(m);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({m});
  }
  return classes;
}

struct TieGroup {
  std::vector<int> closer;                    // strictly inside the κ-th ring
  std::vector<std::vector<int>> classes;      // tied candidates grouped by position
  int need = 0;                               // how many of the tied candidates get picked
};

// Tied candidates of agent i at its κ-th-nearest boundary; empty classes when
// the neighbor set is determined without ambiguity.
TieGroup tie_group(const Positions& x, int i, int kappa, double tol_sq, double coincide_abs) {
  TieGroup g;
  auto ranked = ranked_others(x, i);
  const double dk = squared_distance(x, i, ranked[idx(kappa - 1)]);
  std::vector<int> tied;
  for (int m : ranked) {
    const double d2 = squared_distance(x, i, m);
    if (d2 < dk - tol_sq)
      g.closer.push_back(m);
    else if (std::abs(d2 - dk) <= tol_sq)
      tied.push_back(m);
  }
  g.need = kappa - static_cast<int>(g.closer.size());
  if (static_cast<int>(tied.size()) <= g.need) {
    // Everything tied is taken: no choice.
    g.closer.insert(g.closer.end(), tied.begin(), tied.end());
    g.need = 0;
    return g;
  }
  g.classes = coincidence_classes(x, tied, coincide_abs);
  if (g.classes.size() == 1) {
    // All tied candidates share a position; the choice does not matter.
    for (int k = 0; k < g.need; ++k) g.closer.push_back(g.classes.front()[idx(k)]);
    g.classes.clear();
    g.need = 0;
  }
  return g;
}

// Enumerates count vectors n_c in [0, |class_c|] with sum = need.
void enumerate_counts(const std::vector<std::vector<int>>& classes, int need, std::size_t c, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (c == classes.size()) {
    if (need == 0) out.push_back(cur);
    return;
  }
  const int cap = std::min<int>(need, static_cast<int>(classes[c].size()));
  for (int n = 0; n <= cap; ++n) {
    cur[c] = n;
    enumerate_counts(classes, need - n, c + 1, cur, out);
  }
  cur[c] = 0;
}

}  // namespace

std::string Manifold::to_string() const {
  std::ostringstream os;
  if (is_pair())
    os << "pair(" << i << "," << j << ")";
  else
    os << "triple(" << i << "," << j << "," << k << ")";
  return os.str();
}

double switching_value(const Positions& x, const Manifold& m, double radius) {
  if (m.is_pair()) return squared_distance(x, m.i, m.j) - radius * radius;
  return squared_distance(x, m.i, m.j) - squared_distance(x, m.i, m.k);
}

Positions switching_gradient(const Positions& x, const Manifold& m) {
  Positions g = Positions::Zero(x.rows(), x.cols());
  if (m.is_pair()) {
    g.row(m.i) = 2.0 * (x.row(m.i) - x.row(m.j));
    g.row(m.j) = 2.0 * (x.row(m.j) - x.row(m.i));
  } else {
    g.row(m.i) = 2.0 * (x.row(m.k) - x.row(m.j));
    g.row(m.j) = 2.0 * (x.row(m.j) - x.row(m.i));
    g.row(m.k) = -2.0 * (x.row(m.k) - x.row(m.i));
  }
  return g;
}

double switching_rate(const Positions& x, const Manifold& m, const Velocities& v) {
  if (m.is_pair()) return 2.0 * (x.row(m.i) - x.row(m.j)).dot(v.row(m.i) - v.row(m.j));
  return 2.0 * (x.row(m.j) - x.row(m.i)).dot(v.row(m.j) - v.row(m.i)) -
         2.0 * (x.row(m.k) - x.row(m.i)).dot(v.row(m.k) - v.row(m.i));
}

std::pair<InteractionGraph, InteractionGraph> side_graphs(const InteractionGraph& base, const Manifold& m) {
  InteractionGraph minus = base;
  InteractionGraph plus = base;
  if (m.is_pair()) {
    add_edge(minus.out[idx(m.i)], m.j);
    add_edge(minus.out[idx(m.j)], m.i);
    remove_edge(plus.out[idx(m.i)], m.j);
    remove_edge(plus.out[idx(m.j)], m.i);
  } else {
    auto& mo = minus.out[idx(m.i)];
    remove_edge(mo, m.k);
    add_edge(mo, m.j);
    auto& po = plus.out[idx(m.i)];
    remove_edge(po, m.j);
    add_edge(po, m.k);
  }
  minus.normalize();
  plus.normalize();
  return {std::move(minus), std::move(plus)};
}

double length_scale(const Positions& x) { return 1.0 + diameter(x); }

double coincide_threshold(const Positions& x, double rel_tol) { return rel_tol * length_scale(x); }

std::vector<Constraint> graph_constraints(const ModelSpec& spec, const InteractionGraph& graph) {
  std::vector<Constraint> cs;
  const int n = graph.size();
  if (spec.is_metric()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) cs.push_back({Manifold::pair(i, j), graph.has_edge(i, j) ? -1.0 : 1.0});
    return cs;
  }
  for (int i = 0; i < n; ++i) {
    const auto& out = graph.out[idx(i)];
    for (int j : out)
      for (int k = 0; k < n; ++k)
        if (k != i && std::find(out.begin(), out.end(), k) == out.end())
          cs.push_back({Manifold::triple(i, j, k), -1.0});
  }
  return cs;
}

double constraint_margin(const Positions& x, const Constraint& c, double radius, double coincide_abs) {
  const auto& m = c.manifold;
  if (!m.is_pair() && (x.row(m.j) - x.row(m.k)).norm() <= coincide_abs) return kInf;
  return c.sign * switching_value(x, m, radius);
}

std::vector<Manifold> active_manifolds(const Positions& x, const ModelSpec& spec, double tol, double coincide_rel) {
  if (!(tol > 0.0)) throw PreconditionError("active manifold tolerance must be positive");
  const int n = static_cast<int>(x.rows());
  spec.validate(n);
  std::vector<Manifold> out;
  if (spec.is_metric()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(distance(x, i, j) - spec.radius) <= tol) out.push_back(Manifold::pair(i, j));
    return out;
  }
  const double scale = length_scale(x);
  const double tol_sq = tol * scale * scale;
  const double co = coincide_rel * scale;
  for (int i = 0; i < n; ++i) {
    TieGroup g = tie_group(x, i, spec.kappa, tol_sq, co);
    if (g.classes.empty()) continue;
    const auto chosen = topological_neighbors(x, i, spec.kappa);
    auto in_chosen = [&](int m) { return std::find(chosen.begin(), chosen.end(), m) != chosen.end(); };
    for (const auto& jc : g.classes) {
      int j = -1;
      for (int m : jc)
        if (in_chosen(m)) j = m;
      if (j < 0) continue;
      for (const auto& kc : g.classes) {
        if (&kc == &jc) continue;
        int k = -1;
        for (int m : kc)
          if (!in_chosen(m)) {
            k = m;
            break;
          }
        if (k >= 0) out.push_back(Manifold::triple(i, j, k));
      }
    }
  }
  return out;
}

std::vector<Resolution> tie_resolutions(const Positions& x, const ModelSpec& spec, double tol, double coincide_rel) {
  if (!(tol > 0.0)) throw PreconditionError("resolution tolerance must be positive");
  const int n = static_cast<int>(x.rows());
  spec.validate(n);
  const InteractionGraph base = pointwise_graph(spec, x);
  std::vector<Resolution> out;

  if (spec.is_metric()) {
    auto pairs = active_manifolds(x, spec, tol, coincide_rel);
    if (pairs.size() >= 20) throw CombinatorialBlowupError("too many boundary pairs to enumerate");
    const std::size_t count = std::size_t{1} << pairs.size();
    for (std::size_t mask = 0; mask < count; ++mask) {
      Resolution r{base, {}};
      std::ostringstream prov;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const bool flip = (mask >> p) & 1U;
        const bool on_now = base.has_edge(pairs[p].i, pairs[p].j);
        const bool on = flip ? !on_now : on_now;
        auto sides = side_graphs(r.graph, pairs[p]);
        r.graph = on ? sides.first : sides.second;
        prov << (p ? " " : "") << pairs[p].to_string() << (on ? ":on" : ":off");
      }
      r.provenance = pairs.empty() ? "pointwise" : prov.str();
      out.push_back(std::move(r));
    }
    return out;
  }

  const double scale = length_scale(x);
  const double tol_sq = tol * scale * scale;
  const double co = coincide_rel * scale;

  struct AgentChoices {
    int agent;
    std::vector<std::vector<int>> sets;  // alternative neighbor sets, pointwise first
    std::vector<std::string> labels;
  };
  std::vector<AgentChoices> choices;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    TieGroup g = tie_group(x, i, spec.kappa, tol_sq, co);
    if (g.classes.empty()) continue;
    const auto& pw = base.out[idx(i)];
    std::vector<int> pw_counts(g.classes.size(), 0);
    for (std::size_t c = 0; c < g.classes.size(); ++c)
      for (int m : g.classes[c])
        if (std::find(pw.begin(), pw.end(), m) != pw.end()) ++pw_counts[c];

    std::vector<std::vector<int>> counts;
    std::vector<int> cur(g.classes.size(), 0);
    enumerate_counts(g.classes, g.need, 0, cur, counts);
    std::stable_partition(counts.begin(), counts.end(), [&](const auto& c) { return c == pw_counts; });

    AgentChoices ac{i, {}, {}};
    for (const auto& cnt : counts) {
      std::vector<int> set = g.closer;
      std::ostringstream label;
      label << "agent " << i << " ->";
      const bool is_pw = cnt == pw_counts;
      for (std::size_t c = 0; c < g.classes.size(); ++c) {
        int taken = 0;
        if (is_pw) {
          for (int m : g.classes[c])
            if (std::find(pw.begin(), pw.end(), m) != pw.end()) {
              set.push_back(m);
              label << " " << m;
              ++taken;
            }
        } else {
          for (int m : g.classes[c]) {
            if (taken == cnt[c]) break;
            set.push_back(m);
            label << " " << m;
            ++taken;
          }
        }
      }
      std::sort(set.begin(), set.end());
      ac.sets.push_back(std::move(set));
      ac.labels.push_back(label.str());
    }
    total *= ac.sets.size();
    if (total > kMaxResolutions) throw CombinatorialBlowupError("more than 2^20 tie resolutions at this configuration");
    choices.push_back(std::move(ac));
  }

  if (choices.empty()) {
    out.push_back({base, "pointwise"});
    return out;
  }
  std::vector<std::size_t> odo(choices.size(), 0);
  while (true) {
    Resolution r{base, {}};
    std::ostringstream prov;
    for (std::size_t a = 0; a < choices.size(); ++a) {
      r.graph.out[idx(choices[a].agent)] = choices[a].sets[odo[a]];
      prov << (a ? "; " : "") << choices[a].labels[odo[a]];
    }
    r.provenance = prov.str();
    out.push_back(std::move(r));
    std::size_t a = 0;
    for (; a < choices.size(); ++a) {
      if (++odo[a] < choices[a].sets.size()) break;
      odo[a] = 0;
    }
    if (a == choices.size()) break;
  }
  return out;
}

double discontinuity_distance(const Positions& x, const ModelSpec& spec, double coincide_rel) {
  const int n = static_cast<int>(x.rows());
  double best = kInf;
  if (spec.is_metric()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) best = std::min(best, std::abs(distance(x, i, j) - spec.radius));
    return best;
  }
  const double co = coincide_threshold(x, coincide_rel);
  const InteractionGraph g = pointwise_graph(spec, x);
  for (int i = 0; i < n; ++i) {
    const auto& out = g.out[idx(i)];
    for (int j : out)
      for (int k = 0; k < n; ++k) {
        if (k == i || std::find(out.begin(), out.end(), k) != out.end()) continue;
        if ((x.row(j) - x.row(k)).norm() <= co) continue;
        best = std::min(best, distance(x, i, k) - distance(x, i, j));
      }
  }
  return best;
}

}  // namespace bcdyn
