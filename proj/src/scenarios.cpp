#include "bcdyn/scenarios.hpp"

#include "bcdyn/errors.hpp"
#include "bcdyn/krasovsky.hpp"

#include <cmath>

namespace bcdyn {

std::string to_string(SolutionKind s) { return s == SolutionKind::Caratheodory ? "caratheodory" : "krasovsky"; }

SolutionKind parse_solution(const std::string& text) {
  if (text == "caratheodory" || text == "carath") return SolutionKind::Caratheodory;
  if (text == "krasovsky" || text == "kras") return SolutionKind::Krasovsky;
  throw ConfigError("unknown solution '" + text + "' (expected caratheodory or krasovsky)");
}

const PresetBranch& ScenarioPreset::branch(const std::string& key) const {
  if (key.empty()) return branches.front();
  for (const auto& b : branches)
    if (b.name == key) return b;
  if (key.find_first_not_of("0123456789") == std::string::npos) {
    const auto k = std::stoul(key);
    if (k < branches.size()) return branches[k];
  }
  std::string names;
  for (const auto& b : branches) names += (names.empty() ? "" : ", ") + b.name;
  throw ConfigError("scenario '" + name + "' has no branch '" + key + "' (available: " + names + ")");
}

namespace {

Positions line(const std::vector<double>& v) { return Configuration::on_line(v).x(); }
Positions rows(const std::vector<std::vector<double>>& r) { return Configuration::from_rows(r).x(); }

PresetBranch carath(std::string name, int start, Expectation e) {
  return {std::move(name), SolutionKind::Caratheodory, start, "", std::move(e)};
}
PresetBranch kras(std::string name, std::string policy, Expectation e) {
  return {std::move(name), SolutionKind::Krasovsky, 0, std::move(policy), std::move(e)};
}

ScenarioPreset preset(std::string name, std::string title, const ModelSpec& spec) {
  ScenarioPreset p;
  p.name = std::move(name);
  p.title = std::move(title);
  p.spec = spec;
  return p;
}

Expectation limit(Positions x, std::string origin, std::optional<bool> cluster = std::nullopt) {
  Expectation e;
  e.terminal = std::move(x);
  e.origin = std::move(origin);
  e.cluster_point = cluster;
  return e;
}

std::vector<ScenarioPreset> build() {
  std::vector<ScenarioPreset> out;
  const auto metric = ModelSpec::metric(1.0);
  const auto topo1 = ModelSpec::topological(1);
  const auto topo2 = ModelSpec::topological(2);

  {
    auto p = preset("ex-nonexist-classical-metric", "Non-existence of classical solutions, metric", metric);
    p.initial = Configuration::on_line({-2.0 / 3.0, 0.0, 2.0 / 3.0});
    p.horizon = 30.0;
    auto e = limit(line({0, 0, 0}), "computed", true);
    e.note = "classical solution reaches (-1/2, 0, 1/2) in finite time; afterwards all agents interact";
    p.branches = {carath("caratheodory", 0, e), kras("krasovsky", "default", e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-nonexist-classical-topological", "Non-existence of classical solutions, topological",
                     topo1);
    const double eps = 0.25;
    p.initial = Configuration::from_rows({{-1, 0}, {0, 0}, {1, 0}, {1 - eps, std::sqrt(1 - eps * eps)}});
    p.horizon = 30.0;
    p.check_pseudoforest = true;
    Expectation e;
    e.cluster_point = true;
    e.origin = "reference";
    e.note = "epsilon = 1/4; agent 3 switches from agent 2 to agent 4 immediately";
    p.branches = {carath("caratheodory", 0, e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-clusters-at-distance-1", "Clusters at distance 1", metric);
    p.initial = Configuration::from_rows({{0, 0}, {1, 1.0 / 3.0}, {1, -1.0 / 3.0}});
    p.horizon = 20.0;
    auto e = limit(rows({{0, 0}, {1, 0}, {1, 0}}), "reference", true);
    p.branches = {carath("caratheodory", 0, e), kras("krasovsky", "default", e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-metric-inclusions", "Proper inclusions between solution sets, metric", metric);
    p.initial = Configuration::on_line({-1.0 / 3.0, 0.0, 1.0});
    p.horizon = 30.0;
    auto exit = limit(slide_exit_targets(p.initial, 1.0).stop_interacting_limit, "computed", true);
    exit.note = "slide on |x3 - x2| = 1 for one time unit, then leave on the non-interacting side";
    p.branches = {
        carath("classical", 0, limit(line({-1.0 / 6, -1.0 / 6, 1}), "reference", true)),
        carath("alternate", 1, limit(line({2.0 / 9, 2.0 / 9, 2.0 / 9}), "reference", true)),
        kras("sliding", "slide", limit(line({-1.0 / 9, -1.0 / 9, 8.0 / 9}), "reference", true)),
        kras("slide-exit", "slide@1,cross_plus", exit),
    };
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-topological-inclusions", "Proper inclusions between solution sets, topological", topo1);
    p.initial = Configuration::on_line({0.0, -1.0, 1.0});
    p.horizon = 30.0;
    p.check_pseudoforest = true;
    p.branches = {
        carath("classical", 0, limit(line({-0.5, -0.5, -0.5}), "reference", true)),
        carath("alternate", 1, limit(line({0.5, 0.5, 0.5}), "reference", true)),
        kras("sliding", "slide", limit(line({0, 0, 0}), "reference", true)),
    };
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-merging-components", "Merging components in Caratheodory solutions", topo1);
    p.initial = Configuration::on_line({-1, 0, 1, 1});
    p.horizon = 30.0;
    p.check_pseudoforest = true;
    auto merge = limit(line({1, 1, 1, 1}), "reference", true);
    merge.note = "x(t) = (1 - t e^-t - 2 e^-t, 1 - e^-t, 1, 1)";
    p.branches = {carath("classical", 0, limit(line({-0.5, -0.5, 1, 1}), "computed", true)),
                  carath("merging", 1, merge)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-nonconvergence-k2", "Non-convergence to clusters, topological kappa >= 2", topo2);
    p.initial = Configuration::on_line({0.5, 0, 1, 0, 0, 1, 1});
    p.horizon = 5.0;
    auto e = limit(p.initial.x(), "reference", false);
    e.caratheodory_equilibrium = true;
    p.branches = {carath("caratheodory", 0, e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-krasovsky-eq-not-cluster", "Non-convergence of Krasovsky to clusters, kappa = 1", topo1);
    p.initial = Configuration::on_line({-1, 1, 0, 1, -1});
    p.horizon = 30.0;
    auto e = limit(p.initial.x(), "reference", false);
    e.krasovsky_equilibrium = true;
    e.caratheodory_equilibrium = false;
    Expectation c;
    c.cluster_point = true;
    c.caratheodory_equilibrium = false;
    c.origin = "reference";
    c.note = "Caratheodory solutions with kappa = 1 still converge to cluster points";
    p.branches = {kras("sliding", "slide", e), carath("caratheodory", 0, c)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-w-increasing-k2", "W increasing along a kappa = 2 solution", topo2);
    p.initial = Configuration::on_line({-9, -9, -9, -2, 2, 9, 9, 9});
    p.horizon = 8.0;
    auto e = limit(line({-9, -9, -9, -3, 3, 9, 9, 9}), "reference", false);
    e.lyapunov_monotone = false;
    e.note = "x5(t) = 3 - e^{-3t} = -x4(t)";
    p.branches = {carath("caratheodory", 0, e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-w-increasing-krasovsky", "W increasing along a kappa = 1 Krasovsky solution", topo1);
    const double y0 = 0.05;
    p.initial = Configuration::on_line({-1 - y0, -1 + y0, 0, 1 - y0, 1 + y0});
    p.horizon = 5.0;
    auto e = limit(line({-1, -1, 0, 1, 1}), "computed");
    e.lyapunov_monotone = false;
    e.note = "y0 = 1/20, y(t) = e^{-2t} y0; agent 3 slides between agents 2 and 4";
    p.branches = {kras("sliding", "slide", e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-pseudoforest-line", "Weakly connected component, N = 6 on the line", topo1);
    p.initial = Configuration::on_line({0, 10, 19, 27, 28, 30});
    p.horizon = 30.0;
    p.check_pseudoforest = true;
    Expectation e;
    e.cluster_point = true;
    e.origin = "reference";
    p.branches = {carath("caratheodory", 0, e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-pseudoforest-plane", "Weakly connected component, N = 8 in the plane", topo1);
    p.initial = Configuration::from_rows({{0, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.5, 0}, {1, 0}, {1, 1}, {1, -1}});
    p.horizon = 30.0;
    p.check_pseudoforest = true;
    Expectation e;
    e.cluster_point = true;
    e.origin = "reference";
    p.branches = {carath("caratheodory", 0, e)};
    out.push_back(std::move(p));
  }
  {
    auto p = preset("ex-consensus-pair", "Two interacting agents meet at the midpoint", metric);
    p.initial = Configuration::on_line({0.0, 0.5});
    p.horizon = 10.0;
    auto e = limit(line({0.25, 0.25}), "elementary", true);
    p.branches = {carath("caratheodory", 0, e), kras("krasovsky", "default", e)};
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

const std::vector<ScenarioPreset>& scenario_presets() {
  static const std::vector<ScenarioPreset> presets = build();
  return presets;
}

const ScenarioPreset& find_scenario(const std::string& name) {
  for (const auto& p : scenario_presets())
    if (p.name == name) return p;
  throw ConfigError("unknown scenario '" + name + "' (see 'bc-dyn list')");
}

}  // namespace bcdyn
