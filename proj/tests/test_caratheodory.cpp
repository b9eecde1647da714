#include "bcdyn/caratheodory.hpp"
#include "bcdyn/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace bcdyn;
using testing::line;
using testing::max_abs;

namespace {

const auto one = InteractionKernel::constant(1.0);

GammaGraph from_graph(const InteractionGraph& g) {
  GammaGraph out;
  for (const auto& nb : g.out) {
    out.gamma.push_back(nb.empty() ? -1 : nb.front());
    out.step.push_back(nb.empty() ? 0 : 1);
  }
  return out;
}

Positions merging(double t) {
  const double e = std::exp(-t);
  return line({1 - t * e - 2 * e, 1 - e, 1, 1});
}

}  // namespace

TEST_SUITE("caratheodory") {

TEST_CASE("psi at the worked examples") {
  const auto x = line({0, -1, 1});
  const std::vector<int> g = {-1, 0, 0};
  CHECK(psi(x, one, g, 0, 1) == doctest::Approx(-2.0));
  CHECK(psi(x, one, g, 0, 2) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(psi(x, one, g, 1, 0), PreconditionError);

  const auto y = line({-1, 0, 1, 1});
  const std::vector<int> h = {1, -1, 3, 2};
  CHECK(psi(y, one, h, 1, 2) == doctest::Approx(-1.0));
  CHECK(psi(y, one, h, 1, 0) == doctest::Approx(-2.0));
}

TEST_CASE("gamma graphs at the worked examples") {
  const auto a = build_gamma(line({0, -1, 1}), one);
  CHECK(a.gamma == std::vector<int>{1, 0, 0});
  CHECK(a.step == std::vector<int>{3, 1, 1});
  const auto b = build_gamma(line({-1, 0, 1, 1}), one);
  CHECK(b.gamma == std::vector<int>{1, 0, 3, 2});
  const auto c = build_gamma(line({0, 10}), one);
  CHECK(c.gamma == std::vector<int>{1, 0});
  CHECK(c.total());
  CHECK(c.to_graph().has_edge(0, 1));
}

TEST_CASE("frozen right-hand side") {
  const auto x = line({0, -1, 1});
  CHECK(max_abs(carath_rhs(x, one, build_gamma(x, one)), line({-1, 1, -1})) < 1e-15);
  const auto y = line({-1, 0, 1, 1});
  CHECK(max_abs(carath_rhs(y, one, build_gamma(y, one)), line({1, -1, 0, 0})) < 1e-15);
  const auto z = line({2, 2, 5, 5});
  CHECK(carath_rhs(z, one, build_gamma(z, one)).isZero());
}

TEST_CASE("validity margin") {
  GammaGraph g;
  g.gamma = {1, 0, 0};
  g.step = {3, 1, 1};
  CHECK(validity_margin(line({0, -1, 1}), g) == doctest::Approx(0.0));
  CHECK(validity_margin(line({0, -1, 2}), g) == doctest::Approx(1.0));
  GammaGraph m;
  m.gamma = {1, 2, 3, 2};
  m.step = {1, 3, 2, 2};
  CHECK(validity_margin(merging(1.0), m) > 0.0);
  CHECK(validity_margin(line({0, 3, 1}), g) < 0.0);
}

TEST_CASE("claim C: the construction is total and admissible") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const int agents = 2 + trial % 15;
    const int dim = 1 + trial % 3;
    const auto x = testing::random_positions(rng, agents, dim, 3.0, trial % 2 == 0);
    const auto g = build_gamma(x, one);
    REQUIRE(g.total());
    const auto a = nearest_sets(x);
    for (int i = 0; i < agents; ++i) {
      CHECK(std::find(a[i].begin(), a[i].end(), g.gamma[i]) != a[i].end());
      if (g.step[i] == 2) CHECK(g.gamma[g.gamma[i]] == i);
    }
    ++checked;
  }
  CHECK(checked == 4000);
}

TEST_CASE("start options") {
  const auto x = line({0, -1, 1});
  const auto spec = ModelSpec::topological(1);
  const auto opts = caratheodory_start_options(x, spec, one);
  REQUIRE(opts.size() == 2);
  CHECK(opts[0].graph == build_gamma(x, one).to_graph());
  StepControl ctrl;
  CaratheodoryOptions o;
  o.start_branch = 7;
  CHECK_THROWS_AS(simulate_caratheodory(Configuration(x), spec, one, ctrl, 1.0, o), ConfigError);
  CHECK_THROWS_AS(simulate_caratheodory(Configuration(x), spec, one, ctrl, 0.0), PreconditionError);
}

TEST_CASE("golden terminal states") {
  StepControl ctrl;
  const auto topo = ModelSpec::topological(1);
  auto r = simulate_caratheodory(Configuration::on_line({0, -1, 1}), topo, one, ctrl, 20.0);
  CHECK(max_abs(r.terminal().x, line({-0.5, -0.5, -0.5})) < 1e-3);

  CaratheodoryOptions alt;
  alt.start_branch = 1;
  r = simulate_caratheodory(Configuration::on_line({0, -1, 1}), topo, one, ctrl, 20.0, alt);
  CHECK(max_abs(r.terminal().x, line({0.5, 0.5, 0.5})) < 1e-3);

  r = simulate_caratheodory(Configuration::on_line({-1, 0, 1, 1}), topo, one, ctrl, 20.0, alt);
  CHECK(max_abs(r.terminal().x, line({1, 1, 1, 1})) < 1e-3);

  r = simulate_caratheodory(Configuration::from_rows({{0, 0}, {1, 1.0 / 3}, {1, -1.0 / 3}}), ModelSpec::metric(), one,
                            ctrl, 20.0);
  CHECK(max_abs(r.terminal().x, Configuration::from_rows({{0, 0}, {1, 0}, {1, 0}}).x()) < 1e-3);

  const double delta = 0.1;
  r = simulate_caratheodory(Configuration::on_line({0, 1 - delta}), ModelSpec::metric(), one, ctrl, 20.0);
  CHECK(max_abs(r.terminal().x, line({(1 - delta) / 2, (1 - delta) / 2})) < 1e-6);
  CHECK(r.path.initial().t == 0.0);
  CHECK(r.terminal().t == doctest::Approx(20.0));
}

TEST_CASE("closed forms satisfy the equation") {
  const auto topo = ModelSpec::topological(1);
  const auto merge = testing::sample(merging, 0.1, 5.0, 1e-3);
  const auto rm = verify_caratheodory(merge, topo, one, 1e-6);
  CHECK(rm.passed());
  CHECK(rm.checked > 1000);
  CHECK(rm.max_residual <= 1e-6);

  const auto xc = testing::sample(
      [](double t) {
        const double e = std::exp(-2 * t) / 6;
        return line({-1.0 / 6 - e, -1.0 / 6 + e, 1});
      },
      0.1, 5.0, 1e-3);
  const auto rc = verify_caratheodory(xc, ModelSpec::metric(), one, 1e-6);
  CHECK(rc.passed());
  CHECK(rc.max_residual <= 1e-6);

  const auto still = testing::sample([](double) { return line({3, 3, -1, -1}); }, 0.0, 1.0, 1e-2);
  const auto rs = verify_caratheodory(still, topo, one, 1e-12);
  CHECK(rs.max_residual < 1e-10);

  // Wrong decay rate.
  const auto bad = testing::sample(
      [](double t) {
        const double e = std::exp(-t) / 6;
        return line({-1.0 / 6 - e, -1.0 / 6 + e, 1});
      },
      0.1, 5.0, 1e-3);
  CHECK_FALSE(verify_caratheodory(bad, ModelSpec::metric(), one, 1e-6).passed());
}

TEST_CASE("engine trajectories agree with the merging closed form") {
  CaratheodoryOptions alt;
  alt.start_branch = 1;
  StepControl ctrl;
  const auto r = simulate_caratheodory(Configuration::on_line({-1, 0, 1, 1}), ModelSpec::topological(1), one, ctrl,
                                       5.0, alt);
  double worst = 0.0;
  for (const auto& s : r.path.samples) worst = std::max(worst, max_abs(s.x, merging(s.t)));
  CHECK(worst < 1e-9);
}

TEST_CASE("frozen graphs stay valid right after each rebuild") {
  std::mt19937_64 rng(5);
  StepControl ctrl;
  for (int trial = 0; trial < 40; ++trial) {
    const auto x0 = testing::random_positions(rng, 3 + trial % 6, 1 + trial % 2, 4.0);
    const auto r = simulate_caratheodory(Configuration(x0), ModelSpec::topological(1), one, ctrl, 3.0);
    for (const auto& seg : r.segments) {
      const auto g = from_graph(seg.graph);
      for (const auto& s : r.path.samples) {
        if (s.t <= seg.t0 || s.t > seg.t0 + 10 * ctrl.h || s.t > seg.t1) continue;
        CHECK(validity_margin(s.x, g, coincide_threshold(s.x, 1e-12)) >= -1e-9);
      }
    }
    CHECK(verify_caratheodory(r.path, ModelSpec::topological(1), one, 1e-6).passed());
  }
}

TEST_CASE("runaway events are reported") {
  StepControl ctrl;
  ctrl.max_events = 1;
  CHECK_THROWS_AS(simulate_caratheodory(Configuration::on_line({0, 0.6, 1.2, 1.8, 2.4}), ModelSpec::metric(),
                                        one, ctrl, 30.0),
                  RunawayEventsError);
}

}
