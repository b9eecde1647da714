#include "bcdyn/analysis.hpp"
#include "bcdyn/caratheodory.hpp"
#include "bcdyn/errors.hpp"
#include "bcdyn/krasovsky.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bcdyn;
using testing::line;
using testing::max_abs;

namespace {

const auto one = InteractionKernel::constant(1.0);
const StepControl ctrl;

InteractionGraph graph_of(int n, std::initializer_list<std::pair<int, int>> edges) {
  InteractionGraph g(n);
  for (auto [i, j] : edges) g.out[i].push_back(j);
  g.normalize();
  return g;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("average invariance") {
  const auto m = simulate_caratheodory(Configuration::on_line({-1.0 / 3, 0, 1}), ModelSpec::metric(), one, ctrl, 30.0);
  const auto p = check_average_invariance(m.path, 1e-6);
  CHECK(p.pass);
  CHECK(p.deviation <= 1e-9);
  CHECK(average(m.terminal().x)(0) == doctest::Approx(2.0 / 9));

  const auto t = simulate_caratheodory(Configuration::on_line({0, -1, 1}), ModelSpec::topological(1), one, ctrl, 30.0);
  const auto q = check_average_invariance(t.path, 1e-6);
  CHECK_FALSE(q.pass);
  CHECK(q.deviation == doctest::Approx(0.5).epsilon(1e-3));
  CHECK_FALSE(q.witness_t.empty());

  const auto still = testing::sample([](double) { return line({1, 2}); }, 0, 1, 0.1);
  CHECK(check_average_invariance(still, 1e-12).deviation == 0.0);
}

TEST_CASE("support contractivity") {
  const auto t = simulate_caratheodory(Configuration::on_line({0, -1, 1}), ModelSpec::topological(1), one, ctrl, 10.0);
  CHECK(check_support_contractivity(t.path, 1e-7, nested_pairs(t.path, 10)).pass);
  const auto pairs = nested_pairs(t.path, 10);
  CHECK(pairs.size() == 10);
  for (auto [a, b] : pairs) CHECK(t.path.samples[a].t < t.path.samples[b].t);

  const auto still = testing::sample([](double) { return line({1, 2, 5}); }, 0, 1, 0.1);
  CHECK(check_support_contractivity(still, 1e-12, nested_pairs(still)).pass);

  const auto grow = testing::sample([](double s) { return Positions((1 + s) * line({-1, 0, 1})); }, 0, 1, 0.01);
  const auto g = check_support_contractivity(grow, 1e-7, nested_pairs(grow));
  CHECK_FALSE(g.pass);
  CHECK(g.deviation > 0.1);
  CHECK_FALSE(g.witness_t.empty());
}

TEST_CASE("clusters") {
  const auto x = Configuration::from_rows({{0, 0}, {1, 0}, {1, 0}}).x();
  const auto c = detect_clusters(x, ModelSpec::metric(), 1e-6);
  CHECK(c.blocks == std::vector<std::vector<int>>{{0}, {1, 2}});
  CHECK(c.is_cluster_point);
  CHECK((c.representatives.row(0) - c.representatives.row(1)).norm() == doctest::Approx(1.0));
  CHECK(c.labels() == std::vector<int>{0, 1, 1});

  const auto n7 = detect_clusters(line({0.5, 0, 1, 0, 0, 1, 1}), ModelSpec::topological(2), 1e-6);
  CHECK_FALSE(n7.is_cluster_point);

  const auto all = detect_clusters(line({3, 3, 3}), ModelSpec::topological(1), 1e-6);
  CHECK(all.blocks.size() == 1);
  CHECK(all.is_cluster_point);
  CHECK_FALSE(detect_clusters(line({0, 0.5}), ModelSpec::metric(), 1e-6).is_cluster_point);
}

TEST_CASE("Lyapunov functions at the worked examples") {
  CHECK(lyapunov_V_metric(line({2, 2, 2}), one) == 0.0);
  CHECK(lyapunov_V_metric(line({0, 0.5}), one) == doctest::Approx(0.25));
  CHECK(lyapunov_V_metric(line({0, 1}), one) == doctest::Approx(1.0));
  CHECK(lyapunov_V_metric(line({0, 7}), one) == doctest::Approx(1.0));

  CHECK(lyapunov_W_topological(line({-9, -9, -9, -2, 2, 9, 9, 9}), one, 2) == doctest::Approx(65.0));
  for (double y : {0.01, 0.05, 0.2}) {
    const double w = lyapunov_W_topological(line({-1 - y, -1 + y, 0, 1 - y, 1 + y}), one, 1);
    CHECK(2 * w == doctest::Approx(1 - 2 * y + 17 * y * y));
  }
  CHECK(lyapunov_W_topological(line({1, 1, 4, 4}), one, 1) == 0.0);
}

TEST_CASE("monotonicity monitor") {
  const auto up = testing::sample([](double t) { return line({t, 0}); }, 0, 1, 0.1);
  const auto fn = [](const Positions& x) { return x(0); };
  const auto r = monitor_monotonicity(up, fn, 1e-12, false, "x1");
  CHECK_FALSE(r.pass);
  CHECK(r.property == "x1");
  CHECK(r.metrics.at("positive_fraction") == doctest::Approx(1.0));
  CHECK(monitor_monotonicity(up, [](const Positions& x) { return -x(0); }, 1e-12).pass);

  // An increase inside an event step is ignored when asked to.
  auto jump = testing::sample([](double t) { return line({t < 0.5 ? 0.0 : 1.0, 0}); }, 0, 1, 0.1);
  jump.events.push_back({0.45, "pair(0,1)"});
  CHECK(monitor_monotonicity(jump, fn, 1e-12, true).pass);
  CHECK_FALSE(monitor_monotonicity(jump, fn, 1e-12, false).pass);
}

TEST_CASE("W decreases along kappa = 1 Caratheodory runs") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x0 = testing::random_positions(rng, 4 + trial % 5, 1 + trial % 3, 4.0);
    const auto r = simulate_caratheodory(Configuration(x0), ModelSpec::topological(1), one, ctrl, 5.0);
    const auto w = monitor_monotonicity(
        r.path, [](const Positions& x) { return lyapunov_W_topological(x, one, 1); }, 1e-8 * length_scale(x0));
    CHECK(w.pass);
  }
}

TEST_CASE("W increases in the two counterexamples") {
  const auto k2 = simulate_caratheodory(Configuration::on_line({-9, -9, -9, -2, 2, 9, 9, 9}), ModelSpec::topological(2),
                                        one, ctrl, 5.0);
  const auto w2 = monitor_monotonicity(k2.path, [](const Positions& x) { return lyapunov_W_topological(x, one, 2); },
                                       1e-8);
  CHECK_FALSE(w2.pass);
  CHECK(w2.metrics.at("positive_fraction") >= 0.9);
  for (const auto& s : k2.path.samples) CHECK(std::abs(s.x(4) - (3 - std::exp(-3 * s.t))) < 1e-8);

  const double y0 = 0.05;
  const auto k1 = simulate_krasovsky(Configuration::on_line({-1 - y0, -1 + y0, 0, 1 - y0, 1 + y0}),
                                     ModelSpec::topological(1), one, BranchPolicy::parse("slide"), ctrl, 5.0);
  const auto w1 = monitor_monotonicity(k1.front().path,
                                       [](const Positions& x) { return lyapunov_W_topological(x, one, 1); }, 1e-12);
  CHECK_FALSE(w1.pass);
  CHECK(w1.metrics.at("positive_fraction") >= 0.9);
  for (const auto& s : k1.front().path.samples) {
    const double y = y0 * std::exp(-2 * s.t);
    CHECK(max_abs(s.x, line({-1 - y, -1 + y, 0, 1 - y, 1 + y})) < 1e-8);
  }
}

TEST_CASE("pseudoforest structure") {
  const auto topo = ModelSpec::topological(1);
  const auto a = pointwise_graph(topo, line({0, 10, 19, 27, 28, 30}));
  CHECK(a == graph_of(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 3}, {5, 4}}));
  const auto ra = pseudoforest_check(a);
  CHECK(ra.ok);
  CHECK(ra.components == 1);

  const auto b = pointwise_graph(
      topo, Configuration::from_rows({{0, 0}, {0, 1}, {-1, 0}, {0, -1}, {0.5, 0}, {1, 0}, {1, 1}, {1, -1}}).x());
  CHECK(b.has_edge(0, 4));
  CHECK(b.has_edge(4, 0));
  CHECK(pseudoforest_check(b).ok);

  CHECK_FALSE(pseudoforest_check(graph_of(3, {{0, 1}, {1, 2}, {2, 0}})).ok);
  CHECK_THROWS_AS(pseudoforest_check(graph_of(3, {{0, 1}, {0, 2}, {1, 0}, {2, 0}})), PreconditionError);
  const auto split = pseudoforest_check(graph_of(4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}}));
  CHECK(split.ok);
  CHECK(split.components == 2);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = testing::random_positions(rng, 2 + trial % 20, 1 + trial % 3, 10.0);
    CHECK(pseudoforest_check(pointwise_graph(topo, x)).ok);
    CHECK(pseudoforest_check(build_gamma(x, one).to_graph()).ok);
  }
}

TEST_CASE("convergence detection") {
  const auto m = simulate_caratheodory(Configuration::from_rows({{0, 0}, {1, 1.0 / 3}, {1, -1.0 / 3}}),
                                       ModelSpec::metric(), one, ctrl, 20.0);
  const auto cm = detect_convergence(m.path, ModelSpec::metric(), one);
  REQUIRE(cm);
  CHECK(cm->is_cluster_point);
  CHECK(cm->blocks.size() == 2);

  const auto k2 = simulate_caratheodory(Configuration::on_line({-9, -9, -9, -2, 2, 9, 9, 9}), ModelSpec::topological(2),
                                        one, ctrl, 8.0);
  const auto ck = detect_convergence(k2.path, ModelSpec::topological(2), one);
  REQUIRE(ck);
  CHECK_FALSE(ck->is_cluster_point);
  CHECK(max_abs(k2.terminal().x, line({-9, -9, -9, -3, 3, 9, 9, 9})) < 1e-3);

  const auto flat = testing::sample([](double) { return line({1, 1, 1}); }, 0, 2, 0.01);
  const auto cf = detect_convergence(flat, ModelSpec::metric(), one);
  REQUIRE(cf);
  CHECK(cf->blocks.size() == 1);

  const auto early = simulate_caratheodory(Configuration::on_line({0, 0.9}), ModelSpec::metric(), one, ctrl, 1.0);
  CHECK_FALSE(detect_convergence(early.path, ModelSpec::metric(), one));
}

TEST_CASE("equilibria") {
  CHECK(is_caratheodory_equilibrium(line({0.5, 0, 1, 0, 0, 1, 1}), ModelSpec::topological(2), one));
  CHECK_FALSE(is_caratheodory_equilibrium(line({0, -1, 1}), ModelSpec::topological(1), one));
  CHECK(is_caratheodory_equilibrium(line({0, 0, 3, 3}), ModelSpec::topological(1), one));
}

TEST_CASE("kappa = 1 Caratheodory limits are cluster points") {
  std::mt19937_64 rng(29);
  int converged = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto x0 = testing::random_positions(rng, 3 + trial % 6, 1 + trial % 2, 4.0);
    const auto r = simulate_caratheodory(Configuration(x0), ModelSpec::topological(1), one, ctrl, 30.0);
    const auto c = detect_convergence(r.path, ModelSpec::topological(1), one);
    if (!c) continue;
    ++converged;
    CHECK(c->is_cluster_point);
  }
  CHECK(converged >= 25);
}

TEST_CASE("metric clusters are at least one radius apart") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto x0 = testing::random_positions(rng, 3 + trial % 6, 1 + trial % 2, 3.0);
    const auto r = simulate_caratheodory(Configuration(x0), ModelSpec::metric(), one, ctrl, 30.0);
    const auto c = detect_convergence(r.path, ModelSpec::metric(), one);
    if (!c) continue;
    CHECK(c->is_cluster_point);
    for (Eigen::Index a = 0; a < c->representatives.rows(); ++a)
      for (Eigen::Index b = a + 1; b < c->representatives.rows(); ++b)
        CHECK((c->representatives.row(a) - c->representatives.row(b)).norm() >= 1.0 - 1e-6);
  }
}

}
