#include "bcdyn/caratheodory.hpp"
#include "bcdyn/errors.hpp"
#include "bcdyn/integrator.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bcdyn;
using testing::line;
using testing::max_abs;

namespace {

InteractionGraph graph_of(int n, std::initializer_list<std::pair<int, int>> edges) {
  InteractionGraph g(n);
  for (auto [i, j] : edges) g.out[static_cast<std::size_t>(i)].push_back(j);
  g.normalize();
  return g;
}

Positions rk4_flow(const Field& f, Positions x, double h, int steps) {
  for (int s = 0; s < steps; ++s) x = rk4_step(f, x, h);
  return x;
}

}  // namespace

TEST_SUITE("integrator") {

TEST_CASE("rk4 on known solutions") {
  const Field decay = [](const Positions& x) { return Positions(-x); };
  CHECK(rk4_step(decay, line({1, 1}), 0.1)(0) == doctest::Approx(std::exp(-0.1)).epsilon(1e-6));
  const Field zero = [](const Positions& x) { return Positions(Positions::Zero(x.rows(), x.cols())); };
  CHECK(rk4_step(zero, line({3, -2}), 0.5) == line({3, -2}));

  const auto one = InteractionKernel::constant(1.0);
  const auto pair = graph_of(2, {{0, 1}, {1, 0}});
  const Field f = [&](const Positions& x) { return graph_field(one, pair, x); };
  const auto x1 = rk4_step(f, line({0, 1}), 0.01);
  const double e = std::exp(-0.02);
  CHECK(std::abs(x1(0) - (0.5 - 0.5 * e)) < 1e-10);
  CHECK(std::abs(x1(1) - (0.5 + 0.5 * e)) < 1e-10);
}

TEST_CASE("rk4 converges with fourth order on frozen segments") {
  const auto one = InteractionKernel::constant(1.0);
  const auto g = graph_of(4, {{0, 1}, {1, 0}, {2, 1}, {3, 2}, {3, 0}});
  const Field f = [&](const Positions& x) { return graph_field(one, g, x); };
  const auto x0 = line({-1, 0.3, 2, 5});
  const auto exact = propagate_linear_exact(one, g, x0, 1.0);
  const double e1 = max_abs(rk4_flow(f, x0, 0.1, 10), exact);
  const double e2 = max_abs(rk4_flow(f, x0, 0.05, 20), exact);
  const double e3 = max_abs(rk4_flow(f, x0, 0.025, 40), exact);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
  CHECK(std::log2(e2 / e3) >= 3.9);
}

TEST_CASE("locate_event") {
  const auto path = [](double t) { return line({t, 0}); };
  const auto sw = [](const Positions& x) { return Eigen::VectorXd::Constant(1, x(0) - 0.5); };
  const auto b = locate_event(sw, path, 0.0, 1.0, 1e-12);
  CHECK(b.index == 0);
  CHECK(b.t_lo <= 0.5);
  CHECK(b.t_hi >= 0.5);
  CHECK(b.t_hi - b.t_lo <= 1e-12);
  const auto never = [](const Positions&) { return Eigen::VectorXd::Constant(1, 1.0); };
  CHECK_THROWS_AS(locate_event(never, path, 0.0, 1.0, 1e-12), PreconditionError);

  // Earliest of two monitored functions.
  const auto two = [](const Positions& x) {
    Eigen::VectorXd v(2);
    v << 0.8 - x(0), x(0) - 0.25;
    return v;
  };
  const auto b2 = locate_event(two, path, 0.0, 1.0, 1e-12);
  CHECK(b2.index == 1);
  CHECK(b2.t_hi == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("metric contact time in the non-existence example") {
  // x1 = -2/3 e^{-t} = -x3 until |x3 - x1| = 1, i.e. t = ln(4/3).
  const auto x0 = Configuration::on_line({-2.0 / 3, 0, 2.0 / 3});
  const auto tr = simulate_caratheodory(x0, ModelSpec::metric(), InteractionKernel::constant(1.0), StepControl{}, 0.5);
  REQUIRE_FALSE(tr.path.events.empty());
  CHECK(std::abs(tr.path.events.front().t - std::log(4.0 / 3.0)) < 1e-9);

  const auto eu = euler_oracle(ModelSpec::metric(), InteractionKernel::constant(1.0), x0, 1e-6, 0.5, 1);
  double t_contact = -1.0;
  for (const auto& s : eu.samples)
    if (s.x(2, 0) - s.x(0, 0) < 1.0) {
      t_contact = s.t;
      break;
    }
  CHECK(std::abs(t_contact - tr.path.events.front().t) < 1e-5);
}

TEST_CASE("propagate_linear_exact") {
  const auto one = InteractionKernel::constant(1.0);
  // Classical branch of the metric inclusion example.
  const auto g = graph_of(3, {{0, 1}, {1, 0}});
  const auto x1 = propagate_linear_exact(one, g, line({-1.0 / 3, 0, 1}), 1.0);
  const double e = std::exp(-2.0);
  CHECK(max_abs(x1, line({-1.0 / 6 - e / 6, -1.0 / 6 + e / 6, 1})) <= 1e-12);

  // Γ(1) = 3, Γ(2) = 1, Γ(3) = 1 from (0, -1, 1).
  const auto alt = graph_of(3, {{0, 2}, {1, 0}, {2, 0}});
  CHECK(max_abs(propagate_linear_exact(one, alt, line({0, -1, 1}), 40.0), line({0.5, 0.5, 0.5})) <= 1e-12);

  CHECK(propagate_linear_exact(one, InteractionGraph(3), line({1, 2, 3}), 7.0) == line({1, 2, 3}));
  CHECK_THROWS_AS(propagate_linear_exact(InteractionKernel::affine_saturated(0, 1, 2), g, line({0, 0.5, 2}), 1.0),
                  UnsupportedError);
}

TEST_CASE("propagate_linear_exact agrees with rk4 on random frozen graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const auto x0 = testing::random_positions(rng, n, 1 + trial % 3, 3.0);
    const auto g = pointwise_graph(trial % 2 ? ModelSpec::metric(1.5) : ModelSpec::topological(1 + trial % (n - 1)), x0);
    const double c = 0.5 + trial % 3;
    const auto k = InteractionKernel::constant(c);
    const Field f = [&](const Positions& x) { return graph_field(k, g, x); };
    CHECK(max_abs(rk4_flow(f, x0, 1e-3, 1000), propagate_linear_exact(k, g, x0, 1.0)) <= 1e-9);
  }
}

TEST_CASE("matrix exponential") {
  Eigen::MatrixXd a(2, 2);
  a << 0, -1, 1, 0;
  const auto r = matrix_exponential(3.0 * a);
  CHECK(r(0, 0) == doctest::Approx(std::cos(3.0)).epsilon(1e-13));
  CHECK(r(1, 0) == doctest::Approx(std::sin(3.0)).epsilon(1e-13));
  CHECK(matrix_exponential(Eigen::MatrixXd::Zero(3, 3)).isIdentity(0.0));
}

TEST_CASE("finite differences") {
  Trajectory tr;
  const std::vector<double> ts = {0.0, 0.1, 0.15, 0.3, 0.32, 0.5, 0.7};
  auto p = [](double t) { return 1 - 2 * t + 3 * t * t - t * t * t * t; };
  auto dp = [](double t) { return -2 + 6 * t - 4 * t * t * t; };
  for (double t : ts) tr.samples.push_back({t, line({p(t), 2 * t})});
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto d = finite_difference(tr, k);
    REQUIRE(d);
    CHECK((*d)(0, 0) == doctest::Approx(dp(ts[k])).epsilon(1e-9));
    CHECK((*d)(1, 0) == doctest::Approx(2.0).epsilon(1e-9));
  }
  tr.events.push_back({0.31, "pair(0,1)"});
  CHECK_FALSE(finite_difference(tr, 3));
  Trajectory shortt;
  shortt.samples = {tr.samples[0], tr.samples[1]};
  CHECK_FALSE(finite_difference(shortt, 0));
}

TEST_CASE("euler oracle") {
  const auto one = InteractionKernel::constant(1.0);
  const auto still = euler_oracle(ModelSpec::metric(), one, Configuration::on_line({0, 0, 3}), 1e-4, 1.0);
  CHECK(still.terminal().x == line({0, 0, 3}));
  const auto pair = euler_oracle(ModelSpec::metric(), one, Configuration::on_line({0, 0.5}), 1e-5, 1.0);
  const double gap = pair.terminal().x(1) - pair.terminal().x(0);
  CHECK(std::abs(gap - 0.5 * std::exp(-2.0)) < 1e-5);
  CHECK(pair.terminal().t == doctest::Approx(1.0));
  CHECK_THROWS_AS(euler_oracle(ModelSpec::metric(), one, Configuration::on_line({0, 1}), 1e-3, 1.0),
                  PreconditionError);
}

TEST_CASE("step control and trajectory validation") {
  StepControl c;
  CHECK_NOTHROW(c.validate());
  c.h = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  Trajectory tr;
  tr.samples = {{0.0, line({0, 1})}, {0.0, line({0, 1})}};
  CHECK_THROWS_AS(tr.validate(), PreconditionError);
}

}
