#include "bcdyn/errors.hpp"
#include "bcdyn/model.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace bcdyn;
using testing::line;

TEST_SUITE("model") {

TEST_CASE("kernel evaluation") {
  const auto one = InteractionKernel::constant(1.0);
  CHECK(eval_kernel(one, 0.5) == 1.0);
  CHECK(eval_kernel(one, 0.0) == 1.0);
  const auto sat = InteractionKernel::affine_saturated(0.0, 1.0, 2.0);
  CHECK(sat(3.0) == 2.0);
  CHECK(sat(1.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(one(-1e-3), DomainError);
  CHECK_THROWS_AS(InteractionKernel::parse("gauss:1"), ConfigError);
  CHECK_THROWS_AS(InteractionKernel::affine_saturated(0.0, 0.0, 1.0), ConfigError);
  CHECK(InteractionKernel::parse("affsat:0.5,1,2").cap() == 2.0);
}

TEST_CASE("kernel hypotheses on a grid") {
  for (const auto& k : {InteractionKernel::constant(2.0), InteractionKernel::affine_saturated(0.1, 3.0, 1.0)}) {
    const double lip = k.lipschitz_constant();
    double prev = k(0.0);
    for (int s = 1; s <= 400; ++s) {
      const double r = 0.01 * s;
      CHECK(k(r) > 0.0);
      CHECK(k(r) >= prev);
      CHECK(k(r) - prev <= lip * 0.01 + 1e-15);
      prev = k(r);
    }
  }
}

TEST_CASE("kernel integral") {
  const auto one = InteractionKernel::constant(1.0);
  CHECK(one.integral(0.5) == doctest::Approx(0.125));
  const auto sat = InteractionKernel::affine_saturated(0.0, 1.0, 2.0);
  // ∫_0^3 min(s, 2) s ds = 8/3 + 2 (9 - 4) / 2
  CHECK(sat.integral(3.0) == doctest::Approx(8.0 / 3.0 + 5.0));
}

TEST_CASE("metric neighbors use a strict radius") {
  const auto x = line({-1.0 / 3, 0, 1});
  CHECK(metric_neighbors(x, 1, 1.0) == std::vector<int>{0});
  CHECK(metric_neighbors(x, 2, 1.0).empty());
  CHECK(metric_neighbors(line({2, 2}), 0, 1.0) == std::vector<int>{1});
}

TEST_CASE("topological neighbors break ties by lower index") {
  CHECK(topological_neighbors(line({0, -1, 1}), 0, 1) == std::vector<int>{1});
  const double eps = 0.25;
  const auto x = Configuration::from_rows({{-1, 0}, {0, 0}, {1, 0}, {1 - eps, std::sqrt(1 - eps * eps)}}).x();
  CHECK(topological_neighbors(x, 2, 1) == std::vector<int>{1});
  auto three = topological_neighbors(line({0, 5, 9}), 0, 2);
  std::sort(three.begin(), three.end());
  CHECK(three == std::vector<int>{1, 2});
  CHECK_THROWS_AS(topological_neighbors(line({0, 5, 9}), 0, 3), ConfigError);
}

TEST_CASE("vector fields of the worked examples") {
  const auto one = InteractionKernel::constant(1.0);
  CHECK(testing::max_abs(vector_field(ModelSpec::metric(), one, line({-1.0 / 3, 0, 1})),
                         line({1.0 / 3, -1.0 / 3, 0})) < 1e-15);
  CHECK(testing::max_abs(vector_field(ModelSpec::topological(1), one, line({-1, 1, 0, 1, -1})),
                         line({0, 0, -1, 0, 0})) == 0.0);
  CHECK(vector_field(ModelSpec::topological(2), one, line({0.5, 0, 1, 0, 0, 1, 1})).isZero(0.0));
}

TEST_CASE("average") {
  CHECK(average(line({-1.0 / 3, 0, 1}))(0) == doctest::Approx(2.0 / 9));
  CHECK(average(line({0, -1, 1}))(0) == 0.0);
  const auto a = average(Configuration::from_rows({{0, 0}, {2, 4}}).x());
  CHECK(a(0) == 1.0);
  CHECK(a(1) == 2.0);
}

TEST_CASE("configuration and spec validation") {
  CHECK_THROWS_AS(Configuration::on_line({1.0}), ConfigError);
  CHECK_THROWS_AS(Configuration::on_line({1.0, std::nan("")}), ConfigError);
  CHECK_THROWS_AS(ModelSpec::metric(0.0), ConfigError);
  CHECK_THROWS_AS(ModelSpec::topological(3).validate(3), ConfigError);
  CHECK_NOTHROW(ModelSpec::topological(2).validate(3));
  CHECK(ModelSpec::parse("topological:2") == ModelSpec::topological(2));
  CHECK(ModelSpec::parse("metric") == ModelSpec::metric(1.0));
}

TEST_CASE("graph invariants on random configurations") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 8;
    const auto x = testing::random_positions(rng, n, 1 + trial % 3, 2.0, trial % 4 == 0);
    const auto gm = pointwise_graph(ModelSpec::metric(), x);
    for (int i = 0; i < n; ++i) {
      CHECK_FALSE(gm.has_edge(i, i));
      for (int j = 0; j < n; ++j) CHECK(gm.has_edge(i, j) == gm.has_edge(j, i));
    }
    const int kappa = 1 + trial % (n - 1);
    const auto gt = pointwise_graph(ModelSpec::topological(kappa), x);
    for (int i = 0; i < n; ++i) {
      CHECK(static_cast<int>(gt.out[static_cast<std::size_t>(i)].size()) == kappa);
      CHECK(topological_neighbors(x, i, kappa) == topological_neighbors(x, i, kappa));
    }
  }
}

TEST_CASE("zero field at exact clusters") {
  const auto one = InteractionKernel::constant(1.0);
  CHECK(vector_field(ModelSpec::metric(), one, line({0, 0, 1, 1, 5})).isZero(0.0));
  CHECK(vector_field(ModelSpec::topological(2), one, line({0, 0, 0, 4, 4, 4})).isZero(0.0));
}

TEST_CASE("field is continuous away from discontinuities") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1e-7);
  const auto k = InteractionKernel::affine_saturated(0.2, 1.0, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = testing::random_positions(rng, 6, 2, 2.0);
    Positions y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += nd(rng);
    for (const auto& spec : {ModelSpec::metric(), ModelSpec::topological(2)}) {
      // Same neighbor sets: perturbation below the gap to every discontinuity.
      if (!(pointwise_graph(spec, x) == pointwise_graph(spec, y))) continue;
      CHECK(testing::max_abs(vector_field(spec, k, x), vector_field(spec, k, y)) < 1e-5);
    }
  }
}

}
