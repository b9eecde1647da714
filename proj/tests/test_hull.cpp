#include "bcdyn/errors.hpp"
#include "bcdyn/hull.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace bcdyn;
using Vec = Eigen::VectorXd;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

double seg_dist(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double l2 = ab.squaredNorm();
  const double s = l2 > 0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (a + s * ab - p).norm();
}

bool in_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
  auto cross = [](const Vec& u, const Vec& v) { return u(0) * v(1) - u(1) * v(0); };
  if (std::abs(cross(b - a, c - a)) < 1e-14) return false;  // degenerate: segments cover it
  const double d1 = cross(b - a, p - a), d2 = cross(c - b, p - b), d3 = cross(a - c, p - c);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

// Planar distance to a hull: zero inside some triangle, otherwise the nearest segment.
double brute_distance(const std::vector<Vec>& pts, const Vec& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a; b < pts.size(); ++b) {
      best = std::min(best, seg_dist(p, pts[a], pts[b]));
      for (std::size_t c = b + 1; c < pts.size(); ++c)
        if (in_triangle(p, pts[a], pts[b], pts[c])) return 0.0;
    }
  return best;
}

}  // namespace

TEST_SUITE("hull") {

TEST_CASE("segment and triangle") {
  auto r = hull_membership({v1(0), v1(1)}, v1(0.5), 1e-9);
  CHECK(r.inside);
  CHECK(r.distance <= 1e-10);
  r = hull_membership({v1(0), v1(1)}, v1(2), 1e-9);
  CHECK_FALSE(r.inside);
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-10));
  r = hull_membership({v2(0, 0), v2(1, 0), v2(0, 1)}, v2(1, 1), 1e-9);
  CHECK(r.distance == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(hull_membership({}, v1(0), 1e-9), PreconditionError);
  CHECK_THROWS_AS(hull_membership({v1(0)}, v1(0), 0.0), PreconditionError);
  CHECK_THROWS_AS(hull_membership({v1(0), v2(0, 0)}, v1(0), 1e-9), PreconditionError);
  // The minimum-norm point lies inside an edge, so one iteration cannot reach it.
  CHECK_THROWS_AS(min_norm_point({v2(1, -1), v2(1, 1.2), v2(1.5, 0)}, 1e-12, 1), NumericError);
}

TEST_CASE("tiny distances are resolved below the tolerance") {
  // Query sitting on a hull edge, offset by much less than the tolerance.
  std::vector<Vec> pts = {v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1), v2(0.5, 0), v2(0.5, 0)};
  for (double off : {0.0, 1e-12, 5e-9}) {
    const auto r = hull_membership(pts, v2(0.3, 1 + off), 1e-7);
    CHECK(r.inside);
    CHECK(r.distance <= off + 1e-8);
  }
  const auto r = hull_membership(pts, v2(0.3, 1 + 3e-7), 1e-7);
  CHECK_FALSE(r.inside);
  CHECK(r.distance == doctest::Approx(3e-7).epsilon(0.05));
}

TEST_CASE("agrees with a brute-force planar oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec> pts;
    const int m = 1 + trial % 9;
    for (int k = 0; k < m; ++k) pts.push_back(v2(u(rng), u(rng)));
    if (trial % 5 == 0) pts.push_back(pts.front());
    const Vec p = v2(1.5 * u(rng), 1.5 * u(rng));
    const double want = brute_distance(pts, p);
    const auto got = hull_membership(pts, p, 1e-9);
    CHECK(std::abs(got.distance - want) <= 1e-9);
  }
}

}
