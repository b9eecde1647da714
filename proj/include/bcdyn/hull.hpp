#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bcdyn {

struct HullMembership {
  bool inside = false;
  double distance = 0.0;
  /// Closest point of the hull to the query.
  Eigen::VectorXd closest;
  /// Convex weights over the input points realizing `closest`.
  std::vector<double> weights;
  int iterations = 0;
};

/// Euclidean distance from `p` to conv(points), by Wolfe's minimum-norm-point
/// iteration applied to the translated set {points_k - p}. Reports inside iff
/// distance <= tol; the distance is accurate to tol/10.
///
/// Throws PreconditionError on empty input, mismatched dimensions or tol <= 0,
/// and NumericError (with the achieved gap) if `max_iterations` is exhausted.
HullMembership hull_membership(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& p, double tol,
                               int max_iterations = 10000);

/// Minimum-norm point of conv(points); same algorithm with p = 0.
HullMembership min_norm_point(const std::vector<Eigen::VectorXd>& points, double tol, int max_iterations = 10000);

}  // namespace bcdyn
