#include "bcdyn/hull.hpp"

#include "bcdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bcdyn {

namespace {

// Minimizes ||sum_k mu_k q_k|| subject to sum_k mu_k = 1 over the corral S.
Eigen::VectorXd affine_minimizer(const std::vector<Eigen::VectorXd>& q, const std::vector<int>& corral) {
  const auto m = static_cast<Eigen::Index>(corral.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b)
      kkt(a, b) = q[static_cast<std::size_t>(corral[a])].dot(q[static_cast<std::size_t>(corral[b])]);
    kkt(a, m) = 1.0;
    kkt(m, a) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd mu = sol.head(m);
  // Renormalize against round-off drift of the affine constraint.
  const double s = mu.sum();
  if (std::abs(s) > 0.0) mu /= s;
  return mu;
}

}  // namespace

HullMembership min_norm_point(const std::vector<Eigen::VectorXd>& points, double tol, int max_iterations) {
  if (points.empty()) throw PreconditionError("hull membership needs a nonempty point set");
  if (!(tol > 0.0)) throw PreconditionError("hull membership tolerance must be positive");
  const auto dim = points.front().size();
  for (const auto& q : points)
    if (q.size() != dim) throw PreconditionError("hull points have mismatched dimensions");

  const double accuracy = tol / 10.0;
  double qmax = 0.0;
  for (const auto& q : points) qmax = std::max(qmax, q.norm());

  // Start from the point of smallest norm (lowest index on ties).
  int start = 0;
  for (int k = 1; k < static_cast<int>(points.size()); ++k)
    if (points[static_cast<std::size_t>(k)].squaredNorm() < points[static_cast<std::size_t>(start)].squaredNorm())
      start = k;

  std::vector<int> corral{start};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd x = points[static_cast<std::size_t>(start)];
  int iter = 0;
  double gap = std::numeric_limits<double>::infinity();

  auto recompute_x = [&] {
    x.setZero(dim);
    for (std::size_t a = 0; a < corral.size(); ++a) x += lambda[a] * points[static_cast<std::size_t>(corral[a])];
  };

  for (; iter < max_iterations; ++iter) {
    const double xn2 = x.squaredNorm();
    if (std::sqrt(xn2) <= accuracy) break;

    int best = 0;
    double best_dot = x.dot(points[0]);
    for (int k = 1; k < static_cast<int>(points.size()); ++k) {
      double d = x.dot(points[static_cast<std::size_t>(k)]);
      if (d < best_dot) {
        best_dot = d;
        best = k;
      }
    }
    gap = xn2 - best_dot;
    // ||x|| - dist <= gap / ||x||.
    // Rounding in x.q is of order eps |x| |q|.
    const double round_off = 64.0 * std::numeric_limits<double>::epsilon() * std::sqrt(xn2) * qmax;
    if (gap <= accuracy * std::sqrt(xn2) || gap <= round_off) break;
    if (std::find(corral.begin(), corral.end(), best) != corral.end()) break;

    corral.push_back(best);
    lambda.push_back(0.0);

    // Minor cycles: move toward the affine minimizer while staying in the simplex.
    for (int minor = 0; minor <= static_cast<int>(points.size()) + 1; ++minor) {
      Eigen::VectorXd mu = affine_minimizer(points, corral);
      const double eps = 1e-14;
      bool interior = true;
      for (Eigen::Index a = 0; a < mu.size(); ++a)
        if (mu(a) <= eps) interior = false;
      if (interior) {
        for (std::size_t a = 0; a < corral.size(); ++a) lambda[a] = mu(static_cast<Eigen::Index>(a));
        break;
      }
      double theta = 1.0;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        const double m = mu(static_cast<Eigen::Index>(a));
        if (m <= eps && lambda[a] - m > 0.0) theta = std::min(theta, lambda[a] / (lambda[a] - m));
      }
      for (std::size_t a = 0; a < corral.size(); ++a)
        lambda[a] = (1.0 - theta) * lambda[a] + theta * mu(static_cast<Eigen::Index>(a));
      std::vector<int> kept_idx;
      std::vector<double> kept_lambda;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        if (lambda[a] > eps) {
          kept_idx.push_back(corral[a]);
          kept_lambda.push_back(lambda[a]);
        }
      }
      if (kept_idx.empty()) {
        kept_idx.push_back(best);
        kept_lambda.push_back(1.0);
      }
      double s = 0.0;
      for (double l : kept_lambda) s += l;
      for (double& l : kept_lambda) l /= s;
      corral = std::move(kept_idx);
      lambda = std::move(kept_lambda);
    }
    recompute_x();
  }

  if (iter >= max_iterations) {
    std::ostringstream os;
    os << "minimum-norm-point iteration did not converge after " << max_iterations << " iterations (gap " << gap
       << ")";
    throw NumericError(os.str());
  }

  HullMembership out;
  out.distance = x.norm();
  out.inside = out.distance <= tol;
  out.closest = x;
  out.weights.assign(points.size(), 0.0);
  for (std::size_t a = 0; a < corral.size(); ++a) out.weights[static_cast<std::size_t>(corral[a])] = lambda[a];
  out.iterations = iter;
  return out;
}

HullMembership hull_membership(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& p, double tol,
                               int max_iterations) {
  if (points.empty()) throw PreconditionError("hull membership needs a nonempty point set");
  std::vector<Eigen::VectorXd> shifted;
  shifted.reserve(points.size());
  for (const auto& q : points) {
    if (q.size() != p.size()) throw PreconditionError("query point dimension does not match hull points");
    shifted.push_back(q - p);
  }
  HullMembership r = min_norm_point(shifted, tol, max_iterations);
  r.closest += p;
  return r;
}

}  // namespace bcdyn
