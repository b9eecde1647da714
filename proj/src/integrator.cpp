#include "bcdyn/integrator.hpp"

#include "bcdyn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcdyn {

void StepControl::validate() const {
  if (!(h > 0.0) || !(eps_event > 0.0) || !(eps_manifold > 0.0) || max_events <= 0 || max_steps <= 0 ||
      sample_stride <= 0)
    throw ConfigError("step control parameters must all be positive");
}

void Trajectory::validate() const {
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (k > 0) {
      if (!(samples[k].t > samples[k - 1].t)) throw PreconditionError("trajectory times must strictly increase");
      if (samples[k].x.rows() != samples[0].x.rows() || samples[k].x.cols() != samples[0].x.cols())
        throw PreconditionError("trajectory samples have inconsistent dimensions");
    }
  }
}

Positions rk4_step(const Field& rhs, const Positions& x, double h) {
  const Velocities k1 = rhs(x);
  const Velocities k2 = rhs(x + 0.5 * h * k1);
  const Velocities k3 = rhs(x + 0.5 * h * k2);
  const Velocities k4 = rhs(x + h * k3);
  Positions next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NumericError("RK4 step produced non-finite state");
  return next;
}

EventBracket locate_event(const std::function<Eigen::VectorXd(const Positions&)>& switches,
                          const std::function<Positions(double)>& path, double t0, double t1, double eps_event) {
  if (!(t1 > t0)) throw PreconditionError("event bracket needs t1 > t0");
  const Eigen::VectorXd g0 = switches(path(t0));
  auto changed = [&](const Eigen::VectorXd& g) -> int {
    for (Eigen::Index c = 0; c < g.size(); ++c)
      if ((g(c) < 0.0) != (g0(c) < 0.0)) return static_cast<int>(c);
    return -1;
  };
  int which = changed(switches(path(t1)));
  if (which < 0) throw PreconditionError("no monitored switching function changes sign on the bracket");

  double lo = t0;
  double hi = t1;
  while (hi - lo > eps_event * (1.0 + std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    int c = changed(switches(path(mid)));
    if (c >= 0) {
      hi = mid;
      which = c;
    } else {
      lo = mid;
    }
  }
  return {lo, hi, which};
}

std::optional<Velocities> finite_difference(const Trajectory& traj, std::size_t k) {
  const auto& s = traj.samples;
  if (s.size() < 5 || k >= s.size()) return std::nullopt;
  const std::size_t start = std::min(k >= 2 ? k - 2 : 0, s.size() - 5);
  const double lo = s[start].t;
  const double hi = s[start + 4].t;
  for (const auto& e : traj.events)
    if (e.t > lo && e.t < hi) return std::nullopt;

  // d/dt of the Lagrange basis polynomials, evaluated at t_k.
  const double t = s[k].t;
  Velocities d = Velocities::Zero(s[k].x.rows(), s[k].x.cols());
  for (std::size_t m = 0; m < 5; ++m) {
    double denom = 1.0;
    for (std::size_t l = 0; l < 5; ++l)
      if (l != m) denom *= s[start + m].t - s[start + l].t;
    double numer = 0.0;
    for (std::size_t p = 0; p < 5; ++p) {
      if (p == m) continue;
      double prod = 1.0;
      for (std::size_t l = 0; l < 5; ++l)
        if (l != m && l != p) prod *= t - s[start + l].t;
      numer += prod;
    }
    d += (numer / denom) * s[start + m].x;
  }
  return d;
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd b = a / std::ldexp(1.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < 40; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= std::numeric_limits<double>::epsilon() * 1e-3) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Positions propagate_linear_exact(const InteractionKernel& kernel, const InteractionGraph& graph, const Positions& x0,
                                 double dt) {
  if (!kernel.is_constant()) throw UnsupportedError("exact linear propagation needs a constant kernel");
  if (graph.size() != x0.rows()) throw PreconditionError("graph size does not match configuration");
  const auto n = x0.rows();
  // x' = -c L x with the out-degree Laplacian L = D - A.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < graph.size(); ++i) {
    for (int j : graph.out[static_cast<std::size_t>(i)]) {
      lap(i, j) -= 1.0;
      lap(i, i) += 1.0;
    }
  }
  return matrix_exponential(-kernel.c0() * dt * lap) * x0;
}

Trajectory euler_oracle(const ModelSpec& spec, const InteractionKernel& kernel, const Configuration& x0, double h_fine,
                        double horizon, long record_every) {
  if (!(h_fine > 0.0) || h_fine > 1e-4) throw PreconditionError("euler oracle needs 0 < h_fine <= 1e-4");
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  if (record_every <= 0) record_every = 1;
  spec.validate(x0.agents());

  Trajectory traj;
  Positions x = x0.x();
  const double t0 = x0.t();
  traj.samples.push_back({t0, x});
  const long steps = static_cast<long>(std::ceil(horizon / h_fine - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double t_prev = t0 + static_cast<double>(k - 1) * h_fine;
    const double t_next = k == steps ? t0 + horizon : t0 + static_cast<double>(k) * h_fine;
    x += (t_next - t_prev) * vector_field(spec, kernel, x);
    if (k % record_every == 0 || k == steps) traj.samples.push_back({t_next, x});
  }
  return traj;
}

}  // namespace bcdyn
