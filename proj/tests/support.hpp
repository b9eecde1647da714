#pragma once

#include "bcdyn/integrator.hpp"
#include "bcdyn/model.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testing {

using bcdyn::Positions;

inline Positions line(std::initializer_list<double> v) { return bcdyn::Configuration::on_line(v).x(); }

inline double max_abs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Samples a closed-form solution on [t0, t1] with step h.
inline bcdyn::Trajectory sample(const std::function<Positions(double)>& x, double t0, double t1, double h) {
  bcdyn::Trajectory tr;
  const long n = std::lround((t1 - t0) / h);
  for (long k = 0; k <= n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    tr.samples.push_back({t, x(t)});
  }
  return tr;
}

// Uniform positions; `lattice` snaps to a coarse grid so that ties are common.
inline Positions random_positions(std::mt19937_64& rng, int agents, int dim, double spread, bool lattice = false) {
  std::uniform_real_distribution<double> u(0.0, spread);
  std::uniform_int_distribution<int> g(0, 4);
  Positions x(agents, dim);
  for (int i = 0; i < agents; ++i)
    for (int d = 0; d < dim; ++d) x(i, d) = lattice ? g(rng) : u(rng);
  return x;
}

}  // namespace testing
