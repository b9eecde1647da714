#pragma once

// Bounded-confidence opinion dynamics: configurations, interaction kernels,
// neighbor rules and the pointwise right-hand sides of the metric and the
// topological (κ-nearest) models.
//
// Agents are indexed from 0 in this API. Positions are stored as an N x n
// matrix whose row i is the opinion of agent i.

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bcdyn {

using Positions = Eigen::MatrixXd;   // N x n
using Velocities = Eigen::MatrixXd;  // N x n
using Point = Eigen::VectorXd;

/// Validated snapshot of the system: positions of N ≥ 2 agents in R^n at time t.
class Configuration {
 public:
  explicit Configuration(Positions x, double t = 0.0);

  /// Convenience for one-dimensional opinions.
  static Configuration on_line(const std::vector<double>& values, double t = 0.0);
  static Configuration from_rows(const std::vector<std::vector<double>>& rows, double t = 0.0);

  const Positions& x() const { return x_; }
  double t() const { return t_; }
  int agents() const { return static_cast<int>(x_.rows()); }
  int dim() const { return static_cast<int>(x_.cols()); }

 private:
  Positions x_;
  double t_;
};

/// Interaction strength a(r). Lipschitz, positive for r > 0, non-decreasing.
class InteractionKernel {
 public:
  enum class Kind { Constant, AffineSaturated };

  static InteractionKernel constant(double c);
  /// a(r) = min(c0 + slope * r, cap).
  static InteractionKernel affine_saturated(double c0, double slope, double cap);
  /// Parses "constant:<c>" or "affsat:<c0>,<slope>,<cap>".
  static InteractionKernel parse(std::string_view text);

  double operator()(double r) const;
  /// I(r) = ∫_0^r a(s) s ds.
  double integral(double r) const;
  double lipschitz_constant() const;

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  double c0() const { return c0_; }
  double slope() const { return slope_; }
  double cap() const { return cap_; }
  std::string to_string() const;

 private:
  InteractionKernel(Kind kind, double c0, double slope, double cap)
      : kind_(kind), c0_(c0), slope_(slope), cap_(cap) {}
  Kind kind_;
  double c0_;
  double slope_;
  double cap_;
};

/// Throws DomainError for r < 0.
double eval_kernel(const InteractionKernel& kernel, double r);

struct ModelSpec {
  enum class Kind { Metric, Topological };

  Kind kind = Kind::Metric;
  double radius = 1.0;
  int kappa = 1;

  static ModelSpec metric(double radius = 1.0);
  static ModelSpec topological(int kappa);
  /// Parses "metric", "metric:<radius>" or "topological:<kappa>".
  static ModelSpec parse(std::string_view text);

  bool is_metric() const { return kind == Kind::Metric; }
  bool is_topological() const { return kind == Kind::Topological; }
  /// Throws ConfigError when the spec is inconsistent with `agents`.
  void validate(int agents) const;
  std::string to_string() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Directed interaction graph; out[i] lists the neighbors j with edge i -> j.
struct InteractionGraph {
  std::vector<std::vector<int>> out;

  InteractionGraph() = default;
  explicit InteractionGraph(int agents) : out(static_cast<std::size_t>(agents)) {}

  int size() const { return static_cast<int>(out.size()); }
  bool has_edge(int i, int j) const;
  std::vector<std::pair<int, int>> edges() const;
  /// Keeps every neighbor list sorted ascending.
  void normalize();

  friend bool operator==(const InteractionGraph&, const InteractionGraph&) = default;
};

double squared_distance(const Positions& x, int i, int j);
double distance(const Positions& x, int i, int j);
/// Largest pairwise distance (0 for coincident agents).
double diameter(const Positions& x);

/// Agents j != i with ||x_j - x_i|| < radius (strict), ascending.
std::vector<int> metric_neighbors(const Positions& x, int i, double radius);
/// The κ nearest agents to i, ordered by distance; ties go to the lower index.
std::vector<int> topological_neighbors(const Positions& x, int i, int kappa);

/// All agents j != i ordered by (squared distance, index).
std::vector<int> ranked_others(const Positions& x, int i);

InteractionGraph pointwise_graph(const ModelSpec& spec, const Positions& x);

/// Right-hand side with a frozen interaction graph.
Velocities graph_field(const InteractionKernel& kernel, const InteractionGraph& graph, const Positions& x);

/// Pointwise right-hand side f^m or f^t evaluated with the exact neighbor sets at x.
Velocities vector_field(const ModelSpec& spec, const InteractionKernel& kernel, const Positions& x);

Point average(const Positions& x);

}  // namespace bcdyn
