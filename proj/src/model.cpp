#include "bcdyn/model.hpp"

#include "bcdyn/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bcdyn {

namespace {

double parse_double(std::string_view text, std::string_view what) {
  std::string s(text);
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("trailing characters in " + std::string(what) + ": '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse " + std::string(what) + ": '" + s + "'");
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

Configuration::Configuration(Positions x, double t) : x_(std::move(x)), t_(t) {
  if (x_.rows() < 2) throw ConfigError("a configuration needs at least two agents");
  if (x_.cols() < 1) throw ConfigError("opinion dimension must be at least 1");
  if (!x_.allFinite()) throw ConfigError("configuration contains non-finite coordinates");
  if (!std::isfinite(t_)) throw ConfigError("configuration time is not finite");
}

Configuration Configuration::on_line(const std::vector<double>& values, double t) {
  Positions x(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = values[i];
  return Configuration(std::move(x), t);
}

Configuration Configuration::from_rows(const std::vector<std::vector<double>>& rows, double t) {
  if (rows.empty()) throw ConfigError("a configuration needs at least two agents");
  const auto n = rows.front().size();
  Positions x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw ConfigError("ragged position rows");
    for (std::size_t d = 0; d < n; ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = rows[i][d];
  }
  return Configuration(std::move(x), t);
}

// ---------------------------------------------------------------------------
// InteractionKernel

InteractionKernel InteractionKernel::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("constant kernel needs c > 0");
  return InteractionKernel(Kind::Constant, c, 0.0, c);
}

InteractionKernel InteractionKernel::affine_saturated(double c0, double slope, double cap) {
  if (!std::isfinite(c0) || !std::isfinite(slope) || !std::isfinite(cap))
    throw ConfigError("affsat kernel parameters must be finite");
  if (c0 < 0.0 || slope < 0.0) throw ConfigError("affsat kernel needs c0 >= 0 and slope >= 0");
  if (!(cap > 0.0) || c0 > cap) throw ConfigError("affsat kernel needs 0 < cap and c0 <= cap");
  if (c0 == 0.0 && slope == 0.0) throw ConfigError("affsat kernel must be positive for r > 0");
  return InteractionKernel(Kind::AffineSaturated, c0, slope, cap);
}

InteractionKernel InteractionKernel::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("kernel spec must look like 'constant:1.0' or 'affsat:c0,slope,cap'");
  auto name = text.substr(0, colon);
  auto args = split(text.substr(colon + 1), ',');
  if (name == "constant") {
    if (args.size() != 1) throw ConfigError("constant kernel takes one parameter");
    return constant(parse_double(args[0], "kernel constant"));
  }
  if (name == "affsat") {
    if (args.size() != 3) throw ConfigError("affsat kernel takes three parameters");
    return affine_saturated(parse_double(args[0], "c0"), parse_double(args[1], "slope"),
                            parse_double(args[2], "cap"));
  }
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

double InteractionKernel::operator()(double r) const {
  if (r < 0.0 || std::isnan(r)) throw DomainError("kernel evaluated at negative distance");
  if (kind_ == Kind::Constant) return c0_;
  return std::min(c0_ + slope_ * r, cap_);
}

double InteractionKernel::integral(double r) const {
  if (r < 0.0 || std::isnan(r)) throw DomainError("kernel integral at negative distance");
  if (kind_ == Kind::Constant) return 0.5 * c0_ * r * r;
  const double r_sat = slope_ > 0.0 ? (cap_ - c0_) / slope_ : std::numeric_limits<double>::infinity();
  auto affine_part = [&](double s) { return 0.5 * c0_ * s * s + slope_ * s * s * s / 3.0; };
  if (r <= r_sat) return affine_part(r);
  return affine_part(r_sat) + 0.5 * cap_ * (r * r - r_sat * r_sat);
}

double InteractionKernel::lipschitz_constant() const { return kind_ == Kind::Constant ? 0.0 : slope_; }

std::string InteractionKernel::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::Constant)
    os << "constant:" << c0_;
  else
    os << "affsat:" << c0_ << "," << slope_ << "," << cap_;
  return os.str();
}

double eval_kernel(const InteractionKernel& kernel, double r) { return kernel(r); }

// ---------------------------------------------------------------------------
// ModelSpec

ModelSpec ModelSpec::metric(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("metric radius must be positive");
  ModelSpec s;
  s.kind = Kind::Metric;
  s.radius = radius;
  return s;
}

ModelSpec ModelSpec::topological(int kappa) {
  if (kappa < 1) throw ConfigError("topological kappa must be at least 1");
  ModelSpec s;
  s.kind = Kind::Topological;
  s.kappa = kappa;
  return s;
}

ModelSpec ModelSpec::parse(std::string_view text) {
  auto colon = text.find(':');
  auto name = text.substr(0, colon);
  std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (name == "metric") return metric(arg.empty() ? 1.0 : parse_double(arg, "radius"));
  if (name == "topological") {
    if (arg.empty()) throw ConfigError("topological model needs ':kappa'");
    int k = 0;
    auto [p, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || p != arg.data() + arg.size()) throw ConfigError("bad kappa '" + std::string(arg) + "'");
    return topological(k);
  }
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

void ModelSpec::validate(int agents) const {
  if (agents < 2) throw ConfigError("need at least two agents");
  if (is_metric()) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("metric radius must be positive");
  } else if (kappa < 1 || kappa > agents - 1) {
    throw ConfigError("kappa must lie in [1, N-1], got " + std::to_string(kappa) + " for N=" +
                      std::to_string(agents));
  }
}

std::string ModelSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (is_metric())
    os << "metric:" << radius;
  else
    os << "topological:" << kappa;
  return os.str();
}

// ---------------------------------------------------------------------------
// InteractionGraph

bool InteractionGraph::has_edge(int i, int j) const {
  const auto& o = out.at(static_cast<std::size_t>(i));
  return std::find(o.begin(), o.end(), j) != o.end();
}

std::vector<std::pair<int, int>> InteractionGraph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < size(); ++i)
    for (int j : out[static_cast<std::size_t>(i)]) e.emplace_back(i, j);
  return e;
}

void InteractionGraph::normalize() {
  for (auto& o : out) std::sort(o.begin(), o.end());
}

// ---------------------------------------------------------------------------
// Neighbor rules and fields

double squared_distance(const Positions& x, int i, int j) { return (x.row(i) - x.row(j)).squaredNorm(); }

double distance(const Positions& x, int i, int j) { return std::sqrt(squared_distance(x, i, j)); }

double diameter(const Positions& x) {
  double d2 = 0.0;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = i + 1; j < x.rows(); ++j) d2 = std::max(d2, squared_distance(x, i, j));
  return std::sqrt(d2);
}

namespace {
void check_index(const Positions& x, int i) {
  if (i < 0 || i >= x.rows()) throw PreconditionError("agent index " + std::to_string(i) + " out of range");
}
}  // namespace

std::vector<int> metric_neighbors(const Positions& x, int i, double radius) {
  check_index(x, i);
  if (!(radius > 0.0)) throw ConfigError("metric radius must be positive");
  const double r2 = radius * radius;
  std::vector<int> out;
  for (int j = 0; j < x.rows(); ++j)
    if (j != i && squared_distance(x, i, j) < r2) out.push_back(j);
  return out;
}

std::vector<int> ranked_others(const Positions& x, int i) {
  check_index(x, i);
  const int n = static_cast<int>(x.rows());
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(static_cast<std::size_t>(n - 1));
  for (int j = 0; j < n; ++j)
    if (j != i) keyed.emplace_back(squared_distance(x, i, j), j);
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order;
  order.reserve(keyed.size());
  for (const auto& [d2, j] : keyed) order.push_back(j);
  return order;
}

std::vector<int> topological_neighbors(const Positions& x, int i, int kappa) {
  if (kappa < 1 || kappa > x.rows() - 1)
    throw ConfigError("kappa must lie in [1, N-1], got " + std::to_string(kappa));
  auto order = ranked_others(x, i);
  order.resize(static_cast<std::size_t>(kappa));
  return order;
}

InteractionGraph pointwise_graph(const ModelSpec& spec, const Positions& x) {
  const int n = static_cast<int>(x.rows());
  spec.validate(n);
  InteractionGraph g(n);
  for (int i = 0; i < n; ++i) {
    if (spec.is_metric()) {
      g.out[static_cast<std::size_t>(i)] = metric_neighbors(x, i, spec.radius);
    } else {
      g.out[static_cast<std::size_t>(i)] = topological_neighbors(x, i, spec.kappa);
    }
  }
  g.normalize();
  return g;
}

Velocities graph_field(const InteractionKernel& kernel, const InteractionGraph& graph, const Positions& x) {
  Velocities v = Velocities::Zero(x.rows(), x.cols());
  for (int i = 0; i < graph.size(); ++i) {
    for (int j : graph.out[static_cast<std::size_t>(i)]) {
      Eigen::RowVectorXd diff = x.row(j) - x.row(i);
      v.row(i) += kernel(diff.norm()) * diff;
    }
  }
  return v;
}

Velocities vector_field(const ModelSpec& spec, const InteractionKernel& kernel, const Positions& x) {
  return graph_field(kernel, pointwise_graph(spec, x), x);
}

Point average(const Positions& x) { return x.colwise().mean().transpose(); }

}  // namespace bcdyn
