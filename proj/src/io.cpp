#include "bcdyn/io.hpp"

#include "bcdyn/errors.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace bcdyn {

Json positions_to_json(const Positions& x) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index d = 0; d < x.cols(); ++d) row.push_back(x(i, d));
    rows.push_back(std::move(row));
  }
  return rows;
}

Positions positions_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("positions must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (r.is_number()) {
      rows.push_back({r.get<double>()});
      continue;
    }
    if (!r.is_array()) throw ConfigError("each position must be a number or an array of numbers");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ConfigError("position coordinates must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return Configuration::from_rows(rows).x();
}

Json configuration_to_json(const Configuration& x) {
  Json j;
  j["n"] = x.dim();
  j["positions"] = positions_to_json(x.x());
  if (x.t() != 0.0) j["t"] = x.t();
  return j;
}

Configuration configuration_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("positions")) throw ConfigError("configuration JSON needs a 'positions' array");
  Positions x = positions_from_json(j.at("positions"));
  if (j.contains("n") && j.at("n").get<int>() != x.cols())
    throw ConfigError("configuration 'n' does not match the position rows");
  return Configuration(std::move(x), j.value("t", 0.0));
}

Configuration load_configuration(const std::string& path) { return configuration_from_json(read_json(path)); }

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) throw PreconditionError("cannot write an empty trajectory");
  const auto rows = traj.samples.front().x.rows();
  const auto cols = traj.samples.front().x.cols();
  os << "t";
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index d = 0; d < cols; ++d) os << ",x_" << i + 1 << "_" << d + 1;
  os << ",event\n";

  std::multimap<double, std::string> events;
  for (const auto& e : traj.events) events.emplace(e.t, e.descriptor);
  os << std::setprecision(17);
  for (const auto& s : traj.samples) {
    os << s.t;
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index d = 0; d < cols; ++d) os << "," << s.x(i, d);
    os << ",";
    auto [lo, hi] = events.equal_range(s.t);
    for (auto it = lo; it != hi; ++it) os << (it == lo ? "" : ";") << it->second;
    os << "\n";
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  write_trajectory_csv(f, traj);
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("empty trajectory file '" + path + "'");
  int rows = 0;
  int cols = 0;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      if (cell.rfind("x_", 0) != 0) continue;
      const auto us = cell.find('_', 2);
      rows = std::max(rows, std::stoi(cell.substr(2, us - 2)));
      cols = std::max(cols, std::stoi(cell.substr(us + 1)));
    }
  }
  if (rows == 0 || cols == 0) throw ConfigError("trajectory header has no position columns");
  Trajectory traj;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    Sample s{std::stod(cell), Positions(rows, cols)};
    for (int i = 0; i < rows; ++i)
      for (int d = 0; d < cols; ++d) {
        if (!std::getline(ls, cell, ',')) throw ConfigError("short trajectory row");
        s.x(i, d) = std::stod(cell);
      }
    std::string ev;
    std::getline(ls, ev);
    std::stringstream es(ev);
    std::string one;
    while (std::getline(es, one, ';'))
      if (!one.empty()) traj.events.push_back({s.t, one});
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

Json property_report_to_json(const PropertyReport& r) {
  Json j;
  j["property"] = r.property;
  j["pass"] = r.pass;
  j["deviation"] = r.deviation;
  j["witness_t"] = r.witness_t;
  if (!r.metrics.empty()) j["metrics"] = r.metrics;
  return j;
}

Json cluster_partition_to_json(const ClusterPartition& p) {
  Json j;
  Json blocks = Json::array();
  for (const auto& b : p.blocks) {
    Json one = Json::array();
    for (int i : b) one.push_back(i + 1);
    blocks.push_back(one);
  }
  j["blocks"] = blocks;
  j["representatives"] = positions_to_json(p.representatives);
  j["is_cluster_point"] = p.is_cluster_point;
  return j;
}

Json branch_tree_to_json(const std::vector<PiecewiseTrajectory>& branches) {
  Json nodes = Json::array();
  for (const auto& b : branches) {
    Json n;
    n["branch_id"] = b.branch_id;
    n["parent"] = b.parent < 0 ? Json(nullptr) : Json(b.parent);
    n["label"] = b.label;
    if (b.fork)
      n["event"] = {{"time", b.fork->t}, {"manifold", b.fork->manifold.to_string()}, {"choice", b.fork->choice}};
    else
      n["event"] = nullptr;
    n["terminal_state"] = positions_to_json(b.terminal().x);
    n["terminal_time"] = b.terminal().t;
    nodes.push_back(std::move(n));
  }
  return Json{{"nodes", nodes}};
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << j.dump(2) << "\n";
  if (!f) throw ConfigError("failed writing '" + path + "'");
}

Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const Json::exception& e) {
    throw ConfigError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace bcdyn
