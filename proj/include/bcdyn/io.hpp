#pragma once

// JSON and CSV serialization.

#include "bcdyn/analysis.hpp"
#include "bcdyn/integrator.hpp"
#include "bcdyn/model.hpp"
#include "bcdyn/piecewise.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace bcdyn {

using Json = nlohmann::json;

/// {"n": dim, "positions": [[...], ...]}; "t" is optional.
Json configuration_to_json(const Configuration& x);
Configuration configuration_from_json(const Json& j);
Configuration load_configuration(const std::string& path);

Json positions_to_json(const Positions& x);
Positions positions_from_json(const Json& j);

/// Header t,x_1_1,...,x_N_n,event; 17 significant digits; the event column
/// holds the descriptors of events recorded at that sample (';'-separated).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);
/// Inverse of write_trajectory_csv (event descriptors are restored).
Trajectory read_trajectory_csv(const std::string& path);

Json property_report_to_json(const PropertyReport& r);
Json cluster_partition_to_json(const ClusterPartition& p);

/// Nodes {branch_id, parent, label, event {time, manifold, choice} | null, terminal_state}.
Json branch_tree_to_json(const std::vector<PiecewiseTrajectory>& branches);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

}  // namespace bcdyn
