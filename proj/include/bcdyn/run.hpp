#pragma once

// Single runs (properties, expectations, report JSON, output files) and the
// preset-wide verification with its property matrix.

#include "bcdyn/analysis.hpp"
#include "bcdyn/integrator.hpp"
#include "bcdyn/io.hpp"
#include "bcdyn/model.hpp"
#include "bcdyn/piecewise.hpp"
#include "bcdyn/scenarios.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bcdyn {

struct RunConfig {
  ModelSpec spec = ModelSpec::metric(1.0);
  InteractionKernel kernel = InteractionKernel::constant(1.0);
  std::optional<Configuration> init;  ///< inline positions
  std::string init_path;              ///< or a configuration JSON file
  SolutionKind solution = SolutionKind::Caratheodory;
  std::string policy = "default";
  int start_branch = 0;
  double horizon = 30.0;
  StepControl ctrl;
  std::string out_csv;
  std::string report_path;
  std::string branches_path;
  bool strict = false;
  std::string scenario;
  std::string scenario_branch;

  Configuration initial() const;
  void validate() const;
  Json to_json() const;
  static RunConfig from_json(const Json& j);
};

/// Config for one branch of a preset (its expectation is looked up by run()).
RunConfig config_for_scenario(const ScenarioPreset& preset, const PresetBranch& branch);

struct BranchOutcome {
  PiecewiseTrajectory traj;
  PropertyReport p1, p2, p3, lyapunov;
  std::optional<ClusterPartition> clusters;  ///< set when converged
  std::vector<std::string> failures;         ///< expectation or guarantee mismatches
};

struct RunResult {
  RunConfig config;
  std::vector<BranchOutcome> branches;
  bool caratheodory_equilibrium = false;  ///< of the initial state
  bool krasovsky_equilibrium = false;
  std::optional<PseudoforestReport> pseudoforest;
  std::vector<std::string> failures;  ///< run-level mismatches
  Json report;

  bool passed() const;
};

/// Simulates, evaluates properties and builds the report. Expected values
/// come from the preset named in the config; otherwise the properties the
/// model guarantees (P2 always, P1/P3/Lyapunov where proven) are enforced.
RunResult execute(const RunConfig& config);

/// Trajectory CSV (extra branches get a ".branchK" suffix), report and branch tree.
void write_outputs(const RunResult& result);

/// execute() plus output files. Returns the exit status: 0, or 2 when strict
/// and a check failed. IO and parse errors propagate as exceptions.
int run(const RunConfig& config);

/// Random configuration: N agents uniform in [0, spread]^n.
Configuration random_configuration(std::mt19937_64& rng, int agents, int dim, double spread);

struct PropertyMatrix {
  static constexpr int rows = 6;
  static constexpr int cols = 3;
  static const std::array<const char*, rows> row_names;
  static const std::array<const char*, cols> col_names;
  /// 0 untested, 1 holds on every contributing run, 2 counterexample found.
  std::array<std::array<int, cols>, rows> cell{};
  std::array<std::array<int, cols>, rows> runs{};

  /// Reference layout: metric rows all Yes, topological P1 No, P2 Yes,
  /// P3 Yes only for kappa = 1 Caratheodory.
  static PropertyMatrix expected();
  /// Adds the verdicts of one branch to every row whose solution class contains it.
  void contribute(const ModelSpec& spec, SolutionKind solution, const BranchOutcome& outcome);
  std::string render() const;
  Json to_json() const;
};

struct VerifyOptions {
  std::optional<std::string> filter;  ///< comma-separated substrings; unset runs all, "" runs none
  int random_runs = 10;               ///< per engine and model family
  std::uint64_t seed = 1;
  int threads = 0;                    ///< 0: BC_DYN_THREADS or hardware concurrency
};

struct VerifyCase {
  std::string name;
  bool pass = false;
  std::vector<std::string> failures;
  int branches = 0;
};

struct VerifySummary {
  std::vector<VerifyCase> cases;
  PropertyMatrix matrix;
  bool matrix_checked = false;
  std::vector<std::string> matrix_mismatches;
  bool pass = true;

  Json to_json() const;
};

VerifySummary verify_all(const VerifyOptions& options);

/// BC_DYN_THREADS if set and positive, otherwise hardware concurrency (>= 1).
int default_threads();

}  // namespace bcdyn
