#pragma once

// Named presets reproducing the worked examples, with their expected outcomes.

#include "bcdyn/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bcdyn {

enum class SolutionKind { Caratheodory, Krasovsky };

std::string to_string(SolutionKind s);
SolutionKind parse_solution(const std::string& text);

/// Where an expected value comes from: "reference" (stated with the worked
/// example), "computed" (worked out by hand from a closed form) or "elementary".
struct Expectation {
  std::optional<Positions> terminal;
  double tol = 1e-3;
  std::optional<bool> cluster_point;
  std::optional<bool> lyapunov_monotone;
  std::optional<bool> caratheodory_equilibrium;
  std::optional<bool> krasovsky_equilibrium;
  std::string origin;
  std::string note;
};

struct PresetBranch {
  std::string name;
  SolutionKind solution = SolutionKind::Caratheodory;
  int start_branch = 0;       ///< Caratheodory start graph option
  std::string policy;         ///< Krasovsky branch policy text
  Expectation expect;
};

struct ScenarioPreset {
  std::string name;
  std::string title;
  ModelSpec spec;
  InteractionKernel kernel = InteractionKernel::constant(1.0);
  Configuration initial = Configuration::on_line({0.0, 1.0});
  double horizon = 30.0;
  bool check_pseudoforest = false;
  std::vector<PresetBranch> branches;

  const PresetBranch& branch(const std::string& name_or_index) const;
};

const std::vector<ScenarioPreset>& scenario_presets();
const ScenarioPreset& find_scenario(const std::string& name);

}  // namespace bcdyn
