#include "bcdyn/run.hpp"

#include "bcdyn/caratheodory.hpp"
#include "bcdyn/errors.hpp"
#include "bcdyn/krasovsky.hpp"
#include "bcdyn/switching.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

namespace bcdyn {

// ---------------------------------------------------------------------------
// RunConfig

Configuration RunConfig::initial() const {
  if (init) return *init;
  if (init_path.empty()) throw ConfigError("no initial configuration given (use --init or --scenario)");
  return load_configuration(init_path);
}

void RunConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive and finite");
  ctrl.validate();
  if (start_branch < 0) throw ConfigError("start branch must be nonnegative");
  if (solution == SolutionKind::Krasovsky) BranchPolicy::parse(policy).validate();
}

Json RunConfig::to_json() const {
  Json j;
  j["model"] = spec.to_string();
  j["kernel"] = kernel.to_string();
  if (init) j["init"] = configuration_to_json(*init);
  if (!init_path.empty()) j["init_path"] = init_path;
  j["solution"] = to_string(solution);
  j["policy"] = policy;
  j["start_branch"] = start_branch;
  j["horizon"] = horizon;
  j["step"] = {{"h", ctrl.h},
               {"eps_event", ctrl.eps_event},
               {"eps_manifold", ctrl.eps_manifold},
               {"max_events", ctrl.max_events},
               {"max_steps", ctrl.max_steps},
               {"sample_stride", ctrl.sample_stride}};
  j["outputs"] = {{"trajectory", out_csv}, {"report", report_path}, {"branches", branches_path}};
  j["strict"] = strict;
  if (!scenario.empty()) {
    j["scenario"] = scenario;
    j["branch"] = scenario_branch;
  }
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  try {
    if (j.contains("scenario")) {
      const auto& preset = find_scenario(j.at("scenario").get<std::string>());
      c = config_for_scenario(preset, preset.branch(j.value("branch", std::string())));
    }
    if (j.contains("model")) c.spec = ModelSpec::parse(j.at("model").get<std::string>());
    if (j.contains("kernel")) c.kernel = InteractionKernel::parse(j.at("kernel").get<std::string>());
    if (j.contains("init")) c.init = configuration_from_json(j.at("init"));
    if (j.contains("init_path")) {
      c.init_path = j.at("init_path").get<std::string>();
      if (!j.contains("init")) c.init.reset();
    }
    if (j.contains("solution")) c.solution = parse_solution(j.at("solution").get<std::string>());
    c.policy = j.value("policy", c.policy);
    c.start_branch = j.value("start_branch", c.start_branch);
    c.horizon = j.value("horizon", c.horizon);
    if (j.contains("step")) {
      const auto& s = j.at("step");
      c.ctrl.h = s.value("h", c.ctrl.h);
      c.ctrl.eps_event = s.value("eps_event", c.ctrl.eps_event);
      c.ctrl.eps_manifold = s.value("eps_manifold", c.ctrl.eps_manifold);
      c.ctrl.max_events = s.value("max_events", c.ctrl.max_events);
      c.ctrl.max_steps = s.value("max_steps", c.ctrl.max_steps);
      c.ctrl.sample_stride = s.value("sample_stride", c.ctrl.sample_stride);
    }
    if (j.contains("outputs")) {
      const auto& o = j.at("outputs");
      c.out_csv = o.value("trajectory", c.out_csv);
      c.report_path = o.value("report", c.report_path);
      c.branches_path = o.value("branches", c.branches_path);
    }
    c.strict = j.value("strict", c.strict);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig config_for_scenario(const ScenarioPreset& preset, const PresetBranch& branch) {
  RunConfig c;
  c.spec = preset.spec;
  c.kernel = preset.kernel;
  c.init = preset.initial;
  c.solution = branch.solution;
  c.policy = branch.policy.empty() ? "default" : branch.policy;
  c.start_branch = branch.start_branch;
  c.horizon = preset.horizon;
  c.scenario = preset.name;
  c.scenario_branch = branch.name;
  return c;
}

// ---------------------------------------------------------------------------
// execute

namespace {

double max_abs_diff(const Positions& a, const Positions& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return (a - b).cwiseAbs().maxCoeff();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

PropertyReport cluster_report(const std::optional<ClusterPartition>& part, const Positions& xT,
                              const ModelSpec& spec, const InteractionKernel& kernel) {
  PropertyReport r{"P3_clusters", false, 0.0, {}, {}};
  r.metrics["converged"] = part ? 1.0 : 0.0;
  if (!part) {
    r.deviation = vector_field(spec, kernel, xT).cwiseAbs().maxCoeff();
    return r;
  }
  r.pass = part->is_cluster_point;
  r.metrics["blocks"] = static_cast<double>(part->blocks.size());
  // Largest distance to a pointwise neighbor outside one's own block.
  const auto labels = part->labels();
  const auto g = pointwise_graph(spec, xT);
  for (int i = 0; i < xT.rows(); ++i)
    for (int j : g.out[static_cast<std::size_t>(i)])
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)])
        r.deviation = std::max(r.deviation, distance(xT, i, j));
  return r;
}

Json series(const Trajectory& traj, const std::function<double(const Positions&)>& fn, std::size_t max_points) {
  Json out = Json::array();
  const std::size_t n = traj.samples.size();
  const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
  for (std::size_t k = 0; k < n; k += stride) out.push_back({traj.samples[k].t, fn(traj.samples[k].x)});
  if ((n - 1) % stride != 0) out.push_back({traj.terminal().t, fn(traj.terminal().x)});
  return out;
}

const Expectation* lookup_expectation(const RunConfig& c) {
  if (c.scenario.empty()) return nullptr;
  return &find_scenario(c.scenario).branch(c.scenario_branch).expect;
}

}  // namespace

bool RunResult::passed() const {
  if (!failures.empty()) return false;
  return std::all_of(branches.begin(), branches.end(), [](const BranchOutcome& b) { return b.failures.empty(); });
}

RunResult execute(const RunConfig& config) {
  config.validate();
  RunResult res;
  res.config = config;
  const Configuration x0 = config.initial();
  const ModelSpec& spec = config.spec;
  const InteractionKernel& kernel = config.kernel;
  spec.validate(x0.agents());
  const Expectation* expect = lookup_expectation(config);

  std::vector<PiecewiseTrajectory> trajs;
  if (config.solution == SolutionKind::Caratheodory) {
    CaratheodoryOptions opt;
    opt.start_branch = config.start_branch;
    trajs.push_back(simulate_caratheodory(x0, spec, kernel, config.ctrl, config.horizon, opt));
  } else {
    trajs = simulate_krasovsky(x0, spec, kernel, BranchPolicy::parse(config.policy), config.ctrl, config.horizon);
  }

  res.caratheodory_equilibrium = is_caratheodory_equilibrium(x0.x(), spec, kernel);
  res.krasovsky_equilibrium = zero_in_krasovsky(x0.x(), spec, kernel, 1e-9);
  const bool topo1 = spec.is_topological() && spec.kappa == 1;
  if (topo1) {
    res.pseudoforest = pseudoforest_check(pointwise_graph(spec, x0.x()));
    if (!res.pseudoforest->ok) res.failures.push_back("initial interaction graph is not a pseudoforest");
  }
  if (expect && expect->caratheodory_equilibrium && *expect->caratheodory_equilibrium != res.caratheodory_equilibrium)
    res.failures.push_back("Caratheodory equilibrium test of the initial state disagrees with the expectation");
  if (expect && expect->krasovsky_equilibrium && *expect->krasovsky_equilibrium != res.krasovsky_equilibrium)
    res.failures.push_back("Krasovsky equilibrium test of the initial state disagrees with the expectation");

  const double scale = length_scale(x0.x());
  const bool guaranteed_p1 = spec.is_metric();
  const bool guaranteed_p3 = spec.is_metric() || (topo1 && config.solution == SolutionKind::Caratheodory);
  const bool guaranteed_lyap = guaranteed_p3;

  std::function<double(const Positions&)> lyap_fn;
  std::string lyap_name;
  if (spec.is_metric()) {
    lyap_fn = [&](const Positions& x) { return lyapunov_V_metric(x, kernel, spec.radius); };
    lyap_name = "lyapunov_V";
  } else {
    lyap_fn = [&](const Positions& x) { return lyapunov_W_topological(x, kernel, spec.kappa); };
    lyap_name = "lyapunov_W";
  }

  Json branch_reports = Json::array();
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    BranchOutcome out;
    out.traj = std::move(trajs[k]);
    const Trajectory& path = out.traj.path;
    const Positions& xT = path.terminal().x;
    out.p1 = check_average_invariance(path, 1e-6);
    out.p2 = check_support_contractivity(path, 1e-7, nested_pairs(path, 10));
    out.clusters = detect_convergence(path, spec, kernel);
    out.p3 = cluster_report(out.clusters, xT, spec, kernel);
    out.lyapunov = monitor_monotonicity(path, lyap_fn, 1e-8 * scale, spec.is_metric(), lyap_name);

    const bool root = k == 0;
    if (!out.p2.pass) out.failures.push_back("P2 support contractivity violated");
    if (guaranteed_p1 && !out.p1.pass) out.failures.push_back("P1 average drift " + fmt(out.p1.deviation));
    if (expect && root && expect->terminal) {
      const double err = max_abs_diff(xT, *expect->terminal);
      if (!(err <= expect->tol)) out.failures.push_back("terminal state off by " + fmt(err));
    }
    if (expect && root && expect->cluster_point) {
      if (!out.clusters)
        out.failures.push_back("no convergence detected by the horizon");
      else if (out.clusters->is_cluster_point != *expect->cluster_point)
        out.failures.push_back(*expect->cluster_point ? "terminal state is not a cluster point"
                                                      : "terminal state is unexpectedly a cluster point");
    } else if (guaranteed_p3 && out.clusters && !out.clusters->is_cluster_point) {
      out.failures.push_back("converged to a non-cluster point");
    }
    if (expect && root && expect->lyapunov_monotone) {
      if (out.lyapunov.pass != *expect->lyapunov_monotone)
        out.failures.push_back(lyap_name + (out.lyapunov.pass ? " unexpectedly monotone" : " not monotone"));
    } else if (guaranteed_lyap && !out.lyapunov.pass) {
      out.failures.push_back(lyap_name + " increased by " + fmt(out.lyapunov.deviation));
    }

    Json b;
    b["branch_id"] = out.traj.branch_id;
    b["parent"] = out.traj.parent < 0 ? Json(nullptr) : Json(out.traj.parent);
    b["label"] = out.traj.label;
    b["best_effort"] = out.traj.best_effort;
    b["terminal_time"] = path.terminal().t;
    b["terminal_state"] = positions_to_json(xT);
    b["events"] = path.events.size();
    b["segments"] = out.traj.segments.size();
    b["properties"] = Json::array({property_report_to_json(out.p1), property_report_to_json(out.p2),
                                   property_report_to_json(out.p3), property_report_to_json(out.lyapunov)});
    b["clusters"] = out.clusters ? cluster_partition_to_json(*out.clusters) : Json(nullptr);
    b["lyapunov_series"] = series(path, lyap_fn, 200);
    b["failures"] = out.failures;
    branch_reports.push_back(std::move(b));
    res.branches.push_back(std::move(out));
  }

  Json& r = res.report;
  r["config"] = config.to_json();
  r["initial"] = {{"caratheodory_equilibrium", res.caratheodory_equilibrium},
                  {"krasovsky_equilibrium", res.krasovsky_equilibrium}};
  if (res.pseudoforest)
    r["initial"]["pseudoforest"] = {{"ok", res.pseudoforest->ok},
                                    {"components", res.pseudoforest->components},
                                    {"diagnostics", res.pseudoforest->diagnostics}};
  if (expect) {
    r["expectation"] = {{"origin", expect->origin}, {"note", expect->note}, {"tol", expect->tol}};
    if (expect->terminal) r["expectation"]["terminal"] = positions_to_json(*expect->terminal);
  }
  Json props = Json::array();
  for (const char* name : {"P1_average", "P2_support", "P3_clusters", "lyapunov"}) {
    PropertyReport agg{name == std::string("lyapunov") ? lyap_name : name, true, 0.0, {}, {}};
    for (const auto& b : res.branches) {
      const PropertyReport& p = agg.property == "P1_average"    ? b.p1
                                : agg.property == "P2_support"  ? b.p2
                                : agg.property == "P3_clusters" ? b.p3
                                                                : b.lyapunov;
      agg.pass = agg.pass && p.pass;
      agg.deviation = std::max(agg.deviation, p.deviation);
      for (double t : p.witness_t)
        if (agg.witness_t.size() < 16) agg.witness_t.push_back(t);
    }
    props.push_back(property_report_to_json(agg));
  }
  r["properties"] = props;
  r["branch_count"] = res.branches.size();
  r["non_unique"] = res.branches.size() > 1;
  r["branches"] = branch_reports;
  r["failures"] = res.failures;
  r["pass"] = res.passed();
  return res;
}

void write_outputs(const RunResult& res) {
  const RunConfig& config = res.config;
  if (!config.out_csv.empty()) {
    write_trajectory_csv(config.out_csv, res.branches.front().traj.path);
    for (std::size_t k = 1; k < res.branches.size(); ++k) {
      std::string path = config.out_csv;
      const std::string tag = ".branch" + std::to_string(res.branches[k].traj.branch_id);
      const auto dot = path.rfind('.');
      if (dot != std::string::npos && path.find('/', dot) == std::string::npos)
        path.insert(dot, tag);
      else
        path += tag;
      write_trajectory_csv(path, res.branches[k].traj.path);
    }
  }
  if (!config.report_path.empty()) write_json(config.report_path, res.report);
  if (!config.branches_path.empty()) {
    std::vector<PiecewiseTrajectory> trajs;
    for (const auto& b : res.branches) trajs.push_back(b.traj);
    write_json(config.branches_path, branch_tree_to_json(trajs));
  }
}

int run(const RunConfig& config) {
  const RunResult res = execute(config);
  write_outputs(res);
  return config.strict && !res.passed() ? 2 : 0;
}

Configuration random_configuration(std::mt19937_64& rng, int agents, int dim, double spread) {
  std::uniform_real_distribution<double> u(0.0, spread);
  Positions x(agents, dim);
  for (int i = 0; i < agents; ++i)
    for (int d = 0; d < dim; ++d) x(i, d) = u(rng);
  return Configuration(std::move(x));
}

// ---------------------------------------------------------------------------
// Property matrix

const std::array<const char*, PropertyMatrix::rows> PropertyMatrix::row_names = {
    "metric caratheodory",      "metric krasovsky",       "topological caratheodory",
    "topological krasovsky",    "topological caratheodory k=1", "topological krasovsky k=1"};
const std::array<const char*, PropertyMatrix::cols> PropertyMatrix::col_names = {"P1", "P2", "P3"};

PropertyMatrix PropertyMatrix::expected() {
  PropertyMatrix m;
  m.cell = {{{1, 1, 1}, {1, 1, 1}, {2, 1, 2}, {2, 1, 2}, {2, 1, 1}, {2, 1, 2}}};
  return m;
}

void PropertyMatrix::contribute(const ModelSpec& spec, SolutionKind solution, const BranchOutcome& o) {
  std::vector<int> targets;
  const bool carath = solution == SolutionKind::Caratheodory;
  // A Caratheodory solution is also a Krasovsky solution, and a kappa = 1 run
  // belongs to the general topological class.
  if (spec.is_metric()) {
    targets = carath ? std::vector<int>{0, 1} : std::vector<int>{1};
  } else if (spec.kappa == 1) {
    targets = carath ? std::vector<int>{4, 2, 5, 3} : std::vector<int>{5, 3};
  } else {
    targets = carath ? std::vector<int>{2, 3} : std::vector<int>{3};
  }
  const std::array<int, cols> verdict = {o.p1.pass ? 1 : 2, o.p2.pass ? 1 : 2,
                                         o.clusters ? (o.clusters->is_cluster_point ? 1 : 2) : 0};
  for (int r : targets)
    for (int c = 0; c < cols; ++c) {
      const int v = verdict[static_cast<std::size_t>(c)];
      if (v == 0) continue;
      auto& cellv = cell[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      cellv = std::max(cellv, v);
      ++runs[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
}

std::string PropertyMatrix::render() const {
  std::ostringstream os;
  auto label = [](int v) { return v == 1 ? "Yes" : v == 2 ? "No" : "-"; };
  os << std::string(30, ' ');
  for (const char* c : col_names) os << "  " << c << "    ";
  os << "\n";
  for (int r = 0; r < rows; ++r) {
    std::string name = row_names[static_cast<std::size_t>(r)];
    name.resize(30, ' ');
    os << name;
    for (int c = 0; c < cols; ++c) {
      std::string v = label(cell[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
      v.resize(6, ' ');
      os << "  " << v;
    }
    os << "\n";
  }
  return os.str();
}

Json PropertyMatrix::to_json() const {
  Json j = Json::object();
  for (int r = 0; r < rows; ++r) {
    Json row = Json::object();
    for (int c = 0; c < cols; ++c) {
      const int v = cell[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      row[col_names[static_cast<std::size_t>(c)]] = {
          {"value", v == 1 ? "Yes" : v == 2 ? "No" : "untested"},
          {"runs", runs[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]}};
    }
    j[row_names[static_cast<std::size_t>(r)]] = row;
  }
  return j;
}

// ---------------------------------------------------------------------------
// verify_all

int default_threads() {
  if (const char* env = std::getenv("BC_DYN_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

bool selected(const std::optional<std::string>& filter, const std::string& name) {
  if (!filter) return true;
  std::stringstream ss(*filter);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty() && name.find(item) != std::string::npos) return true;
  return false;
}

struct Task {
  std::string name;
  RunConfig config;
};

}  // namespace

Json VerifySummary::to_json() const {
  Json j;
  Json cs = Json::array();
  for (const auto& c : cases)
    cs.push_back({{"name", c.name}, {"pass", c.pass}, {"branches", c.branches}, {"failures", c.failures}});
  j["cases"] = cs;
  j["matrix"] = matrix.to_json();
  j["matrix_checked"] = matrix_checked;
  j["matrix_mismatches"] = matrix_mismatches;
  j["pass"] = pass;
  return j;
}

VerifySummary verify_all(const VerifyOptions& options) {
  std::vector<Task> tasks;
  for (const auto& p : scenario_presets())
    if (selected(options.filter, p.name))
      for (const auto& b : p.branches) tasks.push_back({p.name + "/" + b.name, config_for_scenario(p, b)});

  if (!options.filter) {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> agents(3, 8);
    std::uniform_int_distribution<int> dims(1, 3);
    for (int k = 0; k < options.random_runs; ++k) {
      RunConfig c;
      c.init = random_configuration(rng, agents(rng), dims(rng), 1.5);
      c.horizon = 15.0;
      c.spec = ModelSpec::metric(1.0);
      c.solution = SolutionKind::Caratheodory;
      tasks.push_back({"random-metric-caratheodory-" + std::to_string(k), c});
      c.solution = SolutionKind::Krasovsky;
      tasks.push_back({"random-metric-krasovsky-" + std::to_string(k), c});
      c.init = random_configuration(rng, agents(rng), dims(rng), 4.0);
      c.spec = ModelSpec::topological(1);
      c.solution = SolutionKind::Caratheodory;
      tasks.push_back({"random-topological-k1-" + std::to_string(k), c});
    }
  }

  VerifySummary summary;
  summary.cases.resize(tasks.size());
  std::vector<std::vector<BranchOutcome>> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks.size(); k = next++) {
      VerifyCase& vc = summary.cases[k];
      vc.name = tasks[k].name;
      try {
        RunResult res = execute(tasks[k].config);
        vc.failures = res.failures;
        for (const auto& b : res.branches)
          for (const auto& f : b.failures) vc.failures.push_back(b.traj.label + ": " + f);
        vc.branches = static_cast<int>(res.branches.size());
        vc.pass = res.passed();
        outcomes[k] = std::move(res.branches);
      } catch (const std::exception& e) {
        vc.failures.push_back(e.what());
        vc.pass = false;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(options.threads > 0 ? options.threads : default_threads(),
                                                static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t k = 0; k < tasks.size(); ++k) {
    for (const auto& b : outcomes[k]) summary.matrix.contribute(tasks[k].config.spec, tasks[k].config.solution, b);
    summary.pass = summary.pass && summary.cases[k].pass;
  }

  summary.matrix_checked = !options.filter.has_value();
  if (summary.matrix_checked) {
    const auto want = PropertyMatrix::expected();
    for (int r = 0; r < PropertyMatrix::rows; ++r)
      for (int c = 0; c < PropertyMatrix::cols; ++c) {
        const auto rr = static_cast<std::size_t>(r);
        const auto cc = static_cast<std::size_t>(c);
        if (summary.matrix.cell[rr][cc] != want.cell[rr][cc])
          summary.matrix_mismatches.push_back(std::string(PropertyMatrix::row_names[rr]) + " " +
                                              PropertyMatrix::col_names[cc]);
      }
    summary.pass = summary.pass && summary.matrix_mismatches.empty();
  }
  return summary;
}

}  // namespace bcdyn
