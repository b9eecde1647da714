// bc-dyn: simulate bounded-confidence dynamics and check their properties.

#include "bcdyn/errors.hpp"
#include "bcdyn/run.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

using namespace bcdyn;

namespace {

std::string show(const Positions& x) {
  std::ostringstream os;
  os << std::setprecision(6) << "(";
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (i) os << ", ";
    if (x.cols() == 1) {
      os << x(i, 0);
      continue;
    }
    os << "(";
    for (Eigen::Index d = 0; d < x.cols(); ++d) os << (d ? "," : "") << x(i, d);
    os << ")";
  }
  return os.str() + ")";
}

// A file path, a JSON positions array, or a comma-separated list of 1-D opinions.
Configuration parse_init(const std::string& text) {
  if (std::filesystem::exists(text)) return load_configuration(text);
  if (!text.empty() && (text.front() == '[' || text.front() == '{')) {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("invalid inline configuration: ") + e.what());
    }
    return j.is_object() ? configuration_from_json(j) : Configuration(positions_from_json(j));
  }
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("'" + text + "' is neither a file nor a list of numbers");
    }
  }
  return Configuration::on_line(v);
}

void print_run(const RunResult& res, std::ostream& os) {
  for (const auto& b : res.branches) {
    os << "branch " << b.traj.branch_id << " [" << b.traj.label << "] t=" << b.traj.terminal().t
       << " terminal " << show(b.traj.terminal().x) << "\n";
    for (const auto* p : {&b.p1, &b.p2, &b.p3, &b.lyapunov})
      os << "  " << std::left << std::setw(12) << p->property << (p->pass ? "pass" : "FAIL")
         << "  deviation " << p->deviation << "\n";
    if (b.clusters) os << "  clusters " << b.clusters->blocks.size() << (b.clusters->is_cluster_point ? " (cluster point)\n" : " (not a cluster point)\n");
    for (const auto& f : b.failures) os << "  check failed: " << f << "\n";
  }
  for (const auto& f : res.failures) os << "check failed: " << f << "\n";
}

void list_scenarios(std::ostream& os) {
  for (const auto& p : scenario_presets()) {
    os << p.name << "  " << p.title << "\n";
    os << "  model " << p.spec.to_string() << ", kernel " << p.kernel.to_string() << ", N=" << p.initial.agents()
       << ", n=" << p.initial.dim() << ", horizon " << p.horizon << "\n";
    os << "  x0 " << show(p.initial.x()) << "\n";
    for (const auto& b : p.branches) {
      os << "  - " << b.name << ": " << to_string(b.solution);
      if (b.solution == SolutionKind::Krasovsky) os << " policy " << (b.policy.empty() ? "default" : b.policy);
      else if (b.start_branch) os << " start option " << b.start_branch;
      if (b.expect.terminal) os << " -> " << show(*b.expect.terminal);
      if (b.expect.cluster_point) os << (*b.expect.cluster_point ? ", cluster point" : ", not a cluster point");
      if (b.expect.lyapunov_monotone) os << (*b.expect.lyapunov_monotone ? ", Lyapunov monotone" : ", Lyapunov increasing");
      if (b.expect.krasovsky_equilibrium) os << ", Krasovsky equilibrium";
      if (b.expect.caratheodory_equilibrium && *b.expect.caratheodory_equilibrium) os << ", Caratheodory equilibrium";
      os << " [" << b.expect.origin << "]";
      if (!b.expect.note.empty()) os << "  (" << b.expect.note << ")";
      os << "\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-confidence opinion dynamics: Caratheodory and Krasovsky solutions"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "simulate one configuration or preset");
  std::string model, kernel, init, scenario, solution, policy, branch, out, report, branches_out, config_in,
      config_out;
  int kappa = 0;
  double tmax = 0.0, dt = 0.0;
  bool strict = false;
  run_cmd->add_option("--model", model, "metric[:radius] or topological[:kappa]");
  run_cmd->add_option("--kappa", kappa, "neighbor count for the topological model");
  run_cmd->add_option("--kernel", kernel, "constant:<c> or affsat:<c0>,<slope>,<cap>");
  run_cmd->add_option("--init", init, "configuration JSON file, JSON positions array, or 1-D list 'a,b,c'");
  run_cmd->add_option("--scenario", scenario, "preset name (see 'bc-dyn list')");
  run_cmd->add_option("--solution", solution, "caratheodory or krasovsky");
  run_cmd->add_option("--policy", policy, "Krasovsky branch policy: default, enumerate[:T,...], slide, slide@T,...");
  run_cmd->add_option("--branch", branch, "preset branch name, or Caratheodory start option index");
  run_cmd->add_option("--tmax", tmax, "time horizon");
  run_cmd->add_option("--dt", dt, "RK4 step");
  run_cmd->add_option("--out", out, "trajectory CSV");
  run_cmd->add_option("--report", report, "report JSON");
  run_cmd->add_option("--branches-out", branches_out, "branch tree JSON");
  run_cmd->add_flag("--strict", strict, "exit 2 when a property or expectation check fails");
  run_cmd->add_option("--config", config_in, "run config JSON (flags override it)");
  run_cmd->add_option("--write-config", config_out, "write the resolved run config JSON");

  app.add_subcommand("list", "list scenario presets with expected outcomes");

  auto* verify_cmd = app.add_subcommand("verify-all", "run every preset and the random suites");
  std::optional<std::string> filter;
  int random_runs = 10;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string verify_report;
  verify_cmd->add_option("--filter", filter, "comma-separated substrings of preset names (skips random runs)");
  verify_cmd->add_option("--random", random_runs, "random runs per model family");
  verify_cmd->add_option("--seed", seed, "seed for random instances");
  verify_cmd->add_option("--threads", threads, "worker threads (default BC_DYN_THREADS or all cores)");
  verify_cmd->add_option("--report", verify_report, "summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("list")) {
      list_scenarios(std::cout);
      return 0;
    }

    if (app.got_subcommand("verify-all")) {
      VerifyOptions opt;
      opt.filter = filter;
      opt.random_runs = random_runs;
      opt.seed = seed;
      opt.threads = threads;
      const auto summary = verify_all(opt);
      for (const auto& c : summary.cases) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
        for (const auto& f : c.failures) std::cout << "     " << f << "\n";
      }
      std::cout << "\n" << summary.matrix.render();
      if (summary.matrix_checked)
        std::cout << (summary.matrix_mismatches.empty() ? "property matrix matches the reference table\n"
                                                        : "property matrix differs from the reference table\n");
      for (const auto& m : summary.matrix_mismatches) std::cout << "  mismatch: " << m << "\n";
      if (!verify_report.empty()) write_json(verify_report, summary.to_json());
      std::cout << (summary.pass ? "verify-all: PASS\n" : "verify-all: FAIL\n");
      return summary.pass ? 0 : 2;
    }

    RunConfig cfg;
    if (!config_in.empty()) cfg = RunConfig::from_json(read_json(config_in));
    if (!scenario.empty()) {
      const auto& preset = find_scenario(scenario);
      cfg = config_for_scenario(preset, preset.branch(branch));
    } else if (!branch.empty()) {
      try {
        cfg.start_branch = std::stoi(branch);
      } catch (const std::exception&) {
        throw ConfigError("--branch needs an integer start option without --scenario");
      }
    }
    if (!model.empty()) cfg.spec = ModelSpec::parse(model);
    if (kappa > 0) {
      if (!model.empty() && cfg.spec.is_metric()) throw ConfigError("--kappa only applies to the topological model");
      cfg.spec = ModelSpec::topological(kappa);
    }
    if (!kernel.empty()) cfg.kernel = InteractionKernel::parse(kernel);
    if (!init.empty()) {
      cfg.init = parse_init(init);
      cfg.init_path.clear();
    }
    if (!solution.empty()) cfg.solution = parse_solution(solution);
    if (!policy.empty()) cfg.policy = policy;
    if (tmax > 0.0) cfg.horizon = tmax;
    if (dt > 0.0) cfg.ctrl.h = dt;
    if (!out.empty()) cfg.out_csv = out;
    if (!report.empty()) cfg.report_path = report;
    if (!branches_out.empty()) cfg.branches_path = branches_out;
    if (strict) cfg.strict = true;
    cfg.validate();
    if (!config_out.empty()) write_json(config_out, cfg.to_json());

    const RunResult res = execute(cfg);
    print_run(res, std::cout);
    write_outputs(res);
    return cfg.strict && !res.passed() ? 2 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "bc-dyn: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "bc-dyn: " << e.what() << "\n";
    return 1;
  }
}
