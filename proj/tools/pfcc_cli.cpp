// Command-line front end: validate | run | compare-gains.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pfcc/cli.hpp"
#include "pfcc/errors.hpp"
#include "pfcc/scenario.hpp"
#include "pfcc/simulation.hpp"

namespace fs = std::filesystem;
using namespace pfcc;

namespace {

int cmd_validate(const std::string& path) {
  const ScenarioConfig cfg = load_scenario(path);
  const AssumptionReport rep = check_assumptions(cfg);
  std::cout << "scenario: " << (cfg.name.empty() ? path : cfg.name) << '\n' << rep.summary();
  if (rep.pass()) {
    const FixedPoint fp = propagation_fixed_point(
        init_knowledge(cfg.topology, cfg.schedule.entries.front().theta), cfg.topology);
    std::cout << "influential leader sets settle after " << fp.iterations << " rounds\n";
    for (size_t i = 0; i < cfg.followers.size(); ++i) {
      std::cout << "  " << cfg.followers[i].name << ": {";
      bool first = true;
      for (int q : fp.knowledge.followers[i].influential) {
        std::cout << (first ? "" : ", ") << cfg.leaders[q].name;
        first = false;
      }
      std::cout << "}\n";
    }
  }
  std::cout << (rep.pass() ? "PASS\n" : "FAIL\n");
  return rep.pass() ? kExitOk : kExitAssumption;
}

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  std::optional<std::string> mode;
  std::optional<long> sample_interval;
  std::string out = "pfcc_out";
};

int cmd_run(const std::string& path, const RunFlags& f) {
  ScenarioConfig cfg = load_scenario(path);
  if (f.seed) cfg.sim.seed = cfg.learner.rng_seed = *f.seed;
  if (f.horizon) {
    if (*f.horizon < 0) throw SchemaError("--horizon must be nonnegative");
    cfg.sim.horizon = *f.horizon;
  }
  if (f.mode) cfg.sim.mode = parse_mode(*f.mode);
  if (f.sample_interval) {
    if (*f.sample_interval <= 0) throw SchemaError("--sample-interval must be positive");
    cfg.sim.sample_interval = *f.sample_interval;
  }
  const AssumptionReport rep = check_assumptions(cfg);
  if (!rep.pass()) {
    std::cerr << rep.summary();
    throw AssumptionError("scenario violates a modelling assumption; see report above");
  }

  fs::create_directories(f.out);
  const fs::path trace_path = fs::path(f.out) / "trace.csv";
  const fs::path meta_path = fs::path(f.out) / "metadata.json";

  World world(cfg);
  int code = kExitOk;
  std::string status = "completed";
  try {
    world.run_until(cfg.sim.horizon);
  } catch (const Error& e) {
    code = exit_code_for_current_exception();
    status = std::string("aborted: ") + e.what();
    std::cerr << "error: " << e.what() << '\n';
  }
  {
    std::ofstream os(trace_path);
    write_trace_csv(os, world.trace());
  }
  {
    std::ofstream os(meta_path);
    os << std::setw(2) << run_metadata(cfg, &world, status) << '\n';
  }
  std::cout << "wrote " << trace_path.string() << " (" << world.trace().records.size() << " rows) and "
            << meta_path.string() << '\n';
  return code;
}

int cmd_compare(const std::string& path, CompareOptions opt) {
  const ScenarioConfig cfg = load_scenario(path);
  const auto rows = compare_gains(cfg, opt);
  std::cout << std::left << std::setw(8) << "agent" << std::setw(8) << "iters" << std::setw(14) << "K rel gap"
            << std::setw(14) << "P rel gap" << "status\n";
  bool ok = true;
  for (const auto& r : rows) {
    const bool pass = r.converged && r.K_gap < 1e-3 && r.P_gap < 1e-3;
    ok = ok && pass;
    std::cout << std::setw(8) << r.agent << std::setw(8) << r.iterations << std::setw(14) << std::scientific
              << std::setprecision(3) << r.K_gap << std::setw(14) << r.P_gap << std::defaultfloat
              << (pass ? "ok" : "MISMATCH") << (r.note.empty() ? "" : "  (" + r.note + ")") << '\n';
  }
  return ok ? kExitOk : kExitNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propensity formation-containment simulator"};
  app.require_subcommand(1);

  std::string path;
  auto* validate = app.add_subcommand("validate", "Check a scenario's schema and modelling assumptions");
  validate->add_option("scenario", path, "Scenario JSON file")->required();

  RunFlags flags;
  auto* run = app.add_subcommand("run", "Simulate a scenario and export the trace");
  run->add_option("scenario", path, "Scenario JSON file")->required();
  run->add_option("--seed", flags.seed, "Override the random seed");
  run->add_option("--horizon", flags.horizon, "Override the number of ticks");
  run->add_option("--mode", flags.mode, "data_driven | model_based_oracle | fcc_baseline");
  run->add_option("--out", flags.out, "Output directory")->capture_default_str();
  run->add_option("--sample-interval", flags.sample_interval, "Trace sampling interval in ticks");

  CompareOptions copt;
  auto* compare = app.add_subcommand("compare-gains", "Learn gains from data and compare with the model oracle");
  compare->add_option("scenario", path, "Scenario JSON file")->required();
  compare->add_flag("--oracle-self", copt.oracle_against_itself, "Compare the oracle with itself (sanity check)");
  compare->add_option("--q-scale", copt.q_scale, "Scale the learner's Q (negative control)");
  compare->add_option("--episode-length", copt.episode_length, "Ticks between random state resets")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(path);
    if (*run) return cmd_run(path, flags);
    if (*compare) return cmd_compare(path, copt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_current_exception();
  }
  return kExitFailure;
}
