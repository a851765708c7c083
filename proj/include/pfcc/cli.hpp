#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfcc/scenario.hpp"
#include "pfcc/simulation.hpp"

namespace pfcc {

// Process exit statuses used by the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,        // anything not covered below
  kExitSchema = 2,
  kExitAssumption = 3,
  kExitExcitation = 4,
  kExitNoConvergence = 5,
  kExitUsage = 64,
};

// Maps the exception currently being handled onto an exit status.
int exit_code_for_current_exception();

extern const char* const kLibraryVersion;

// CSV columns: tick, formation_<leader>…, containment_<follower>…,
// observer_<leader>…, observer_<follower>…, then (with record_states)
// x_<agent>_<k>… for leaders and followers.  17 significant digits.
void write_trace_csv(std::ostream& os, const TraceLog& trace);
nlohmann::json run_metadata(const ScenarioConfig& cfg, const World* world, const std::string& status);

struct CompareOptions {
  int episode_length = 2;
  double state_scale = 1.0;
  bool oracle_against_itself = false;
  double q_scale = 1.0;  // ≠ 1 feeds the learner a deliberately wrong Q
};

struct GainComparison {
  std::string agent;
  int iterations = 0;
  bool converged = false;
  double K_gap = 0.0;  // ‖K̂ − K*‖_F / ‖K*‖_F
  double P_gap = 0.0;  // ‖P̂ʲ − Pʲ‖_F / ‖Pʲ‖_F at the learner's final j
  std::string note;
};

// Learn every agent's gain from exploratory data on its true augmented system
// (followers use the fixed-point sets and the first propensity entry) and
// compare against model-based value iteration.
std::vector<GainComparison> compare_gains(const ScenarioConfig& cfg, const CompareOptions& opt = {});

}  // namespace pfcc
