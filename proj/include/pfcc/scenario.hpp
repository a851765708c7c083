#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pfcc/learning.hpp"
#include "pfcc/model_control.hpp"
#include "pfcc/observers.hpp"
#include "pfcc/propagation.hpp"
#include "pfcc/topology.hpp"

namespace pfcc {

enum class Mode { kDataDriven, kModelBasedOracle, kFccBaseline };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);

struct LeaderSpec {
  std::string name;
  AgentDynamics dyn;
  FormationDynamics form;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd behavior_gain;  // m×n plant feedback used while exploring
  Eigen::VectorXd x0;
};

struct FollowerSpec {
  std::string name;
  AgentDynamics dyn;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd behavior_gain;
  Eigen::VectorXd x0;
};

struct ObserverSettings {
  ObserverConfig leader_tracking;
  ObserverConfig follower_tracking;
  std::vector<ObserverConfig> formation;  // one per target leader
  // Initial state estimates: "zero" or "random" (uniform in a ball of
  // `init_radius`, drawn from the run seed).  Model estimates start at 0.
  std::string init = "zero";
  double init_radius = 1.0;
};

struct SimulationSettings {
  long horizon = 8000;
  long sample_interval = 40;
  std::uint64_t seed = 1;
  Mode mode = Mode::kDataDriven;
  long learning_start = 0;   // tick at which exploration and data collection begin
  bool record_states = false;
};

struct ScenarioConfig {
  std::string name;
  int n = 0;                 // common state dimension
  Eigen::MatrixXd A0;
  Eigen::VectorXd tracking_x0;
  DirectedTopology topology;
  std::vector<LeaderSpec> leaders;
  std::vector<FollowerSpec> followers;
  PropensitySchedule schedule;
  ObserverSettings observers;
  LearnerConfig learner;
  SimulationSettings sim;

  int leader_index(const std::string& name) const;    // -1 if absent
  int follower_index(const std::string& name) const;  // -1 if absent
};

// Throws SchemaError (with the offending JSON path) on malformed documents
// and unknown keys.  Modelling assumptions are *not* checked here.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

ScenarioConfig load_scenario(const std::string& path);

// Assumption checks on a parsed scenario.
struct AssumptionReport {
  struct Item {
    std::string name;
    bool pass = true;
    std::string detail;
  };
  std::vector<Item> items;
  bool pass() const;
  std::string summary() const;
};

AssumptionReport check_assumptions(const ScenarioConfig& cfg);

// 64-bit FNV-1a of the canonical JSON form; identifies a configuration.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace pfcc
