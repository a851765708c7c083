#include "pfcc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pfcc/cli.hpp"
#include "pfcc/errors.hpp"
#include "test_util.hpp"

namespace pfcc {
namespace {

using nlohmann::json;

json HexagonDoc() {
  std::ifstream in(test::scenario_path("hexagon.json"));
  return json::parse(in);
}

const AssumptionReport::Item& Find(const AssumptionReport& r, const std::string& prefix) {
  for (const auto& it : r.items)
    if (it.name.rfind(prefix, 0) == 0) return it;
  throw std::runtime_error("no item " + prefix);
}

GTEST_TEST(ScenarioTest, HexagonLoads) {
  const ScenarioConfig cfg = test::hexagon();
  EXPECT_EQ(cfg.name, "hexagon");
  EXPECT_EQ(cfg.n, 2);
  ASSERT_EQ(cfg.leaders.size(), 6u);
  ASSERT_EQ(cfg.followers.size(), 4u);
  EXPECT_EQ(cfg.leader_index("L3"), 2);
  EXPECT_EQ(cfg.follower_index("F4"), 3);
  EXPECT_EQ(cfg.leader_index("F4"), -1);
  EXPECT_EQ(cfg.leaders[2].dyn.m(), 3);
  EXPECT_EQ(cfg.leaders[0].form.h0, (Eigen::VectorXd(2) << 2, 0).finished());
  EXPECT_EQ(cfg.schedule.entries.size(), 2u);
  EXPECT_EQ(cfg.schedule.entries[1].tick, 4000);
  EXPECT_EQ(cfg.schedule.entries[1].theta[0], 0.5);
  EXPECT_EQ(cfg.observers.leader_tracking.xi, 4);
  EXPECT_EQ(cfg.observers.leader_tracking.coupling, 8);
  EXPECT_EQ(cfg.observers.leader_tracking.consensus, 0.7);
  EXPECT_EQ(cfg.sim.horizon, 8000);
  EXPECT_EQ(cfg.sim.sample_interval, 40);
  EXPECT_EQ(cfg.sim.mode, Mode::kDataDriven);
  EXPECT_TRUE(check_assumptions(cfg).pass()) << check_assumptions(cfg).summary();
}

GTEST_TEST(ScenarioTest, RoundTrip) {
  const ScenarioConfig cfg = test::hexagon();
  const json doc = scenario_to_json(cfg);
  const ScenarioConfig again = scenario_from_json(doc);
  EXPECT_EQ(scenario_to_json(again), doc);
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  EXPECT_EQ(config_hash(cfg).size(), 16u);
  EXPECT_EQ(again.topology.full_adjacency(), cfg.topology.full_adjacency());

  ScenarioConfig changed = cfg;
  changed.sim.seed = 99;
  EXPECT_NE(config_hash(changed), config_hash(cfg));
}

GTEST_TEST(ScenarioTest, SchemaErrors) {
  {
    json d = HexagonDoc();
    d["colour"] = "red";
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  {
    json d = HexagonDoc();
    d["leaders"][1]["mass"] = 1;
    try {
      scenario_from_json(d);
      FAIL();
    } catch (const SchemaError& e) {
      EXPECT_NE(std::string(e.what()).find("$.leaders[1]"), std::string::npos) << e.what();
    }
  }
  {
    json d = HexagonDoc();
    d["leaders"][0]["A"] = json::array({json::array({0, 1}), json::array({1})});
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  {
    json d = HexagonDoc();
    d.erase("edges");
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  {
    json d = HexagonDoc();
    d["edges"].push_back({{"from", "F1"}, {"to", "L1"}, {"weight", 1}});
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  {
    json d = HexagonDoc();
    d["propensity"][0]["values"].erase("L6");
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  {
    json d = HexagonDoc();
    d["simulation"]["mode"] = "fastest";
    EXPECT_THROW(scenario_from_json(d), SchemaError);
  }
  EXPECT_THROW(load_scenario(test::scenario_path("does_not_exist.json")), Error);
}

GTEST_TEST(ScenarioTest, ModeNames) {
  for (Mode m : {Mode::kDataDriven, Mode::kModelBasedOracle, Mode::kFccBaseline})
    EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_EQ(to_string(Mode::kModelBasedOracle), "model_based_oracle");
  EXPECT_THROW(parse_mode("oracle"), SchemaError);
}

GTEST_TEST(AssumptionTest, IsolatedFollower) {
  json d = HexagonDoc();
  json kept = json::array();
  for (const auto& e : d["edges"])
    if (e["to"] != "F3" && e["from"] != "F3") kept.push_back(e);
  d["edges"] = kept;
  const AssumptionReport r = check_assumptions(scenario_from_json(d));
  EXPECT_FALSE(r.pass());
  const auto& topo = Find(r, "topology");
  EXPECT_FALSE(topo.pass);
  EXPECT_NE(topo.detail.find("F3"), std::string::npos) << topo.detail;
}

GTEST_TEST(AssumptionTest, NonPositivePropensity) {
  for (double bad : {0.0, -0.1}) {
    json d = HexagonDoc();
    d["propensity"][1]["values"]["L2"] = bad;
    const AssumptionReport r = check_assumptions(scenario_from_json(d));
    EXPECT_FALSE(r.pass());
    EXPECT_FALSE(Find(r, "propensity").pass);
    EXPECT_TRUE(Find(r, "topology").pass);
  }
}

// Companion-form plants cannot hold a constant offset, so the static
// formation variant is rejected up front.
GTEST_TEST(AssumptionTest, StaticFormationUnsolvable) {
  const ScenarioConfig cfg = load_scenario(test::scenario_path("hexagon_static.json"));
  const AssumptionReport r = check_assumptions(cfg);
  EXPECT_FALSE(r.pass());
  const auto& reg = Find(r, "regulator");
  EXPECT_FALSE(reg.pass);
  EXPECT_NE(reg.detail.find("L1"), std::string::npos);
  EXPECT_NE(reg.detail.find("F3"), std::string::npos);
  EXPECT_TRUE(Find(r, "topology").pass);
}

GTEST_TEST(AssumptionTest, UnstableFormation) {
  json d = HexagonDoc();
  d["leaders"][3]["S"] = json::array({json::array({0, 2}), json::array({2, 0})});
  const AssumptionReport r = check_assumptions(scenario_from_json(d));
  EXPECT_FALSE(Find(r, "formation").pass);
  EXPECT_NE(r.summary().find("[FAIL]"), std::string::npos);
}

GTEST_TEST(CliTest, ExitCodes) {
  auto code = [](auto thrower) {
    try {
      thrower();
    } catch (...) {
      return exit_code_for_current_exception();
    }
    return -1;
  };
  EXPECT_EQ(code([] { throw SchemaError("x"); }), kExitSchema);
  EXPECT_EQ(code([] { throw AssumptionError("x"); }), kExitAssumption);
  EXPECT_EQ(code([] { throw PersistentExcitationError("x"); }), kExitExcitation);
  EXPECT_EQ(code([] { throw ConvergenceError("x"); }), kExitNoConvergence);
  EXPECT_EQ(code([] { throw std::runtime_error("x"); }), kExitFailure);
}

GTEST_TEST(CliTest, TraceCsv) {
  ScenarioConfig cfg = test::hexagon();
  cfg.sim.horizon = 81;
  cfg.sim.mode = Mode::kModelBasedOracle;
  std::ostringstream os;
  write_trace_csv(os, run(cfg));
  std::istringstream in(os.str());
  std::string header, line;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("tick,formation_L1,", 0), 0u) << header;
  EXPECT_NE(header.find("containment_F4"), std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(header.begin(), header.end(), ','));
  }
  EXPECT_EQ(rows, 3);  // ticks 0, 40, 80

  const json meta = run_metadata(cfg, nullptr, "ok");
  EXPECT_EQ(meta.at("status"), "ok");
}

}  // namespace
}  // namespace pfcc
