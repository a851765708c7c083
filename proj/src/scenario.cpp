#include "pfcc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

using nlohmann::json;

Mode parse_mode(const std::string& s) {
  if (s == "data_driven") return Mode::kDataDriven;
  if (s == "model_based_oracle") return Mode::kModelBasedOracle;
  if (s == "fcc_baseline") return Mode::kFccBaseline;
  throw SchemaError("unknown mode '" + s + "' (data_driven | model_based_oracle | fcc_baseline)");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kDataDriven: return "data_driven";
    case Mode::kModelBasedOracle: return "model_based_oracle";
    case Mode::kFccBaseline: return "fcc_baseline";
  }
  return "?";
}

int ScenarioConfig::leader_index(const std::string& nm) const {
  for (size_t q = 0; q < leaders.size(); ++q)
    if (leaders[q].name == nm) return static_cast<int>(q);
  return -1;
}

int ScenarioConfig::follower_index(const std::string& nm) const {
  for (size_t i = 0; i < followers.size(); ++i)
    if (followers[i].name == nm) return static_cast<int>(i);
  return -1;
}

namespace {

const char* kTrackingName = "tracking";

// Strict object reader: every key has to be consumed, leftovers are errors.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw SchemaError(path_ + ": expected an object");
  }
  ~Obj() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw SchemaError(path_ + ": unknown key '" + it.key() + "'");
  }
  bool has(const std::string& k) const { return j_.contains(k); }
  const json& at(const std::string& k) {
    if (!j_.contains(k)) throw SchemaError(path_ + ": missing key '" + k + "'");
    used_.insert(k);
    return j_.at(k);
  }
  std::string sub(const std::string& k) const { return path_ + "." + k; }

  double number(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number()) throw SchemaError(sub(k) + ": expected a number");
    return v.get<double>();
  }
  double number(const std::string& k, double fallback) { return has(k) ? number(k) : fallback; }
  long integer(const std::string& k, long fallback) {
    if (!has(k)) return fallback;
    const json& v = at(k);
    if (!v.is_number_integer()) throw SchemaError(sub(k) + ": expected an integer");
    return v.get<long>();
  }
  std::string text(const std::string& k) {
    const json& v = at(k);
    if (!v.is_string()) throw SchemaError(sub(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& k, const std::string& fallback) {
    return has(k) ? text(k) : fallback;
  }
  bool flag(const std::string& k, bool fallback) {
    if (!has(k)) return fallback;
    const json& v = at(k);
    if (!v.is_boolean()) throw SchemaError(sub(k) + ": expected true/false");
    return v.get<bool>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Eigen::MatrixXd to_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path + ": expected a non-empty array of rows");
  const size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw SchemaError(path + ": rows must be non-empty arrays");
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw SchemaError(path + ": row " + std::to_string(r) + " has a different length (ragged matrix)");
    for (size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw SchemaError(path + ": entries must be numbers");
      m(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd to_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw SchemaError(path + ": entries must be numbers");
    v(k) = j[k].get<double>();
  }
  return v;
}

json from_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json from_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

void expect_shape(const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c, const std::string& path) {
  if (m.rows() != r || m.cols() != c)
    throw SchemaError(path + ": expected " + std::to_string(r) + "x" + std::to_string(c) + ", got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

ObserverConfig parse_observer_block(const json& j, const std::string& path, int n, double xi,
                                    double L0) {
  Obj o(j, path);
  ObserverConfig c;
  c.xi = xi;
  c.L0_scale = L0;
  c.coupling = o.number("coupling");
  c.consensus = o.number("consensus");
  c.F = to_matrix(o.at("F"), o.sub("F"));
  expect_shape(c.F, n, n, o.sub("F"));
  return c;
}

json observer_block_json(const ObserverConfig& c) {
  return json{{"coupling", c.coupling}, {"consensus", c.consensus}, {"F", from_matrix(c.F)}};
}

PePolicy parse_pe(const std::string& s, const std::string& path) {
  if (s == "strict") return PePolicy::kStrict;
  if (s == "plant_subspace") return PePolicy::kPlantSubspace;
  throw SchemaError(path + ": unknown excitation policy '" + s + "' (strict | plant_subspace)");
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  ScenarioConfig cfg;
  Obj root(doc, "$");
  cfg.name = root.text("name", "");
  const long n = root.integer("state_dim", 0);
  if (n <= 0) throw SchemaError("$.state_dim: must be a positive integer");
  cfg.n = static_cast<int>(n);

  {
    Obj t(root.at("tracking"), "$.tracking");
    cfg.A0 = to_matrix(t.at("A"), "$.tracking.A");
    expect_shape(cfg.A0, n, n, "$.tracking.A");
    cfg.tracking_x0 = t.has("x0") ? to_vector(t.at("x0"), "$.tracking.x0") : Eigen::VectorXd::Zero(n);
    if (cfg.tracking_x0.size() != n) throw SchemaError("$.tracking.x0: wrong length");
  }

  auto agent_common = [&](Obj& o, const std::string& path, AgentDynamics& dyn, Eigen::MatrixXd& Q,
                          Eigen::MatrixXd& K, Eigen::VectorXd& x0) {
    dyn.A = to_matrix(o.at("A"), path + ".A");
    expect_shape(dyn.A, n, n, path + ".A");
    dyn.B = to_matrix(o.at("B"), path + ".B");
    if (dyn.B.rows() != n) throw SchemaError(path + ".B: must have state_dim rows");
    Q = to_matrix(o.at("Q"), path + ".Q");
    expect_shape(Q, n, n, path + ".Q");
    K = o.has("behavior_gain") ? to_matrix(o.at("behavior_gain"), path + ".behavior_gain")
                               : Eigen::MatrixXd::Zero(dyn.m(), n);
    expect_shape(K, dyn.m(), n, path + ".behavior_gain");
    x0 = o.has("x0") ? to_vector(o.at("x0"), path + ".x0") : Eigen::VectorXd::Zero(n);
    if (x0.size() != n) throw SchemaError(path + ".x0: wrong length");
  };

  std::set<std::string> names{kTrackingName};
  const json& leaders = root.at("leaders");
  if (!leaders.is_array() || leaders.empty()) throw SchemaError("$.leaders: need at least one leader");
  for (size_t q = 0; q < leaders.size(); ++q) {
    const std::string path = "$.leaders[" + std::to_string(q) + "]";
    Obj o(leaders[q], path);
    LeaderSpec L;
    L.name = o.text("name");
    if (!names.insert(L.name).second) throw SchemaError(path + ".name: duplicate agent name '" + L.name + "'");
    agent_common(o, path, L.dyn, L.Q, L.behavior_gain, L.x0);
    L.form.S = to_matrix(o.at("S"), path + ".S");
    expect_shape(L.form.S, n, n, path + ".S");
    L.form.h0 = to_vector(o.at("h0"), path + ".h0");
    if (L.form.h0.size() != n) throw SchemaError(path + ".h0: wrong length");
    cfg.leaders.push_back(std::move(L));
  }
  const json& followers = root.at("followers");
  if (!followers.is_array()) throw SchemaError("$.followers: expected an array");
  for (size_t i = 0; i < followers.size(); ++i) {
    const std::string path = "$.followers[" + std::to_string(i) + "]";
    Obj o(followers[i], path);
    FollowerSpec F;
    F.name = o.text("name");
    if (!names.insert(F.name).second) throw SchemaError(path + ".name: duplicate agent name '" + F.name + "'");
    agent_common(o, path, F.dyn, F.Q, F.behavior_gain, F.x0);
    cfg.followers.push_back(std::move(F));
  }

  const int N = static_cast<int>(cfg.followers.size()), M = static_cast<int>(cfg.leaders.size());
  cfg.topology = DirectedTopology(N, M);
  const json& edges = root.at("edges");
  if (!edges.is_array()) throw SchemaError("$.edges: expected an array");
  for (size_t e = 0; e < edges.size(); ++e) {
    const std::string path = "$.edges[" + std::to_string(e) + "]";
    Obj o(edges[e], path);
    const std::string from = o.text("from"), to = o.text("to");
    const double w = o.number("weight", 1.0);
    if (!(w >= 0.0)) throw SchemaError(path + ".weight: must be nonnegative");
    const int fl = cfg.leader_index(from), ff = cfg.follower_index(from);
    const int tl = cfg.leader_index(to), tf = cfg.follower_index(to);
    if (from == to) throw SchemaError(path + ": self-loop on '" + from + "'");
    if (from == kTrackingName && tl >= 0) {
      cfg.topology.tracking_to_leader(tl) = w;
    } else if (fl >= 0 && tl >= 0) {
      cfg.topology.leader_adjacency(tl, fl) = w;
    } else if (fl >= 0 && tf >= 0) {
      cfg.topology.leader_to_follower(tf, fl) = w;
    } else if (ff >= 0 && tf >= 0) {
      cfg.topology.follower_adjacency(tf, ff) = w;
    } else if (ff >= 0 && tl >= 0) {
      throw SchemaError(path + ": followers never transmit to leaders");
    } else if (from == kTrackingName && tf >= 0) {
      throw SchemaError(path + ": the tracking leader only talks to formation leaders");
    } else {
      throw SchemaError(path + ": unknown endpoint '" + (fl < 0 && ff < 0 && from != kTrackingName ? from : to) + "'");
    }
  }

  const json& prop = root.at("propensity");
  if (!prop.is_array()) throw SchemaError("$.propensity: expected an array");
  for (size_t e = 0; e < prop.size(); ++e) {
    const std::string path = "$.propensity[" + std::to_string(e) + "]";
    Obj o(prop[e], path);
    PropensitySchedule::Entry entry;
    entry.tick = o.integer("tick", -1);
    if (entry.tick < 0) throw SchemaError(path + ".tick: required nonnegative integer");
    entry.theta.assign(M, std::nan(""));
    const json& values = o.at("values");
    if (!values.is_object()) throw SchemaError(path + ".values: expected an object");
    for (auto it = values.begin(); it != values.end(); ++it) {
      const int q = cfg.leader_index(it.key());
      if (q < 0) throw SchemaError(path + ".values: unknown leader '" + it.key() + "'");
      if (!it.value().is_number()) throw SchemaError(path + ".values." + it.key() + ": expected a number");
      entry.theta[q] = it.value().get<double>();
    }
    for (int q = 0; q < M; ++q)
      if (std::isnan(entry.theta[q]))
        throw SchemaError(path + ".values: missing leader '" + cfg.leaders[q].name + "'");
    cfg.schedule.entries.push_back(std::move(entry));
  }

  {
    Obj o(root.at("observers"), "$.observers");
    const double xi = o.number("xi");
    const double L0 = o.number("initial_L_scale");
    cfg.observers.init = o.text("init", "zero");
    if (cfg.observers.init != "zero" && cfg.observers.init != "random")
      throw SchemaError("$.observers.init: expected 'zero' or 'random'");
    cfg.observers.init_radius = o.number("init_radius", 1.0);
    cfg.observers.leader_tracking =
        parse_observer_block(o.at("leader_tracking"), "$.observers.leader_tracking", n, xi, L0);
    cfg.observers.follower_tracking =
        parse_observer_block(o.at("follower_tracking"), "$.observers.follower_tracking", n, xi, L0);
    Obj f(o.at("formation"), "$.observers.formation");
    std::optional<ObserverConfig> fallback;
    if (f.has("default"))
      fallback = parse_observer_block(f.at("default"), "$.observers.formation.default", n, xi, L0);
    for (int q = 0; q < M; ++q) {
      const std::string& nm = cfg.leaders[q].name;
      if (f.has(nm)) {
        cfg.observers.formation.push_back(
            parse_observer_block(f.at(nm), "$.observers.formation." + nm, n, xi, L0));
      } else if (fallback) {
        cfg.observers.formation.push_back(*fallback);
      } else {
        throw SchemaError("$.observers.formation: no settings for leader '" + nm + "' and no default");
      }
    }
  }

  if (root.has("learning")) {
    Obj o(root.at("learning"), "$.learning");
    LearnerConfig& l = cfg.learner;
    l.noise_std = o.number("noise_std", l.noise_std);
    l.gain_delta_threshold = o.number("gain_delta_threshold", l.gain_delta_threshold);
    l.window = static_cast<int>(o.integer("window", l.window));
    l.max_iterations = static_cast<int>(o.integer("max_iterations", l.max_iterations));
    l.pe_policy = parse_pe(o.text("pe_policy", "strict"), "$.learning.pe_policy");
    l.cond_limit = o.number("cond_limit", l.cond_limit);
    l.rank_tol = o.number("rank_tol", l.rank_tol);
    l.relearn_on_alpha_change = o.flag("relearn_on_alpha_change", l.relearn_on_alpha_change);
    cfg.sim.learning_start = o.integer("start_tick", 0);
    if (l.noise_std < 0 || !(l.gain_delta_threshold > 0) || l.window < 0 || l.max_iterations <= 0 ||
        cfg.sim.learning_start < 0)
      throw SchemaError("$.learning: values out of range");
  }

  if (root.has("simulation")) {
    Obj o(root.at("simulation"), "$.simulation");
    cfg.sim.horizon = o.integer("horizon", cfg.sim.horizon);
    cfg.sim.sample_interval = o.integer("sample_interval", cfg.sim.sample_interval);
    cfg.sim.seed = static_cast<std::uint64_t>(o.integer("seed", 1));
    cfg.sim.mode = parse_mode(o.text("mode", "data_driven"));
    cfg.sim.record_states = o.flag("record_states", false);
    if (cfg.sim.horizon < 0 || cfg.sim.sample_interval <= 0)
      throw SchemaError("$.simulation: horizon must be >= 0 and sample_interval > 0");
  }
  cfg.learner.rng_seed = cfg.sim.seed;
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["state_dim"] = cfg.n;
  doc["tracking"] = {{"A", from_matrix(cfg.A0)}, {"x0", from_vector(cfg.tracking_x0)}};
  json leaders = json::array();
  for (const auto& L : cfg.leaders) {
    leaders.push_back({{"name", L.name},
                       {"A", from_matrix(L.dyn.A)},
                       {"B", from_matrix(L.dyn.B)},
                       {"S", from_matrix(L.form.S)},
                       {"h0", from_vector(L.form.h0)},
                       {"Q", from_matrix(L.Q)},
                       {"behavior_gain", from_matrix(L.behavior_gain)},
                       {"x0", from_vector(L.x0)}});
  }
  doc["leaders"] = leaders;
  json followers = json::array();
  for (const auto& F : cfg.followers) {
    followers.push_back({{"name", F.name},
                         {"A", from_matrix(F.dyn.A)},
                         {"B", from_matrix(F.dyn.B)},
                         {"Q", from_matrix(F.Q)},
                         {"behavior_gain", from_matrix(F.behavior_gain)},
                         {"x0", from_vector(F.x0)}});
  }
  doc["followers"] = followers;
  const auto& t = cfg.topology;
  json edges = json::array();
  for (int q = 0; q < t.n_leaders; ++q)
    if (t.tracking_to_leader(q) > 0)
      edges.push_back({{"from", kTrackingName}, {"to", cfg.leaders[q].name}, {"weight", t.tracking_to_leader(q)}});
  for (int q = 0; q < t.n_leaders; ++q)
    for (int m = 0; m < t.n_leaders; ++m)
      if (t.leader_adjacency(q, m) > 0)
        edges.push_back({{"from", cfg.leaders[m].name}, {"to", cfg.leaders[q].name}, {"weight", t.leader_adjacency(q, m)}});
  for (int i = 0; i < t.n_followers; ++i)
    for (int q = 0; q < t.n_leaders; ++q)
      if (t.leader_to_follower(i, q) > 0)
        edges.push_back({{"from", cfg.leaders[q].name}, {"to", cfg.followers[i].name}, {"weight", t.leader_to_follower(i, q)}});
  for (int i = 0; i < t.n_followers; ++i)
    for (int j = 0; j < t.n_followers; ++j)
      if (t.follower_adjacency(i, j) > 0)
        edges.push_back({{"from", cfg.followers[j].name}, {"to", cfg.followers[i].name}, {"weight", t.follower_adjacency(i, j)}});
  doc["edges"] = edges;
  json prop = json::array();
  for (const auto& e : cfg.schedule.entries) {
    json values = json::object();
    for (size_t q = 0; q < e.theta.size(); ++q) values[cfg.leaders[q].name] = e.theta[q];
    prop.push_back({{"tick", e.tick}, {"values", values}});
  }
  doc["propensity"] = prop;
  json formation = json::object();
  for (size_t q = 0; q < cfg.observers.formation.size(); ++q)
    formation[cfg.leaders[q].name] = observer_block_json(cfg.observers.formation[q]);
  doc["observers"] = {{"xi", cfg.observers.leader_tracking.xi},
                      {"initial_L_scale", cfg.observers.leader_tracking.L0_scale},
                      {"init", cfg.observers.init},
                      {"init_radius", cfg.observers.init_radius},
                      {"leader_tracking", observer_block_json(cfg.observers.leader_tracking)},
                      {"follower_tracking", observer_block_json(cfg.observers.follower_tracking)},
                      {"formation", formation}};
  const LearnerConfig& l = cfg.learner;
  doc["learning"] = {{"noise_std", l.noise_std},
                     {"gain_delta_threshold", l.gain_delta_threshold},
                     {"window", l.window},
                     {"max_iterations", l.max_iterations},
                     {"pe_policy", l.pe_policy == PePolicy::kStrict ? "strict" : "plant_subspace"},
                     {"cond_limit", l.cond_limit},
                     {"rank_tol", l.rank_tol},
                     {"relearn_on_alpha_change", l.relearn_on_alpha_change},
                     {"start_tick", cfg.sim.learning_start}};
  doc["simulation"] = {{"horizon", cfg.sim.horizon},
                       {"sample_interval", cfg.sim.sample_interval},
                       {"seed", cfg.sim.seed},
                       {"mode", to_string(cfg.sim.mode)},
                       {"record_states", cfg.sim.record_states}};
  return doc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return scenario_from_json(doc);
}

bool AssumptionReport::pass() const {
  for (const auto& it : items)
    if (!it.pass) return false;
  return true;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  for (const auto& it : items) {
    os << (it.pass ? "[ok]   " : "[FAIL] ") << it.name;
    if (!it.detail.empty()) os << ": " << it.detail;
    os << '\n';
  }
  return os.str();
}

AssumptionReport check_assumptions(const ScenarioConfig& cfg) {
  AssumptionReport rep;
  const int M = static_cast<int>(cfg.leaders.size());

  {
    AssumptionReport::Item it{"topology (reachability from the tracking leader)", true, ""};
    try {
      cfg.topology.validate();
      const ValidationReport v = verify_assumption1(cfg.topology);
      it.pass = v.pass();
      if (!it.pass) {
        std::ostringstream os;
        if (!v.spanning_tree) {
          os << "not reachable from the tracking leader:";
          for (int node : v.unreachable_nodes)
            os << ' '
               << (cfg.topology.is_follower_node(node) ? cfg.followers[node - 1].name
                                                       : cfg.leaders[node - 1 - cfg.topology.n_followers].name);
          os << "; ";
        }
        if (!v.followers_without_leader.empty()) {
          os << "followers with no formation leader upstream:";
          for (int i : v.followers_without_leader) os << ' ' << cfg.followers[i].name;
        }
        it.detail = os.str();
      }
    } catch (const Error& e) {
      it.pass = false;
      it.detail = e.what();
    }
    rep.items.push_back(it);
  }
  {
    AssumptionReport::Item it{"propensity factors positive", true, ""};
    try {
      cfg.schedule.validate(M);
    } catch (const Error& e) {
      it.pass = false;
      it.detail = e.what();
    }
    rep.items.push_back(it);
  }
  {
    AssumptionReport::Item it{"stabilizable agents", true, ""};
    for (const auto& L : cfg.leaders)
      if (!is_stabilizable(L.dyn.A, L.dyn.B)) { it.pass = false; it.detail += L.name + " "; }
    for (const auto& F : cfg.followers)
      if (!is_stabilizable(F.dyn.A, F.dyn.B)) { it.pass = false; it.detail += F.name + " "; }
    rep.items.push_back(it);
  }
  {
    AssumptionReport::Item it{"formation and tracking dynamics marginally stable", true, ""};
    for (const auto& L : cfg.leaders)
      if (spectral_radius(L.form.S) > 1.0 + 1e-9) { it.pass = false; it.detail += L.name + " "; }
    if (spectral_radius(cfg.A0) > 1.0 + 1e-9) { it.pass = false; it.detail += "tracking "; }
    rep.items.push_back(it);
  }
  {
    AssumptionReport::Item it{"regulator equations solvable", true, ""};
    auto check = [&](const std::string& who, const AgentDynamics& d, const Eigen::MatrixXd& S,
                     const std::string& target) {
      try {
        min_norm_regulation_solution(d.A, d.B, S);
      } catch (const AssumptionError&) {
        it.pass = false;
        it.detail += who + " (" + target + ") ";
      }
    };
    for (const auto& L : cfg.leaders) {
      check(L.name, L.dyn, L.form.S, L.name);
      check(L.name, L.dyn, cfg.A0, "tracking");
    }
    // A follower only ever tracks the leaders that can reach it.
    std::vector<std::vector<bool>> reach;
    try {
      reach = cfg.topology.reachability();
    } catch (const Error&) {
      // already reported under topology; check against every leader instead
    }
    for (size_t i = 0; i < cfg.followers.size(); ++i) {
      const auto& F = cfg.followers[i];
      for (int q = 0; q < M; ++q) {
        if (!reach.empty() &&
            !reach[cfg.topology.leader_node(q)][cfg.topology.follower_node(static_cast<int>(i))])
          continue;
        check(F.name, F.dyn, cfg.leaders[q].form.S, cfg.leaders[q].name);
      }
      check(F.name, F.dyn, cfg.A0, "tracking");
    }
    rep.items.push_back(it);
  }
  {
    AssumptionReport::Item it{"observer parameters", true, ""};
    try {
      cfg.observers.leader_tracking.validate(cfg.n);
      cfg.observers.follower_tracking.validate(cfg.n);
      for (const auto& o : cfg.observers.formation) o.validate(cfg.n);
    } catch (const Error& e) {
      it.pass = false;
      it.detail = e.what();
    }
    rep.items.push_back(it);
  }
  return rep;
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string text = scenario_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pfcc
