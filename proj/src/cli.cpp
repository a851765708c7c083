#include "pfcc/cli.hpp"

#include <iomanip>
#include <random>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

const char* const kLibraryVersion = "1.0.0";

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const SchemaError&) {
    return kExitSchema;
  } catch (const AssumptionError&) {
    return kExitAssumption;
  } catch (const PersistentExcitationError&) {
    return kExitExcitation;
  } catch (const ConvergenceError&) {
    return kExitNoConvergence;
  } catch (...) {
    return kExitFailure;
  }
}

void write_trace_csv(std::ostream& os, const TraceLog& trace) {
  os << "tick";
  for (const auto& nm : trace.leader_names) os << ",formation_" << nm;
  for (const auto& nm : trace.follower_names) os << ",containment_" << nm;
  for (const auto& nm : trace.leader_names) os << ",observer_" << nm;
  for (const auto& nm : trace.follower_names) os << ",observer_" << nm;
  const bool states = !trace.records.empty() && !trace.records.front().leader_states.empty();
  if (states) {
    const auto& r0 = trace.records.front();
    for (size_t q = 0; q < trace.leader_names.size(); ++q)
      for (Eigen::Index k = 0; k < r0.leader_states[q].size(); ++k) os << ",x_" << trace.leader_names[q] << '_' << k;
    for (size_t i = 0; i < trace.follower_names.size(); ++i)
      for (Eigen::Index k = 0; k < r0.follower_states[i].size(); ++k) os << ",x_" << trace.follower_names[i] << '_' << k;
  }
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace.records) {
    os << r.tick;
    for (double v : r.formation_error) os << ',' << v;
    for (double v : r.containment_error) os << ',' << v;
    for (double v : r.leader_observer_error) os << ',' << v;
    for (double v : r.follower_observer_error) os << ',' << v;
    if (states) {
      for (const auto& x : r.leader_states)
        for (Eigen::Index k = 0; k < x.size(); ++k) os << ',' << x(k);
      for (const auto& x : r.follower_states)
        for (Eigen::Index k = 0; k < x.size(); ++k) os << ',' << x(k);
    }
    os << '\n';
  }
}

nlohmann::json run_metadata(const ScenarioConfig& cfg, const World* world, const std::string& status) {
  nlohmann::json meta;
  meta["library_version"] = kLibraryVersion;
  meta["config_hash"] = config_hash(cfg);
  meta["scenario"] = cfg.name;
  meta["seed"] = cfg.sim.seed;
  meta["mode"] = to_string(cfg.sim.mode);
  meta["horizon"] = cfg.sim.horizon;
  meta["sample_interval"] = cfg.sim.sample_interval;
  meta["status"] = status;
  if (world) {
    meta["ticks_completed"] = world->tick();
    meta["propagation"] = {{"rounds_with_changes", world->propagation_rounds()},
                           {"settled_tick", world->sets_settled_tick()}};
    nlohmann::json agents = nlohmann::json::array();
    auto summarise = [&](const std::string& name, const AgentController& c, const std::vector<int>& members) {
      nlohmann::json a;
      a["agent"] = name;
      a["has_gain"] = c.has_gain;
      a["converged_ticks"] = c.converged_ticks;
      a["converged_iterations"] = c.converged_iterations;
      a["learner_iterations"] = c.learner.iterations;
      std::vector<std::string> names;
      for (int q : members) names.push_back(cfg.leaders[q].name);
      if (!members.empty()) a["influential_leaders"] = names;
      agents.push_back(a);
    };
    for (size_t q = 0; q < cfg.leaders.size(); ++q)
      summarise(cfg.leaders[q].name, world->leader_controller(static_cast<int>(q)), {});
    for (size_t i = 0; i < cfg.followers.size(); ++i)
      summarise(cfg.followers[i].name, world->follower_controller(static_cast<int>(i)),
                world->follower_controller(static_cast<int>(i)).members);
    meta["agents"] = agents;
  }
  return meta;
}

namespace {

struct Problem {
  std::string name;
  AugmentedSystem sys;
  Eigen::MatrixXd behavior;  // m×dim
};

std::vector<Problem> problems(const ScenarioConfig& cfg) {
  std::vector<Problem> out;
  const int n = cfg.n;
  for (const auto& L : cfg.leaders) {
    Problem p{L.name, build_leader_augmented(L.dyn, L.form, cfg.A0, L.Q), {}};
    p.behavior = Eigen::MatrixXd::Zero(L.dyn.m(), p.sys.dim());
    p.behavior.leftCols(n) = L.behavior_gain;
    out.push_back(std::move(p));
  }
  const FixedPoint fp = propagation_fixed_point(init_knowledge(cfg.topology, cfg.schedule.entries.front().theta),
                                                cfg.topology);
  for (size_t i = 0; i < cfg.followers.size(); ++i) {
    const auto& F = cfg.followers[i];
    const auto& k = fp.knowledge.followers[i];
    std::vector<FormationDynamics> forms;
    std::vector<double> alpha;
    for (int q : k.influential) {
      forms.push_back(cfg.leaders[q].form);
      alpha.push_back(k.alpha[q]);
    }
    Problem p{F.name, build_follower_augmented(F.dyn, forms, cfg.A0, alpha, F.Q), {}};
    p.behavior = Eigen::MatrixXd::Zero(F.dyn.m(), p.sys.dim());
    p.behavior.leftCols(n) = F.behavior_gain;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<GainComparison> compare_gains(const ScenarioConfig& cfg, const CompareOptions& opt) {
  std::vector<GainComparison> out;
  LearnerConfig lc = cfg.learner;
  lc.pe_policy = PePolicy::kStrict;
  std::uint64_t stream = 0;
  for (const Problem& p : problems(cfg)) {
    GainComparison row;
    row.agent = p.name;
    const ViResult oracle = riccati_value_iteration(p.sys);
    if (opt.oracle_against_itself) {
      row.iterations = oracle.iterations;
      row.converged = true;
      out.push_back(row);
      continue;
    }
    AugmentedSystem learner_view = p.sys;
    learner_view.Q = opt.q_scale * p.sys.Q;
    try {
      // Collect one window of exploratory transitions from the true system.
      const int dim = p.sys.dim(), m = p.sys.inputs();
      const int w = lc.window ? lc.window : default_window(dim, m);
      DataBuffer buf(dim, m, w);
      std::seed_seq seq{static_cast<std::uint32_t>(cfg.sim.seed), static_cast<std::uint32_t>(stream), 0xc0ffeeu};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd X(dim);
      long t = 0;
      while (!buf.full()) {
        if (t % opt.episode_length == 0)
          for (int k = 0; k < dim; ++k) X(k) = opt.state_scale * gauss(rng);
        const Eigen::VectorXd u =
            p.behavior * X + exploration_noise(lc, m, t, 5000 + stream, LearnerStatus::kCollecting);
        const Eigen::VectorXd Xn = p.sys.A_bar * X + p.sys.B_bar * u;
        buf.record(X, u, Xn);
        X = Xn;
        ++t;
      }
      LearnedController c = LearnedController::start(dim, m);
      while (c.status != LearnerStatus::kConverged && c.iterations < lc.max_iterations)
        c = learning_tick(c, buf, learner_view.Q, learner_view.C, p.sys.n, lc);
      row.iterations = c.iterations;
      row.converged = c.status == LearnerStatus::kConverged;
      const ViResult at_j = riccati_value_iteration_steps(p.sys, c.iterations);
      row.K_gap = (c.K_hat - oracle.K).norm() / std::max(oracle.K.norm(), 1e-300);
      row.P_gap = (c.P_hat - at_j.P).norm() / std::max(at_j.P.norm(), 1e-300);
      if (!row.converged) row.note = "learner did not converge";
    } catch (const Error& e) {
      row.note = e.what();
      row.K_gap = row.P_gap = std::numeric_limits<double>::infinity();
    }
    out.push_back(row);
    ++stream;
  }
  return out;
}

}  // namespace pfcc
