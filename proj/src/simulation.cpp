#include "pfcc/simulation.hpp"

#include <cmath>
#include <random>
#include <string>

#include "pfcc/errors.hpp"
#include "pfcc/matops.hpp"

namespace pfcc {

Eigen::VectorXd formation_error(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& xo) {
  return x - h - xo;
}

Eigen::VectorXd containment_error(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& h,
                                  const Eigen::VectorXd& xo, const std::vector<double>& alpha) {
  if (h.size() != alpha.size()) throw DimensionError("containment_error: one α per leader expected");
  Eigen::VectorXd e = x;
  for (size_t q = 0; q < h.size(); ++q)
    if (alpha[q] != 0.0) e -= alpha[q] * (h[q] + xo);
  return e;
}

namespace {

constexpr std::uint64_t kLeaderNoise = 1000, kFollowerNoise = 2000;
constexpr std::uint64_t kTrackingInit = 10000, kFormationInit = 20000;

// Rethrow a library error with where/when it happened, keeping its type.
[[noreturn]] void rethrow_with(const std::string& where) {
  try {
    throw;
  } catch (const SchemaError& e) {
    throw SchemaError(where + e.what());
  } catch (const AssumptionError& e) {
    throw AssumptionError(where + e.what());
  } catch (const PersistentExcitationError& e) {
    throw PersistentExcitationError(where + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(where + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(where + e.what());
  } catch (const Error& e) {
    throw Error(where + e.what());
  }
}

}  // namespace

World::World(const ScenarioConfig& cfg) : cfg_(cfg) {
  cfg_.topology.validate();
  const int N = cfg_.topology.n_followers, M = cfg_.topology.n_leaders;
  if (static_cast<int>(cfg_.leaders.size()) != M || static_cast<int>(cfg_.followers.size()) != N)
    throw DimensionError("agent lists disagree with the topology");
  if (static_cast<int>(cfg_.observers.formation.size()) != M)
    throw DimensionError("one formation observer setting per leader expected");
  cfg_.schedule.validate(M);
  know_ = init_knowledge(cfg_.topology, cfg_.schedule.entries.front().theta);
  if (cfg_.sim.mode == Mode::kFccBaseline) baseline_alpha_ = laplacian_coefficients(cfg_.topology);

  for (const auto& L : cfg_.leaders) {
    xl_.push_back(L.x0);
    h_.push_back(L.form.h0);
  }
  for (const auto& F : cfg_.followers) xf_.push_back(F.x0);
  xo_ = cfg_.tracking_x0;

  obs_l_.resize(M);
  obs_f_.resize(N);
  for (int q = 0; q < M; ++q)
    obs_l_[q].tracking.emplace(cfg_.observers.leader_tracking,
                               initial_estimate(kTrackingInit + cfg_.topology.leader_node(q)));
  for (int i = 0; i < N; ++i)
    obs_f_[i].tracking.emplace(cfg_.observers.follower_tracking,
                               initial_estimate(kTrackingInit + cfg_.topology.follower_node(i)));

  ctl_l_.resize(M);
  ctl_f_.resize(N);
  for (int q = 0; q < M; ++q) {
    const auto& L = cfg_.leaders[q];
    AgentController& c = ctl_l_[q];
    c.model = build_leader_augmented(L.dyn, L.form, cfg_.A0, L.Q);
    const int w = cfg_.learner.window ? cfg_.learner.window : default_window(c.model->dim(), L.dyn.m());
    c.buffer = DataBuffer(c.model->dim(), L.dyn.m(), w);
    c.learner = LearnedController::start(c.model->dim(), L.dyn.m());
    if (cfg_.sim.mode == Mode::kModelBasedOracle) {
      c.K = riccati_value_iteration(*c.model).K;
      c.has_gain = true;
    }
  }
  for (const auto& L : cfg_.leaders) trace_.leader_names.push_back(L.name);
  for (const auto& F : cfg_.followers) trace_.follower_names.push_back(F.name);
  ensure_observers();
  update_layouts();
}

Eigen::VectorXd World::initial_estimate(std::uint64_t stream) const {
  const int n = cfg_.n;
  if (cfg_.observers.init == "zero") return Eigen::VectorXd::Zero(n);
  std::seed_seq seq{static_cast<std::uint32_t>(cfg_.sim.seed), static_cast<std::uint32_t>(cfg_.sim.seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x0b5e7u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd d(n);
  for (int k = 0; k < n; ++k) d(k) = gauss(rng);
  const double r = cfg_.observers.init_radius * std::pow(unit(rng), 1.0 / n);
  return d.norm() > 0 ? Eigen::VectorXd(r * d / d.norm()) : Eigen::VectorXd::Zero(n);
}

void World::ensure_observers() {
  const auto& topo = cfg_.topology;
  for (int q = 0; q < topo.n_leaders; ++q)
    for (int t : know_.leaders[q].influential)
      if (!obs_l_[q].formation.count(t))
        obs_l_[q].formation.emplace(
            t, RlsObserver(cfg_.observers.formation[t],
                           initial_estimate(kFormationInit + 100 * topo.leader_node(q) + t)));
  for (int i = 0; i < topo.n_followers; ++i)
    for (int t : know_.followers[i].influential)
      if (!obs_f_[i].formation.count(t))
        obs_f_[i].formation.emplace(
            t, RlsObserver(cfg_.observers.formation[t],
                           initial_estimate(kFormationInit + 100 * topo.follower_node(i) + t)));
}

std::vector<double> World::follower_alpha(int i) const {
  if (cfg_.sim.mode == Mode::kFccBaseline) {
    std::vector<double> a(cfg_.topology.n_leaders);
    for (int q = 0; q < cfg_.topology.n_leaders; ++q) a[q] = baseline_alpha_(i, q);
    return a;
  }
  return know_.followers[i].alpha;
}

Eigen::MatrixXd World::target_coefficients() const {
  Eigen::MatrixXd out(cfg_.topology.n_followers, cfg_.topology.n_leaders);
  for (int i = 0; i < out.rows(); ++i) {
    const auto a = follower_alpha(i);
    for (int q = 0; q < out.cols(); ++q) out(i, q) = a[q];
  }
  return out;
}

void World::update_layouts() {
  for (int i = 0; i < cfg_.topology.n_followers; ++i) {
    const auto alpha = follower_alpha(i);
    std::vector<int> members;
    std::vector<double> weights;
    for (int q = 0; q < cfg_.topology.n_leaders; ++q) {
      // Baseline weights can reach leaders the propensity sets do not know
      // yet; only use leaders whose estimate exists.
      if (alpha[q] > 0.0 && know_.followers[i].reaches(q)) {
        members.push_back(q);
        weights.push_back(alpha[q]);
      }
    }
    AgentController& c = ctl_f_[i];
    const bool layout_changed = members != c.members;
    const bool alpha_changed = !layout_changed && weights != c.layout_alpha;
    if (!layout_changed && !alpha_changed) continue;
    if (alpha_changed && !cfg_.learner.relearn_on_alpha_change && c.has_gain) {
      c.layout_alpha = weights;
      continue;
    }
    const auto& F = cfg_.followers[i];
    c.members = members;
    c.layout_alpha = weights;
    c.model.reset();
    c.has_gain = false;
    c.active = false;
    if (layout_changed) c.previous_K.reset();
    if (members.empty()) continue;
    // Normalise over the members actually in the layout.
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<double> norm = weights;
    for (double& w : norm) w /= total;
    std::vector<FormationDynamics> forms;
    for (int q : members) forms.push_back(cfg_.leaders[q].form);
    c.model = build_follower_augmented(F.dyn, forms, cfg_.A0, norm, F.Q);
    const int w = cfg_.learner.window ? cfg_.learner.window : default_window(c.model->dim(), F.dyn.m());
    c.buffer = DataBuffer(c.model->dim(), F.dyn.m(), w);
    c.learner = LearnedController::start(c.model->dim(), F.dyn.m());
    if (cfg_.sim.mode == Mode::kModelBasedOracle) {
      c.K = riccati_value_iteration(*c.model).K;
      c.has_gain = true;
    }
  }
}

EstimateBoard World::board() const {
  EstimateBoard b;
  for (const auto& o : obs_l_) {
    b.leader_tracking.push_back(o.tracking->x_hat());
    std::map<int, Eigen::VectorXd> m;
    for (const auto& [t, ob] : o.formation) m.emplace(t, ob.x_hat());
    b.leader_formation.push_back(std::move(m));
  }
  for (const auto& o : obs_f_) {
    b.follower_tracking.push_back(o.tracking->x_hat());
    std::map<int, Eigen::VectorXd> m;
    for (const auto& [t, ob] : o.formation) m.emplace(t, ob.x_hat());
    b.follower_formation.push_back(std::move(m));
  }
  return b;
}

Eigen::VectorXd World::leader_X(int q, const EstimateBoard& b, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& h) const {
  const int n = cfg_.n;
  Eigen::VectorXd X(3 * n);
  X << x, h, b.leader_tracking[q];
  return X;
}

Eigen::VectorXd World::follower_X(int i, const EstimateBoard& b, const Eigen::VectorXd& x) const {
  const int n = cfg_.n;
  const auto& members = ctl_f_[i].members;
  Eigen::VectorXd X((2 + members.size()) * n);
  X.head(n) = x;
  for (size_t j = 0; j < members.size(); ++j)
    X.segment(n * (1 + j), n) = b.follower_formation[i].at(members[j]);
  X.tail(n) = b.follower_tracking[i];
  return X;
}

void World::advance_observers() {
  const auto& topo = cfg_.topology;
  const int N = topo.n_followers, M = topo.n_leaders;
  const EstimateBoard now = board();

  EstimateBoard next = now;
  for (int q = 0; q < M; ++q) {
    next.leader_tracking[q] = obs_l_[q].tracking->predict(leader_tracking_disagreement(topo, q, now, xo_));
    for (auto& [t, ob] : obs_l_[q].formation)
      next.leader_formation[q][t] = ob.predict(leader_formation_disagreement(topo, know_, q, t, now, h_[t]));
  }
  for (int i = 0; i < N; ++i) {
    next.follower_tracking[i] = obs_f_[i].tracking->predict(follower_tracking_disagreement(topo, i, now));
    for (auto& [t, ob] : obs_f_[i].formation)
      next.follower_formation[i][t] =
          ob.predict(follower_formation_disagreement(topo, know_, i, t, now, h_[t]));
  }

  const Eigen::VectorXd xo_next = cfg_.A0 * xo_;
  std::vector<Eigen::VectorXd> h_next;
  for (int t = 0; t < M; ++t) h_next.push_back(cfg_.leaders[t].form.S * h_[t]);

  for (int q = 0; q < M; ++q) {
    obs_l_[q].tracking->commit(next.leader_tracking[q],
                               leader_tracking_disagreement(topo, q, next, xo_next));
    for (auto& [t, ob] : obs_l_[q].formation)
      ob.commit(next.leader_formation[q][t],
                leader_formation_disagreement(topo, know_, q, t, next, h_next[t]));
  }
  for (int i = 0; i < N; ++i) {
    obs_f_[i].tracking->commit(next.follower_tracking[i], follower_tracking_disagreement(topo, i, next));
    for (auto& [t, ob] : obs_f_[i].formation)
      ob.commit(next.follower_formation[i][t],
                follower_formation_disagreement(topo, know_, i, t, next, h_next[t]));
  }
}

Eigen::VectorXd World::control(AgentController& c, const AgentDynamics& dyn,
                               const Eigen::MatrixXd& behavior, const Eigen::VectorXd& X,
                               std::uint64_t stream) {
  const int n = dyn.n();
  if (c.has_gain) return c.K * X;
  if (!c.model || cfg_.sim.mode == Mode::kModelBasedOracle) return behavior * X.head(n);
  Eigen::VectorXd u = c.previous_K ? Eigen::VectorXd(*c.previous_K * X) : Eigen::VectorXd(behavior * X.head(n));
  if (tick_ < cfg_.sim.learning_start) return u;
  c.active = true;
  return u + exploration_noise(cfg_.learner, dyn.m(), tick_, stream, c.learner.status);
}

void World::learn(AgentController& c, int plant_order, const Eigen::VectorXd& X,
                  const Eigen::VectorXd& u, const Eigen::VectorXd& X_next) {
  if (cfg_.sim.mode == Mode::kModelBasedOracle || !c.active || c.has_gain || !c.model) return;
  if (!c.buffer.full()) {
    c.buffer.record(X, u, X_next);
    if (!c.buffer.full()) return;
  }
  c.learner = learning_tick(c.learner, c.buffer, c.model->Q, c.model->C, plant_order, cfg_.learner);
  if (c.learner.status == LearnerStatus::kConverged) {
    c.K = c.learner.K_hat;
    c.has_gain = true;
    c.previous_K = c.K;
    c.converged_ticks.push_back(tick_);
    c.converged_iterations.push_back(c.learner.iterations);
  } else if (c.learner.iterations >= cfg_.learner.max_iterations) {
    throw ConvergenceError("learned gain still moving after " + std::to_string(c.learner.iterations) +
                           " sweeps (last change " + std::to_string(c.learner.last_delta) + ")");
  }
}

TraceRecord World::measure() const {
  const int N = cfg_.topology.n_followers, M = cfg_.topology.n_leaders;
  TraceRecord r;
  r.tick = tick_;
  for (int q = 0; q < M; ++q) {
    r.formation_error.push_back(formation_error(xl_[q], h_[q], xo_).norm());
    double e = (obs_l_[q].tracking->x_hat() - xo_).norm();
    for (const auto& [t, ob] : obs_l_[q].formation) e += (ob.x_hat() - h_[t]).norm();
    r.leader_observer_error.push_back(e);
  }
  for (int i = 0; i < N; ++i) {
    r.containment_error.push_back(containment_error(xf_[i], h_, xo_, follower_alpha(i)).norm());
    double e = (obs_f_[i].tracking->x_hat() - xo_).norm();
    for (const auto& [t, ob] : obs_f_[i].formation) e += (ob.x_hat() - h_[t]).norm();
    r.follower_observer_error.push_back(e);
  }
  if (cfg_.sim.record_states) {
    r.leader_states = xl_;
    r.follower_states = xf_;
  }
  return r;
}

void World::step() {
  const auto& topo = cfg_.topology;
  const int N = topo.n_followers, M = topo.n_leaders;
  std::string where = "tick " + std::to_string(tick_) + ": ";
  try {
    if (tick_ > 0) {
      if (const auto* e = cfg_.schedule.activating_at(tick_)) know_ = apply_propensity(know_, e->theta);
    }
    KnowledgeState next = step_propagation(know_, topo);
    if (!same_sets(next, know_)) {
      ++propagation_rounds_;
      sets_settled_tick_ = -1;
    } else if (sets_settled_tick_ < 0) {
      sets_settled_tick_ = tick_;
    }
    know_ = std::move(next);
    ensure_observers();
    update_layouts();

    std::optional<TraceRecord> rec;
    if (tick_ % cfg_.sim.sample_interval == 0) rec = measure();

    const EstimateBoard now = board();
    std::vector<Eigen::VectorXd> Xl(M), Xf(N), ul(M), uf(N);
    for (int q = 0; q < M; ++q) {
      where = "tick " + std::to_string(tick_) + ", " + cfg_.leaders[q].name + ": ";
      Xl[q] = leader_X(q, now, xl_[q], h_[q]);
      ul[q] = control(ctl_l_[q], cfg_.leaders[q].dyn, cfg_.leaders[q].behavior_gain, Xl[q], kLeaderNoise + q);
    }
    for (int i = 0; i < N; ++i) {
      where = "tick " + std::to_string(tick_) + ", " + cfg_.followers[i].name + ": ";
      Xf[i] = follower_X(i, now, xf_[i]);
      uf[i] = control(ctl_f_[i], cfg_.followers[i].dyn, cfg_.followers[i].behavior_gain, Xf[i],
                      kFollowerNoise + i);
    }

    where = "tick " + std::to_string(tick_) + ", observers: ";
    advance_observers();

    for (int q = 0; q < M; ++q) {
      xl_[q] = cfg_.leaders[q].dyn.A * xl_[q] + cfg_.leaders[q].dyn.B * ul[q];
      h_[q] = cfg_.leaders[q].form.S * h_[q];
    }
    for (int i = 0; i < N; ++i)
      xf_[i] = cfg_.followers[i].dyn.A * xf_[i] + cfg_.followers[i].dyn.B * uf[i];
    xo_ = cfg_.A0 * xo_;

    const EstimateBoard after = board();
    for (int q = 0; q < M; ++q) {
      where = "tick " + std::to_string(tick_) + ", " + cfg_.leaders[q].name + ": ";
      learn(ctl_l_[q], cfg_.n, Xl[q], ul[q], leader_X(q, after, xl_[q], h_[q]));
    }
    for (int i = 0; i < N; ++i) {
      where = "tick " + std::to_string(tick_) + ", " + cfg_.followers[i].name + ": ";
      learn(ctl_f_[i], cfg_.n, Xf[i], uf[i], follower_X(i, after, xf_[i]));
    }
    if (rec) trace_.records.push_back(std::move(*rec));
    ++tick_;
  } catch (const Error&) {
    rethrow_with(where);
  }
}

void World::run_until(long t) {
  while (tick_ < t) step();
}

TraceLog run(const ScenarioConfig& cfg, TraceLog* partial) {
  World w(cfg);
  try {
    w.run_until(cfg.sim.horizon);
  } catch (...) {
    if (partial) *partial = w.trace();
    throw;
  }
  if (partial) *partial = w.trace();
  return w.trace();
}

}  // namespace pfcc
