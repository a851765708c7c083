#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pfcc/learning.hpp"
#include "pfcc/model_control.hpp"
#include "pfcc/observers.hpp"
#include "pfcc/propagation.hpp"
#include "pfcc/scenario.hpp"

namespace pfcc {

struct TraceRecord {
  long tick = 0;
  std::vector<double> formation_error;     // per leader ‖x − h − xᵒ‖
  std::vector<double> containment_error;   // per follower ‖x − Σα(h + xᵒ)‖
  std::vector<double> leader_observer_error;    // ‖x̃ᵒ‖ + Σ‖h̃‖ per leader
  std::vector<double> follower_observer_error;  // same per follower
  std::vector<Eigen::VectorXd> leader_states;   // only with record_states
  std::vector<Eigen::VectorXd> follower_states;
};

struct TraceLog {
  std::vector<std::string> leader_names;
  std::vector<std::string> follower_names;
  std::vector<TraceRecord> records;
};

Eigen::VectorXd formation_error(const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& xo);

// `h` and `alpha` run over the full leader set; α must vanish outside the
// follower's influential set.
Eigen::VectorXd containment_error(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& h,
                                  const Eigen::VectorXd& xo, const std::vector<double>& alpha);

// Per-agent learning / control bookkeeping.
struct AgentController {
  std::vector<int> members;          // augmented layout (followers), empty for leaders
  std::vector<double> layout_alpha;  // α per member at the time the layout was fixed
  std::optional<AugmentedSystem> model;  // true augmented model (oracle mode and diagnostics)
  DataBuffer buffer;
  LearnedController learner;
  bool active = false;               // exploring/learning has started for this layout
  bool has_gain = false;
  Eigen::MatrixXd K;                 // gain applied once converged (or oracle gain)
  std::optional<Eigen::MatrixXd> previous_K;  // last converged gain, same layout
  std::vector<long> converged_ticks;
  std::vector<int> converged_iterations;
};

struct AgentObservers {
  std::optional<RlsObserver> tracking;
  std::map<int, RlsObserver> formation;  // keyed by target leader
};

class World {
 public:
  explicit World(const ScenarioConfig& cfg);

  // Advance one tick.  Module errors are rethrown with tick/agent context.
  void step();
  void run_until(long tick);

  long tick() const { return tick_; }
  const ScenarioConfig& config() const { return cfg_; }
  const KnowledgeState& knowledge() const { return know_; }
  const TraceLog& trace() const { return trace_; }

  const Eigen::VectorXd& leader_state(int q) const { return xl_[q]; }
  const Eigen::VectorXd& follower_state(int i) const { return xf_[i]; }
  const Eigen::VectorXd& formation_state(int q) const { return h_[q]; }
  const Eigen::VectorXd& tracking_state() const { return xo_; }
  const AgentObservers& leader_observers(int q) const { return obs_l_[q]; }
  const AgentObservers& follower_observers(int i) const { return obs_f_[i]; }
  const AgentController& leader_controller(int q) const { return ctl_l_[q]; }
  const AgentController& follower_controller(int i) const { return ctl_f_[i]; }

  // Coefficients that define each follower's target (propensity- or
  // Laplacian-based depending on the mode).  N×M.
  Eigen::MatrixXd target_coefficients() const;

  // Tick at which the influential sets stopped changing (-1 while growing).
  long sets_settled_tick() const { return sets_settled_tick_; }
  int propagation_rounds() const { return propagation_rounds_; }

  TraceRecord measure() const;

 private:
  std::vector<double> follower_alpha(int i) const;
  Eigen::VectorXd initial_estimate(std::uint64_t stream) const;
  void ensure_observers();
  void update_layouts();
  Eigen::VectorXd leader_X(int q, const EstimateBoard& board, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& h) const;
  Eigen::VectorXd follower_X(int i, const EstimateBoard& board, const Eigen::VectorXd& x) const;
  EstimateBoard board() const;
  void advance_observers();
  Eigen::VectorXd control(AgentController& c, const AgentDynamics& dyn,
                          const Eigen::MatrixXd& behavior, const Eigen::VectorXd& X,
                          std::uint64_t stream);
  void learn(AgentController& c, int plant_order, const Eigen::VectorXd& X,
             const Eigen::VectorXd& u, const Eigen::VectorXd& X_next);

  ScenarioConfig cfg_;
  long tick_ = 0;
  KnowledgeState know_;
  Eigen::MatrixXd baseline_alpha_;  // N×M, fcc_baseline only
  std::vector<Eigen::VectorXd> xl_, xf_, h_;
  Eigen::VectorXd xo_;
  std::vector<AgentObservers> obs_l_, obs_f_;
  std::vector<AgentController> ctl_l_, ctl_f_;
  TraceLog trace_;
  long sets_settled_tick_ = -1;
  int propagation_rounds_ = 0;
};

// Full-horizon run.  On a mid-run failure `partial` (if given) keeps the
// trace collected so far and the error propagates.
TraceLog run(const ScenarioConfig& cfg, TraceLog* partial = nullptr);

}  // namespace pfcc
