#pragma once

#include <map>
#include <set>
#include <vector>

#include "pfcc/topology.hpp"

namespace pfcc {

// What one agent currently knows about the formation leaders upstream of it.
// Leaders are referred to by their 0-based leader index.  For a leader agent
// the set holds the *other* leaders that reach it; for a follower it holds the
// leaders whose convex hull it has to sit in.
struct AgentKnowledge {
  std::set<int> influential;
  std::map<int, double> propensity;  // leader → ϑ, domain == influential
  std::vector<double> alpha;         // length M, zero outside `influential`

  // Reachability flag (ḡ for followers, ā for leaders).
  bool reaches(int q) const { return influential.count(q) > 0; }
};

struct KnowledgeState {
  std::vector<AgentKnowledge> followers;
  std::vector<AgentKnowledge> leaders;
};

// Schedule of propensity factors; entry 0 must be active at tick 0.
struct PropensitySchedule {
  struct Entry {
    long tick = 0;
    std::vector<double> theta;  // length M
  };
  std::vector<Entry> entries;

  // Ticks strictly increasing, first tick 0, every ϑ > 0, width M.
  void validate(int n_leaders) const;
  // Entry that becomes active exactly at `tick`, if any.
  const Entry* activating_at(long tick) const;
};

KnowledgeState init_knowledge(const DirectedTopology& topo, const std::vector<double>& theta);

// One synchronous round: every agent merges the sets and dictionaries of its
// in-neighbours as they were at the start of the round.
KnowledgeState step_propagation(const KnowledgeState& k, const DirectedTopology& topo);

struct FixedPoint {
  KnowledgeState knowledge;
  int iterations = 0;  // rounds executed, including the one that changed nothing
};

FixedPoint propagation_fixed_point(const KnowledgeState& k, const DirectedTopology& topo);

// Overwrite every dictionary value with a new propensity vector and refresh
// the coefficients.  Sets are left alone.
KnowledgeState apply_propensity(const KnowledgeState& k, const std::vector<double>& theta);

// Leaders that relay leader q's information towards followers that cannot
// hear q along a follower-only route.  Indexed by leader.
std::vector<std::set<int>> itfl_sets(const KnowledgeState& k, const DirectedTopology& topo);

// Laplacian-weighted containment coefficients −L1⁻¹L2 (N×M) used by the
// propensity-free baseline.
Eigen::MatrixXd laplacian_coefficients(const DirectedTopology& topo);

bool same_sets(const KnowledgeState& a, const KnowledgeState& b);

}  // namespace pfcc
