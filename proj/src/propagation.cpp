#include "pfcc/propagation.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "pfcc/errors.hpp"

namespace pfcc {

namespace {

void merge_into(AgentKnowledge& dst, const AgentKnowledge& src) {
  for (const auto& [q, theta] : src.propensity) {
    auto [it, inserted] = dst.propensity.emplace(q, theta);
    if (!inserted && it->second != theta) {
      throw AssumptionError("conflicting propensity values for leader L" + std::to_string(q + 1) +
                            " during propagation");
    }
    dst.influential.insert(q);
  }
}

// α_q = ϑ_q / Σ ϑ.  The quotient is formed in extended precision so that a
// common rescaling of every ϑ rounds back to the same doubles.
void refresh_alpha(AgentKnowledge& a, int n_leaders) {
  a.alpha.assign(n_leaders, 0.0);
  long double total = 0.0L;
  for (const auto& [q, theta] : a.propensity) total += static_cast<long double>(theta);
  if (total <= 0.0L) return;
  for (const auto& [q, theta] : a.propensity)
    a.alpha[q] = static_cast<double>(static_cast<long double>(theta) / total);
}

}  // namespace

void PropensitySchedule::validate(int n_leaders) const {
  if (entries.empty()) throw SchemaError("propensity schedule is empty");
  if (entries.front().tick != 0) throw SchemaError("propensity schedule must start at tick 0");
  for (size_t e = 0; e < entries.size(); ++e) {
    if (e > 0 && entries[e].tick <= entries[e - 1].tick)
      throw SchemaError("propensity schedule ticks must be strictly increasing");
    if (static_cast<int>(entries[e].theta.size()) != n_leaders)
      throw SchemaError("propensity schedule entry does not cover every leader");
    for (size_t q = 0; q < entries[e].theta.size(); ++q) {
      if (!(entries[e].theta[q] > 0.0))
        throw AssumptionError("propensity of leader L" + std::to_string(q + 1) +
                              " must be positive (tick " + std::to_string(entries[e].tick) + ")");
    }
  }
}

const PropensitySchedule::Entry* PropensitySchedule::activating_at(long tick) const {
  for (const auto& e : entries)
    if (e.tick == tick) return &e;
  return nullptr;
}

KnowledgeState init_knowledge(const DirectedTopology& topo, const std::vector<double>& theta) {
  const int N = topo.n_followers, M = topo.n_leaders;
  if (static_cast<int>(theta.size()) != M)
    throw AssumptionError("init_knowledge: need one propensity per leader");
  for (int q = 0; q < M; ++q)
    if (!(theta[q] > 0.0)) throw AssumptionError("propensity must be positive");
  KnowledgeState k;
  k.followers.resize(N);
  k.leaders.resize(M);
  for (int i = 0; i < N; ++i) {
    for (int q = 0; q < M; ++q) {
      if (topo.leader_to_follower(i, q) > 0.0) {
        k.followers[i].influential.insert(q);
        k.followers[i].propensity[q] = theta[q];
      }
    }
    refresh_alpha(k.followers[i], M);
  }
  for (int q = 0; q < M; ++q) {
    for (int m = 0; m < M; ++m) {
      if (topo.leader_adjacency(q, m) > 0.0) {
        k.leaders[q].influential.insert(m);
        k.leaders[q].propensity[m] = theta[m];
      }
    }
    k.leaders[q].alpha.assign(M, 0.0);
  }
  return k;
}

KnowledgeState step_propagation(const KnowledgeState& k, const DirectedTopology& topo) {
  const int N = topo.n_followers, M = topo.n_leaders;
  KnowledgeState next = k;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      if (topo.follower_adjacency(i, j) > 0.0) merge_into(next.followers[i], k.followers[j]);
    for (int q = 0; q < M; ++q)
      if (topo.leader_to_follower(i, q) > 0.0) merge_into(next.followers[i], k.leaders[q]);
    refresh_alpha(next.followers[i], M);
  }
  for (int q = 0; q < M; ++q) {
    for (int m = 0; m < M; ++m)
      if (topo.leader_adjacency(q, m) > 0.0) merge_into(next.leaders[q], k.leaders[m]);
    // A leader never lists itself, even on a cycle back to it.
    next.leaders[q].influential.erase(q);
    next.leaders[q].propensity.erase(q);
  }
  return next;
}

bool same_sets(const KnowledgeState& a, const KnowledgeState& b) {
  if (a.followers.size() != b.followers.size() || a.leaders.size() != b.leaders.size()) return false;
  for (size_t i = 0; i < a.followers.size(); ++i)
    if (a.followers[i].influential != b.followers[i].influential) return false;
  for (size_t q = 0; q < a.leaders.size(); ++q)
    if (a.leaders[q].influential != b.leaders[q].influential) return false;
  return true;
}

FixedPoint propagation_fixed_point(const KnowledgeState& k, const DirectedTopology& topo) {
  const int budget = std::max(1, topo.n_followers + topo.n_leaders - 1);
  FixedPoint fp{k, 0};
  while (true) {
    KnowledgeState next = step_propagation(fp.knowledge, topo);
    ++fp.iterations;
    const bool settled = same_sets(next, fp.knowledge);
    fp.knowledge = std::move(next);
    if (settled) return fp;
    if (fp.iterations >= budget) {
      throw ConvergenceError("leader-set propagation still changing after " +
                             std::to_string(fp.iterations) + " rounds");
    }
  }
}

KnowledgeState apply_propensity(const KnowledgeState& k, const std::vector<double>& theta) {
  const int M = static_cast<int>(k.leaders.size());
  if (static_cast<int>(theta.size()) != M) throw AssumptionError("apply_propensity: width mismatch");
  KnowledgeState next = k;
  auto reset = [&](AgentKnowledge& a) {
    for (auto& [q, value] : a.propensity) {
      if (!(theta[q] > 0.0)) throw AssumptionError("propensity must be positive");
      value = theta[q];
    }
  };
  for (auto& f : next.followers) {
    reset(f);
    refresh_alpha(f, M);
  }
  for (auto& l : next.leaders) reset(l);
  return next;
}

std::vector<std::set<int>> itfl_sets(const KnowledgeState& k, const DirectedTopology& topo) {
  const int N = topo.n_followers, M = topo.n_leaders;
  const auto closure = topo.reachability();
  std::vector<std::set<int>> out(M);
  for (int q = 0; q < M; ++q) {
    // Followers q reaches without passing through another leader.
    std::vector<bool> direct(N, false);
    std::deque<int> open;
    for (int i = 0; i < N; ++i)
      if (topo.leader_to_follower(i, q) > 0.0) {
        direct[i] = true;
        open.push_back(i);
      }
    while (!open.empty()) {
      const int u = open.front();
      open.pop_front();
      for (int v = 0; v < N; ++v)
        if (topo.follower_adjacency(v, u) > 0.0 && !direct[v]) {
          direct[v] = true;
          open.push_back(v);
        }
    }
    for (int m = 0; m < M; ++m) {
      if (m == q || !k.leaders[m].reaches(q)) continue;
      const int vm = topo.leader_node(m);
      if (!closure[topo.leader_node(q)][vm]) continue;
      for (int i = 0; i < N; ++i) {
        if (!direct[i] && closure[vm][topo.follower_node(i)]) {
          out[q].insert(m);
          break;
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd laplacian_coefficients(const DirectedTopology& topo) {
  const LaplacianBlocks lb = build_laplacian(topo);
  if (lb.L1.size() == 0) return Eigen::MatrixXd::Zero(0, topo.n_leaders);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lb.L1);
  if (!lu.isInvertible())
    throw AssumptionError("follower Laplacian block is singular; some follower hears no leader");
  return -lu.solve(lb.L2);
}

}  // namespace pfcc
