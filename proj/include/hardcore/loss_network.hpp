#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hardcore/model.hpp"

namespace hardcore {

// Small undirected graph for the loss-network simulator.  Kept deliberately
// tiny (simulate_loss_network refuses more than kMaxLossVertices vertices) so
// the joint occupancy law stays enumerable and the empirical law can be
// checked against it exactly.
struct LossGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;

  static LossGraph single();
  static LossGraph complete(int k);
  static LossGraph path(int k);
  static LossGraph cycle(int k);

  void add_edge(int u, int v);
  bool has_edge(int u, int v) const;
};

inline constexpr int kMaxLossVertices = 12;

// Time-weighted statistics from one Gillespie run.  Joint occupancy states
// are encoded base C+1 with vertex 0 least significant.
struct LossStats {
  // fraction of time each node spent with k active calls, [node][k]
  std::vector<std::vector<double>> node_occupancy;
  // fraction of time in each joint state, keyed by mixed-radix code
  std::unordered_map<std::uint64_t, double> joint_time;
  // directed jump counts between joint states, keyed by from*num_codes+to;
  // flux balance across each edge of the state graph is the reversibility check
  std::unordered_map<std::uint64_t, long> transition_counts;
  std::vector<long> arrivals;   // offered calls per node
  std::vector<long> blocked;    // refused calls per node
  double total_time = 0.0;
  long events = 0;
  std::uint64_t seed = 0;

  double blocking_fraction(int node) const;
};

std::uint64_t encode_state(const std::vector<int>& calls, int C);
std::vector<int> decode_state(std::uint64_t code, int n, int C);

// Continuous-time loss network on `graph`: each node sees Poisson(lambda)
// call attempts; an attempt at v is refused when it would push v above C or
// some edge sum above C.  Each busy node completes calls at total rate 1, so
// the stationary law is the hard core measure lambda^(total calls) restricted
// to feasible states.  Runs exactly `max_events` jumps (accepted or refused
// arrivals and departures all count).  params.b is not consulted.
LossStats simulate_loss_network(const LossGraph& graph, const ModelParams& params,
                                long max_events, std::uint64_t seed);

// Exact stationary law by enumeration of all (C+1)^n codes; zero on
// infeasible states.  Oracle for the simulator tests.
std::vector<double> loss_stationary_joint(const LossGraph& graph,
                                          const ModelParams& params);

// Total variation between the empirical joint occupancy and a law indexed by
// state code.
double loss_joint_tv(const LossStats& stats, const std::vector<double>& law);

// Exact per-node marginal occupancy from the enumerated joint law.
std::vector<double> loss_stationary_node(const LossGraph& graph,
                                         const ModelParams& params, int node);

}  // namespace hardcore
