#include "hardcore/loss_network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hardcore/rng.hpp"

namespace hardcore {

LossGraph LossGraph::single() {
  LossGraph g;
  g.n = 1;
  g.adj.resize(1);
  return g;
}

LossGraph LossGraph::complete(int k) {
  if (k < 1) throw std::invalid_argument("complete graph needs k >= 1");
  LossGraph g;
  g.n = k;
  g.adj.resize(k);
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v) g.add_edge(u, v);
  return g;
}

LossGraph LossGraph::path(int k) {
  if (k < 1) throw std::invalid_argument("path graph needs k >= 1");
  LossGraph g;
  g.n = k;
  g.adj.resize(k);
  for (int v = 0; v + 1 < k; ++v) g.add_edge(v, v + 1);
  return g;
}

LossGraph LossGraph::cycle(int k) {
  if (k < 3) throw std::invalid_argument("cycle graph needs k >= 3");
  LossGraph g = path(k);
  g.add_edge(k - 1, 0);
  return g;
}

void LossGraph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n || v >= n || u == v)
    throw std::invalid_argument("edge endpoints out of range");
  if (has_edge(u, v)) return;
  adj[u].push_back(v);
  adj[v].push_back(u);
}

bool LossGraph::has_edge(int u, int v) const {
  for (int w : adj[u])
    if (w == v) return true;
  return false;
}

double LossStats::blocking_fraction(int node) const {
  if (arrivals[node] == 0) return 0.0;
  return static_cast<double>(blocked[node]) / static_cast<double>(arrivals[node]);
}

std::uint64_t encode_state(const std::vector<int>& calls, int C) {
  std::uint64_t code = 0;
  const std::uint64_t base = static_cast<std::uint64_t>(C) + 1;
  for (std::size_t v = calls.size(); v-- > 0;) code = code * base + calls[v];
  return code;
}

std::vector<int> decode_state(std::uint64_t code, int n, int C) {
  std::vector<int> calls(n);
  const std::uint64_t base = static_cast<std::uint64_t>(C) + 1;
  for (int v = 0; v < n; ++v) {
    calls[v] = static_cast<int>(code % base);
    code /= base;
  }
  return calls;
}

namespace {

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

bool admissible(const LossGraph& graph, const std::vector<int>& calls, int v,
                int C) {
  if (calls[v] + 1 > C) return false;
  for (int u : graph.adj[v])
    if (calls[v] + 1 + calls[u] > C) return false;
  return true;
}

}  // namespace

LossStats simulate_loss_network(const LossGraph& graph, const ModelParams& params,
                                long max_events, std::uint64_t seed) {
  if (graph.n < 1 || graph.n > kMaxLossVertices)
    throw std::invalid_argument("loss network limited to 1..12 vertices");
  if (max_events < 1) throw std::invalid_argument("max_events must be >= 1");

  const int n = graph.n;
  const int C = params.C;
  const double lambda = params.lambda;
  const std::uint64_t num_codes = pow_u64(static_cast<std::uint64_t>(C) + 1, n);

  LossStats stats;
  stats.seed = seed;
  stats.node_occupancy.assign(n, std::vector<double>(C + 1, 0.0));
  stats.arrivals.assign(n, 0);
  stats.blocked.assign(n, 0);

  std::mt19937_64 rng = make_engine(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  std::vector<int> calls(n, 0);
  std::vector<int> busy;  // nodes with at least one call, unsorted
  busy.reserve(n);
  std::uint64_t code = 0;

  const double arrival_rate = lambda * n;
  for (long ev = 0; ev < max_events; ++ev) {
    const double total_rate = arrival_rate + static_cast<double>(busy.size());
    const double dt = expo(rng) / total_rate;
    stats.total_time += dt;
    stats.joint_time[code] += dt;
    for (int v = 0; v < n; ++v) stats.node_occupancy[v][calls[v]] += dt;

    const std::uint64_t prev_code = code;
    const double pick = unif(rng) * total_rate;
    if (pick < arrival_rate) {
      const int v = std::min(n - 1, static_cast<int>(pick / lambda));
      ++stats.arrivals[v];
      if (admissible(graph, calls, v, C)) {
        if (calls[v] == 0) busy.push_back(v);
        ++calls[v];
        code += pow_u64(static_cast<std::uint64_t>(C) + 1, v);
      } else {
        ++stats.blocked[v];
      }
    } else {
      const int slot =
          std::min<int>(static_cast<int>(busy.size()) - 1,
                        static_cast<int>(pick - arrival_rate));
      const int v = busy[slot];
      --calls[v];
      if (calls[v] == 0) {
        busy[slot] = busy.back();
        busy.pop_back();
      }
      code -= pow_u64(static_cast<std::uint64_t>(C) + 1, v);
    }
    if (code != prev_code)
      ++stats.transition_counts[prev_code * num_codes + code];
    ++stats.events;
  }

  // normalize to time fractions
  for (auto& [state, t] : stats.joint_time) t /= stats.total_time;
  for (int v = 0; v < n; ++v)
    for (int k = 0; k <= C; ++k) stats.node_occupancy[v][k] /= stats.total_time;
  return stats;
}

std::vector<double> loss_stationary_joint(const LossGraph& graph,
                                          const ModelParams& params) {
  if (graph.n < 1 || graph.n > kMaxLossVertices)
    throw std::invalid_argument("loss network limited to 1..12 vertices");
  const int n = graph.n;
  const int C = params.C;
  const std::uint64_t num_codes = pow_u64(static_cast<std::uint64_t>(C) + 1, n);

  std::vector<double> law(num_codes, 0.0);
  double norm = 0.0;
  for (std::uint64_t code = 0; code < num_codes; ++code) {
    std::vector<int> calls = decode_state(code, n, C);
    bool ok = true;
    int total = 0;
    for (int v = 0; v < n && ok; ++v) {
      total += calls[v];
      for (int u : graph.adj[v])
        if (u > v && calls[v] + calls[u] > C) ok = false;
    }
    if (!ok) continue;
    law[code] = std::pow(params.lambda, total);
    norm += law[code];
  }
  for (double& w : law) w /= norm;
  return law;
}

double loss_joint_tv(const LossStats& stats, const std::vector<double>& law) {
  double tv = 0.0;
  double seen = 0.0;
  for (const auto& [code, frac] : stats.joint_time) {
    tv += std::abs(frac - law[code]);
    seen += law[code];
  }
  tv += 1.0 - seen;  // states the run never visited
  return 0.5 * tv;
}

std::vector<double> loss_stationary_node(const LossGraph& graph,
                                         const ModelParams& params, int node) {
  std::vector<double> joint = loss_stationary_joint(graph, params);
  std::vector<double> marginal(params.C + 1, 0.0);
  for (std::uint64_t code = 0; code < joint.size(); ++code) {
    if (joint[code] == 0.0) continue;
    std::vector<int> calls = decode_state(code, graph.n, params.C);
    marginal[calls[node]] += joint[code];
  }
  return marginal;
}

}  // namespace hardcore
