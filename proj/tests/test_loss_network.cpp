#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hardcore/loss_network.hpp"
#include "hardcore/model.hpp"

using namespace hardcore;

TEST_CASE("graph factories") {
  auto one = LossGraph::single();
  CHECK(one.n == 1);
  CHECK(one.adj[0].empty());

  auto k3 = LossGraph::complete(3);
  CHECK(k3.n == 3);
  CHECK(k3.has_edge(0, 1));
  CHECK(k3.has_edge(1, 2));
  CHECK(k3.has_edge(2, 0));

  auto p3 = LossGraph::path(3);
  CHECK(p3.has_edge(0, 1));
  CHECK(p3.has_edge(1, 2));
  CHECK(!p3.has_edge(0, 2));

  auto c4 = LossGraph::cycle(4);
  CHECK(c4.has_edge(0, 3));
  CHECK(c4.has_edge(0, 1));
  CHECK(!c4.has_edge(0, 2));
  CHECK_THROWS_AS(LossGraph::cycle(2), std::invalid_argument);

  LossGraph g;
  g.n = 2;
  g.adj.resize(2);
  g.add_edge(0, 1);
  CHECK(g.has_edge(1, 0));  // undirected
}

TEST_CASE("state codes round-trip") {
  int C = 2;
  std::vector<int> calls = {2, 0, 1};
  auto code = encode_state(calls, C);
  CHECK(decode_state(code, 3, C) == calls);
  // vertex 0 is the least significant digit
  CHECK(encode_state({1, 0}, 1) == 1);
  CHECK(encode_state({0, 1}, 1) == 2);
}

TEST_CASE("simulator guards") {
  ModelParams p(2, 1, 1.0);
  CHECK_THROWS_AS(simulate_loss_network(LossGraph::complete(13), p, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_loss_network(LossGraph::single(), p, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("single node is the two-state birth-death chain") {
  ModelParams p(2, 1, 1.5);
  auto stats = simulate_loss_network(LossGraph::single(), p, 200000, 11);
  CHECK(stats.events == 200000);
  CHECK(stats.total_time > 0.0);
  CHECK(stats.seed == 11);

  double expect = 1.5 / 2.5;  // lambda / (1 + lambda)
  CHECK(stats.node_occupancy[0][1] == doctest::Approx(expect).epsilon(0.03));
  CHECK(stats.node_occupancy[0][0] + stats.node_occupancy[0][1] ==
        doctest::Approx(1.0).epsilon(1e-12));

  // by PASTA the blocking fraction equals the busy fraction
  CHECK(stats.blocking_fraction(0) == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("edge graph splits time in thirds") {
  ModelParams p(2, 1, 1.0);
  auto graph = LossGraph::complete(2);

  auto law = loss_stationary_joint(graph, p);
  CHECK(law[encode_state({0, 0}, 1)] == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(law[encode_state({1, 0}, 1)] == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(law[encode_state({0, 1}, 1)] == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(law[encode_state({1, 1}, 1)] == 0.0);  // edge budget violated

  auto stats = simulate_loss_network(graph, p, 100000, 29);
  CHECK(loss_joint_tv(stats, law) < 0.02);

  // blocked unless the system is empty
  CHECK(stats.blocking_fraction(0) == doctest::Approx(2.0 / 3).epsilon(0.05));
}

TEST_CASE("three-node path matches the product-form law") {
  ModelParams p(2, 2, 0.7);
  auto graph = LossGraph::path(3);
  auto law = loss_stationary_joint(graph, p);

  // law is supported exactly on the feasible codes and sums to one
  double mass = 0.0;
  for (std::uint64_t code = 0; code < law.size(); ++code) {
    auto calls = decode_state(code, 3, p.C);
    bool ok = true;
    for (int v = 0; v < 3 && ok; ++v) {
      if (calls[v] > p.C) ok = false;
      for (int u : graph.adj[v])
        if (calls[v] + calls[u] > p.C) ok = false;
    }
    if (!ok) CHECK(law[code] == 0.0);
    mass += law[code];
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // product form: weight ratio between two feasible states is lambda^(diff)
  auto w0 = law[encode_state({0, 0, 0}, p.C)];
  auto w2 = law[encode_state({2, 0, 0}, p.C)];
  CHECK(w2 / w0 == doctest::Approx(0.49).epsilon(1e-12));

  auto stats = simulate_loss_network(graph, p, 100000, 3);
  CHECK(loss_joint_tv(stats, law) < 0.02);

  // node marginals from the joint law agree with accumulated node occupancy
  for (int v = 0; v < 3; ++v) {
    auto marg = loss_stationary_node(graph, p, v);
    for (int k = 0; k <= p.C; ++k)
      CHECK(std::abs(stats.node_occupancy[v][k] - marg[k]) < 0.02);
  }
}

TEST_CASE("empirical flux balances across state pairs") {
  ModelParams p(2, 1, 1.0);
  auto graph = LossGraph::complete(2);
  auto stats = simulate_loss_network(graph, p, 200000, 57);

  std::uint64_t num_codes = 4;
  for (std::uint64_t a = 0; a < num_codes; ++a) {
    for (std::uint64_t b = a + 1; b < num_codes; ++b) {
      auto fwd_it = stats.transition_counts.find(a * num_codes + b);
      auto bwd_it = stats.transition_counts.find(b * num_codes + a);
      long fwd = fwd_it == stats.transition_counts.end() ? 0 : fwd_it->second;
      long bwd = bwd_it == stats.transition_counts.end() ? 0 : bwd_it->second;
      if (fwd + bwd == 0) continue;
      // reversibility: forward and backward jump counts agree to MC noise
      double sigma = std::sqrt(static_cast<double>(fwd + bwd));
      CHECK(std::abs(static_cast<double>(fwd - bwd)) < 6.0 * sigma + 1.0);
    }
  }
}

TEST_CASE("seeded runs are identical, different seeds close in law") {
  ModelParams p(2, 2, 0.9);
  auto graph = LossGraph::cycle(3);
  auto a = simulate_loss_network(graph, p, 50000, 101);
  auto b = simulate_loss_network(graph, p, 50000, 101);
  CHECK(a.total_time == b.total_time);
  CHECK(a.node_occupancy == b.node_occupancy);
  CHECK(a.arrivals == b.arrivals);

  auto c = simulate_loss_network(graph, p, 50000, 202);
  auto law = loss_stationary_joint(graph, p);
  CHECK(loss_joint_tv(a, law) < 0.03);
  CHECK(loss_joint_tv(c, law) < 0.03);
}

TEST_CASE("joint tv counts unvisited mass") {
  ModelParams p(2, 1, 0.5);
  auto stats = simulate_loss_network(LossGraph::single(), p, 1000, 1);
  // a law concentrated on a state the chain never saw: distance near one
  std::vector<double> fake(2, 0.0);
  fake[encode_state({1}, 1)] = 1.0;
  double tv = loss_joint_tv(stats, fake);
  CHECK(tv > 0.5);
  CHECK(tv <= 1.0);
}
