#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "hardcore/exact_tree.hpp"
#include "hardcore/model.hpp"

namespace hardcore {

// Largest spin the vertex can take given its current neighbours: parent,
// in-tree children, and (for leaves) the boundary spins below it.
int max_allowed_spin(const TreeConfig& config, int level, std::uint64_t pos,
                     const ModelParams& params, const BoundaryCondition& bc);

// Heat-bath site law on {0..cap} with weights lambda^s, drawn by inverse CDF
// from one uniform variate.  Monotone in cap for a fixed u, which is what
// makes the replica coupling order-preserving.
int invert_site_cdf(int cap, double lambda, double u);

// Conditional probability of new_spin at the site under the heat-bath kernel.
double site_update_prob(const TreeConfig& config, int level, std::uint64_t pos,
                        int new_spin, const ModelParams& params,
                        const BoundaryCondition& bc);

// Three coupled replicas sharing every uniform draw: the empty- and
// full-boundary extremal chains sandwich the chain with the target boundary
// condition in the alternating partial order.  Which extreme sits on top
// flips with the parity of the boundary distance.
struct TripleState {
  TreeConfig lower;   // starts at the ordering-minimal configuration
  TreeConfig target;  // bc_tau replica
  TreeConfig upper;
  std::uint64_t seed = 0;
  std::mt19937_64 rng;
};

// The lower/upper replicas carry the empty/full boundary when the boundary
// distance is even, swapped when it is odd.
TripleState make_triple(const TreeShape& shape, const ModelParams& params,
                        const BoundaryCondition& bc_tau, std::uint64_t seed);

// One systematic sweep: every vertex once, level by level from the root.
void heat_bath_sweep(TripleState& state, const ModelParams& params,
                     const BoundaryCondition& bc_tau);

// Single uniformly chosen site update of all three replicas; the kernel the
// reversibility check runs against.
void heat_bath_random_site(TripleState& state, const ModelParams& params,
                           const BoundaryCondition& bc_tau);

// Exact check of the replica sandwich in the alternating order.
bool ordering_ok(const TripleState& state);

struct SampleResult {
  RootLaw law;                   // empirical root law of the target replica
  std::vector<double> std_error; // batch-means error per spin value
  long samples = 0;
  std::uint64_t seed = 0;
};

// Runs the coupled chains for burn_in + samples sweeps, recording the target
// replica's root spin after each post-burn-in sweep.
SampleResult sample_root_marginal(const TreeShape& shape, const ModelParams& params,
                                  const BoundaryCondition& bc_tau, long sweeps,
                                  long burn_in, std::uint64_t seed);

}  // namespace hardcore
