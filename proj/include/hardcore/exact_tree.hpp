#pragma once

#include <cstdint>
#include <vector>

#include "hardcore/model.hpp"

namespace hardcore {

// Root occupancy law P(sigma_root = i), i in {0..C}, for a tree whose root
// sits `level` levels above the boundary.
struct RootLaw {
  std::vector<double> p;
  int level = 0;

  int capacity() const { return static_cast<int>(p.size()) - 1; }

  double cum(int m) const;      // P(sigma <= m); m clamped to [-1, C]
  double tail_ge(int k) const;  // P(sigma >= k)

  // Odds against the empty state, Q(i) = p(i)/p(0).  The empty state always
  // has positive mass under the model, so a zero p(0) marks a malformed law.
  double Q(int i) const;

  // R(i) = 1/P(sigma <= C-i); R(0) = 1 identically, and R may be +inf when
  // all mass sits above C-i (degenerate boundary seeds).
  double R(int i) const;
};

// Validates nonnegativity and unit mass (1e-12) before wrapping.
RootLaw make_root_law(std::vector<double> p, int level);

// Point mass at the constant boundary spin; level 0 seed of the level
// recursion.  Throws for PerVertex boundaries, which have no single law.
RootLaw boundary_law(const BoundaryCondition& bc, const ModelParams& params);

// Root partition-function vector in log domain, normalised so logZ[0] = 0,
// i.e. logZ[i] = log(Z(i)/Z(0)).  Overall constants from the fixed boundary
// spins are dropped; they cancel in every marginal.
struct PartitionVector {
  std::vector<double> logZ;
  int level = 0;
};

// Exact root partition vector for the b-ary tree of the given shape under the
// given boundary condition.  Small trees (and every PerVertex instance) run a
// per-vertex bottom-up pass; large uniform trees collapse to one vector per
// level, which is exact by symmetry.
PartitionVector dp_partition(const TreeShape& shape, const BoundaryCondition& bc,
                             const ModelParams& params);

RootLaw root_marginal(const TreeShape& shape, const BoundaryCondition& bc,
                      const ModelParams& params);

// Total variation distance between two laws on the same spin range.
double tv_distance(const RootLaw& a, const RootLaw& b);

// Total variation between the laws of a vertex conditioned on its parent
// carrying spin i versus spin k, with k < i.  Conditioning on parent spin j
// restricts the vertex to {0..C-j}, so the distance collapses to
// P(sigma in [C-i+1, C-k]) / P(sigma <= C-k) under the unconditioned law.
double conditional_tv(const RootLaw& unconditioned, int i, int k);
double conditional_tv(const TreeShape& shape, const BoundaryCondition& bc,
                      const ModelParams& params, int i, int k);

// Enumeration oracle: sums lambda^(total spin) over every feasible
// configuration directly.  Guarded to tiny trees; max_vertices caps the work.
RootLaw brute_force_marginal(const TreeShape& shape, const BoundaryCondition& bc,
                             const ModelParams& params,
                             std::uint64_t max_vertices = 22);

namespace detail {
// One bottom-up level of the symmetric recursion on normalised log laws:
// logp'(i) = i log(lambda) + b log P(sigma <= C-i) - logZ.  The cumulative
// is evaluated through the complementary tail when the tail is small, which
// keeps b * log(cum) accurate at large b.
std::vector<double> law_step_logp(const std::vector<double>& logp, int b, int C,
                                  double log_lambda);
double log_cum(const std::vector<double>& logp, int m);
}  // namespace detail

}  // namespace hardcore
