#pragma once

#include <cstdint>
#include <vector>

namespace hardcore {

// Multi-state hard core model on the rooted b-ary tree: spins take values in
// {0,...,C} and every edge (x,y) must satisfy sigma_x + sigma_y <= C.  A
// configuration sigma carries weight lambda^(sum_v sigma_v).
struct ModelParams {
  int b;          // branching factor, >= 2
  int C;          // per-vertex capacity, >= 1
  double lambda;  // activity, > 0

  ModelParams(int b_, int C_, double lambda_);

  int num_states() const { return C + 1; }

  // 1/(1-lambda); only defined in the subcritical-activity regime lambda < 1.
  double a_lambda() const;

  // Tail index splitting {0..C} in half: ceil(C/2).  For odd C this is the
  // critical occupancy level; it also drives the scalar summaries for C = 2.
  int jc_half() const { return (C + 1) / 2; }

  // Critical occupancy level for the even-C analysis: C/2 + 1.
  int jc_even() const;

  // Conjugate index j* = C - j.
  int conjugate(int j) const;
};

// Finite rooted b-ary tree, identified by the distance from the root to the
// boundary: the tree holds `depth` levels of free vertices (levels 0..depth-1,
// root at level 0) and the boundary spins sit at level `depth`.  depth = 1 is
// a single free vertex whose b children are boundary vertices.
struct TreeShape {
  int b;
  int depth;

  TreeShape(int b_, int depth_);

  std::uint64_t level_size(int level) const;  // b^level
  std::uint64_t level_offset(int level) const;
  std::uint64_t vertex_count() const;    // (b^depth - 1)/(b - 1)
  std::uint64_t boundary_size() const;   // b^depth
};

enum class BoundaryKind { Empty, Full, ConstantSpin, PerVertex };

// Spin assignment on the boundary level.  Empty and Full are the extremal
// constant assignments 0 and C; PerVertex carries one spin per boundary
// vertex, indexed by position within the boundary level.
struct BoundaryCondition {
  BoundaryKind kind = BoundaryKind::Empty;
  int constant_spin = 0;
  std::vector<std::uint8_t> spins;  // PerVertex only

  static BoundaryCondition empty();
  static BoundaryCondition full();
  static BoundaryCondition constant(int c);
  static BoundaryCondition per_vertex(std::vector<std::uint8_t> spins);

  bool uniform() const { return kind != BoundaryKind::PerVertex; }

  // Constant value for uniform kinds; throws for PerVertex.
  int constant_value(int C) const;

  // Spin of the boundary vertex at `pos`; validated against C.
  int spin_at(std::uint64_t pos, int C) const;

  // Checks spins fit {0..C} and, for PerVertex, the size matches the shape.
  void validate(const TreeShape& shape, int C) const;
};

// Spins on the free vertices of a TreeShape, stored level by level.  Vertex
// (level, pos) has children (level+1, pos*b ... pos*b+b-1); the children of a
// leaf (level depth-1) are boundary vertices with the same position rule.
struct TreeConfig {
  TreeShape shape;
  std::vector<std::uint8_t> spins;

  explicit TreeConfig(const TreeShape& shape_, int fill = 0);

  std::uint64_t index(int level, std::uint64_t pos) const {
    return shape.level_offset(level) + pos;
  }
  int at(int level, std::uint64_t pos) const { return spins[index(level, pos)]; }
  void set(int level, std::uint64_t pos, int value) {
    spins[index(level, pos)] = static_cast<std::uint8_t>(value);
  }
};

// True iff every parent-child pair inside the tree satisfies the edge budget
// sigma_parent + sigma_child <= C and all spins lie in {0..C}.  Boundary
// spins are not consulted here; pair with a BoundaryCondition via
// feasible_with_boundary when the boundary matters.
bool feasible(const TreeConfig& config, const ModelParams& params);

bool feasible_with_boundary(const TreeConfig& config, const ModelParams& params,
                            const BoundaryCondition& bc);

// log of lambda^(sum of spins); throws std::domain_error on an infeasible
// configuration (its weight is zero).
double log_weight(const TreeConfig& config, const ModelParams& params);
double weight(const TreeConfig& config, const ModelParams& params);

// Alternating partial order: sigma <= eta iff sigma_v <= eta_v on even levels
// and sigma_v >= eta_v on odd levels.  Throws on shape mismatch.
bool partial_order_leq(const TreeConfig& sigma, const TreeConfig& eta);

}  // namespace hardcore
