#include "hardcore/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hardcore {

ModelParams::ModelParams(int b_, int C_, double lambda_)
    : b(b_), C(C_), lambda(lambda_) {
  if (b < 2) throw std::invalid_argument("b must be >= 2");
  if (C < 1) throw std::invalid_argument("C must be >= 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive");
}

double ModelParams::a_lambda() const {
  if (lambda >= 1.0)
    throw std::domain_error("a_lambda requires lambda < 1");
  return 1.0 / (1.0 - lambda);
}

int ModelParams::jc_even() const {
  if (C % 2 != 0)
    throw std::domain_error("jc_even requires even C");
  return C / 2 + 1;
}

int ModelParams::conjugate(int j) const {
  if (j < 0 || j > C)
    throw std::domain_error("conjugate index out of range");
  return C - j;
}

TreeShape::TreeShape(int b_, int depth_) : b(b_), depth(depth_) {
  if (b < 2) throw std::invalid_argument("b must be >= 2");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
}

std::uint64_t TreeShape::level_size(int level) const {
  std::uint64_t n = 1;
  for (int i = 0; i < level; ++i) n *= static_cast<std::uint64_t>(b);
  return n;
}

std::uint64_t TreeShape::level_offset(int level) const {
  std::uint64_t n = 0, p = 1;
  for (int i = 0; i < level; ++i) {
    n += p;
    p *= static_cast<std::uint64_t>(b);
  }
  return n;
}

std::uint64_t TreeShape::vertex_count() const { return level_offset(depth); }

std::uint64_t TreeShape::boundary_size() const { return level_size(depth); }

BoundaryCondition BoundaryCondition::empty() {
  return BoundaryCondition{BoundaryKind::Empty, 0, {}};
}

BoundaryCondition BoundaryCondition::full() {
  return BoundaryCondition{BoundaryKind::Full, 0, {}};
}

BoundaryCondition BoundaryCondition::constant(int c) {
  if (c < 0) throw std::invalid_argument("boundary spin must be >= 0");
  return BoundaryCondition{BoundaryKind::ConstantSpin, c, {}};
}

BoundaryCondition BoundaryCondition::per_vertex(std::vector<std::uint8_t> spins) {
  BoundaryCondition bc{BoundaryKind::PerVertex, 0, std::move(spins)};
  return bc;
}

int BoundaryCondition::constant_value(int C) const {
  switch (kind) {
    case BoundaryKind::Empty: return 0;
    case BoundaryKind::Full: return C;
    case BoundaryKind::ConstantSpin: return constant_spin;
    case BoundaryKind::PerVertex:
      throw std::domain_error("per-vertex boundary has no constant value");
  }
  throw std::logic_error("unreachable");
}

int BoundaryCondition::spin_at(std::uint64_t pos, int C) const {
  if (kind == BoundaryKind::PerVertex) {
    if (pos >= spins.size())
      throw std::out_of_range("boundary position out of range");
    return spins[pos];
  }
  return constant_value(C);
}

void BoundaryCondition::validate(const TreeShape& shape, int C) const {
  if (kind == BoundaryKind::PerVertex) {
    if (spins.size() != shape.boundary_size())
      throw std::invalid_argument("boundary size mismatch: expected " +
                                  std::to_string(shape.boundary_size()) +
                                  " spins, got " + std::to_string(spins.size()));
    for (auto s : spins)
      if (s > C) throw std::invalid_argument("boundary spin exceeds C");
  } else if (constant_value(C) < 0 || constant_value(C) > C) {
    throw std::invalid_argument("boundary spin exceeds C");
  }
}

TreeConfig::TreeConfig(const TreeShape& shape_, int fill)
    : shape(shape_), spins(shape_.vertex_count(), static_cast<std::uint8_t>(fill)) {}

bool feasible(const TreeConfig& config, const ModelParams& params) {
  const auto& shape = config.shape;
  for (auto s : config.spins)
    if (s > params.C) return false;
  for (int level = 1; level < shape.depth; ++level) {
    std::uint64_t n = shape.level_size(level);
    for (std::uint64_t pos = 0; pos < n; ++pos) {
      int parent = config.at(level - 1, pos / static_cast<std::uint64_t>(shape.b));
      if (parent + config.at(level, pos) > params.C) return false;
    }
  }
  return true;
}

bool feasible_with_boundary(const TreeConfig& config, const ModelParams& params,
                            const BoundaryCondition& bc) {
  if (!feasible(config, params)) return false;
  bc.validate(config.shape, params.C);
  const auto& shape = config.shape;
  std::uint64_t leaves = shape.level_size(shape.depth - 1);
  for (std::uint64_t pos = 0; pos < leaves; ++pos) {
    int leaf = config.at(shape.depth - 1, pos);
    for (int k = 0; k < shape.b; ++k) {
      std::uint64_t child = pos * static_cast<std::uint64_t>(shape.b) + k;
      if (leaf + bc.spin_at(child, params.C) > params.C) return false;
    }
  }
  return true;
}

double log_weight(const TreeConfig& config, const ModelParams& params) {
  if (!feasible(config, params))
    throw std::domain_error("configuration violates an edge constraint");
  std::uint64_t total = 0;
  for (auto s : config.spins) total += s;
  return static_cast<double>(total) * std::log(params.lambda);
}

double weight(const TreeConfig& config, const ModelParams& params) {
  return std::exp(log_weight(config, params));
}

bool partial_order_leq(const TreeConfig& sigma, const TreeConfig& eta) {
  if (sigma.shape.b != eta.shape.b || sigma.shape.depth != eta.shape.depth)
    throw std::invalid_argument("partial order needs matching shapes");
  const auto& shape = sigma.shape;
  for (int level = 0; level < shape.depth; ++level) {
    std::uint64_t n = shape.level_size(level);
    bool even = level % 2 == 0;
    for (std::uint64_t pos = 0; pos < n; ++pos) {
      int a = sigma.at(level, pos), b = eta.at(level, pos);
      if (even ? a > b : a < b) return false;
    }
  }
  return true;
}

}  // namespace hardcore
