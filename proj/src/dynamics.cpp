#include "hardcore/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hardcore/rng.hpp"

namespace hardcore {

int max_allowed_spin(const TreeConfig& config, int level, std::uint64_t pos,
                     const ModelParams& params, const BoundaryCondition& bc) {
  const TreeShape& shape = config.shape;
  int max_neighbor = 0;
  if (level > 0)
    max_neighbor = std::max(
        max_neighbor, config.at(level - 1, pos / static_cast<std::uint64_t>(shape.b)));
  if (level + 1 < shape.depth) {
    for (int k = 0; k < shape.b; ++k)
      max_neighbor = std::max(
          max_neighbor, config.at(level + 1, pos * static_cast<std::uint64_t>(shape.b) + k));
  } else {
    for (int k = 0; k < shape.b; ++k)
      max_neighbor = std::max(
          max_neighbor,
          bc.spin_at(pos * static_cast<std::uint64_t>(shape.b) + k, params.C));
  }
  return params.C - max_neighbor;
}

int invert_site_cdf(int cap, double lambda, double u) {
  double total = 0.0, w = 1.0;
  for (int s = 0; s <= cap; ++s) {
    total += w;
    w *= lambda;
  }
  double threshold = u * total, acc = 0.0;
  w = 1.0;
  for (int s = 0; s <= cap; ++s) {
    acc += w;
    if (acc >= threshold) return s;
    w *= lambda;
  }
  return cap;
}

double site_update_prob(const TreeConfig& config, int level, std::uint64_t pos,
                        int new_spin, const ModelParams& params,
                        const BoundaryCondition& bc) {
  int cap = max_allowed_spin(config, level, pos, params, bc);
  if (new_spin < 0 || new_spin > cap) return 0.0;
  double total = 0.0, w = 1.0;
  for (int s = 0; s <= cap; ++s) {
    total += w;
    w *= params.lambda;
  }
  return std::pow(params.lambda, new_spin) / total;
}

namespace {

// Ordering-minimal and maximal feasible configurations: the alternating
// extremes 0/C and C/0 by level parity.
TreeConfig alternating_config(const TreeShape& shape, int C, bool minimal) {
  TreeConfig config(shape);
  for (int level = 0; level < shape.depth; ++level) {
    bool even = level % 2 == 0;
    int value = (even == minimal) ? 0 : C;
    std::uint64_t n = shape.level_size(level);
    for (std::uint64_t pos = 0; pos < n; ++pos) config.set(level, pos, value);
  }
  return config;
}

}  // namespace

TripleState make_triple(const TreeShape& shape, const ModelParams& params,
                        const BoundaryCondition& bc_tau, std::uint64_t seed) {
  if (shape.b != params.b)
    throw std::invalid_argument("shape and params disagree on b");
  bc_tau.validate(shape, params.C);
  TripleState state{alternating_config(shape, params.C, true), TreeConfig(shape),
                    alternating_config(shape, params.C, false), seed,
                    make_engine(seed)};
  return state;
}

namespace {

BoundaryCondition lower_bc(const TreeShape& shape) {
  return shape.depth % 2 == 0 ? BoundaryCondition::empty() : BoundaryCondition::full();
}

BoundaryCondition upper_bc(const TreeShape& shape) {
  return shape.depth % 2 == 0 ? BoundaryCondition::full() : BoundaryCondition::empty();
}

void update_site(TripleState& state, const ModelParams& params,
                 const BoundaryCondition& bc_tau, int level, std::uint64_t pos,
                 double u) {
  const BoundaryCondition lo = lower_bc(state.lower.shape);
  const BoundaryCondition hi = upper_bc(state.upper.shape);
  int cap_lo = max_allowed_spin(state.lower, level, pos, params, lo);
  int cap_tau = max_allowed_spin(state.target, level, pos, params, bc_tau);
  int cap_hi = max_allowed_spin(state.upper, level, pos, params, hi);
  state.lower.set(level, pos, invert_site_cdf(cap_lo, params.lambda, u));
  state.target.set(level, pos, invert_site_cdf(cap_tau, params.lambda, u));
  state.upper.set(level, pos, invert_site_cdf(cap_hi, params.lambda, u));
}

}  // namespace

void heat_bath_sweep(TripleState& state, const ModelParams& params,
                     const BoundaryCondition& bc_tau) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const TreeShape& shape = state.target.shape;
  for (int level = 0; level < shape.depth; ++level) {
    std::uint64_t n = shape.level_size(level);
    for (std::uint64_t pos = 0; pos < n; ++pos)
      update_site(state, params, bc_tau, level, pos, unif(state.rng));
  }
}

void heat_bath_random_site(TripleState& state, const ModelParams& params,
                           const BoundaryCondition& bc_tau) {
  const TreeShape& shape = state.target.shape;
  std::uniform_int_distribution<std::uint64_t> pick(0, shape.vertex_count() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uint64_t idx = pick(state.rng);
  int level = 0;
  while (idx >= shape.level_offset(level + 1)) ++level;
  std::uint64_t pos = idx - shape.level_offset(level);
  update_site(state, params, bc_tau, level, pos, unif(state.rng));
}

bool ordering_ok(const TripleState& state) {
  return partial_order_leq(state.lower, state.target) &&
         partial_order_leq(state.target, state.upper);
}

SampleResult sample_root_marginal(const TreeShape& shape, const ModelParams& params,
                                  const BoundaryCondition& bc_tau, long sweeps,
                                  long burn_in, std::uint64_t seed) {
  if (sweeps <= burn_in)
    throw std::invalid_argument("no samples left: sweeps must exceed burn_in");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  TripleState state = make_triple(shape, params, bc_tau, seed);
  for (long s = 0; s < burn_in; ++s) heat_bath_sweep(state, params, bc_tau);

  const long samples = sweeps - burn_in;
  std::vector<long> counts(params.num_states(), 0);
  std::vector<int> series;
  series.reserve(samples);
  for (long s = 0; s < samples; ++s) {
    heat_bath_sweep(state, params, bc_tau);
    int root = state.target.at(0, 0);
    ++counts[root];
    series.push_back(root);
  }

  SampleResult out;
  out.samples = samples;
  out.seed = seed;
  std::vector<double> p(params.num_states());
  for (int i = 0; i <= params.C; ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(samples);
  out.law = RootLaw{std::move(p), shape.depth};

  // batch means absorb the sweep-to-sweep correlation
  long nb = std::min<long>(64, samples);
  long batch = samples / nb;
  out.std_error.assign(params.num_states(), 0.0);
  for (int i = 0; i <= params.C; ++i) {
    double mean = out.law.p[i];
    double var = 0.0;
    for (long bidx = 0; bidx < nb; ++bidx) {
      long hits = 0;
      for (long k = bidx * batch; k < (bidx + 1) * batch; ++k)
        if (series[k] == i) ++hits;
      double bm = static_cast<double>(hits) / static_cast<double>(batch);
      var += (bm - mean) * (bm - mean);
    }
    var /= std::max<long>(1, nb - 1);
    out.std_error[i] = std::sqrt(var / nb);
  }
  return out;
}

}  // namespace hardcore
