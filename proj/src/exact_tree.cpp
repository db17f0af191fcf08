#include "hardcore/exact_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hardcore/numeric.hpp"

namespace hardcore {

double RootLaw::cum(int m) const {
  if (m < 0) return 0.0;
  m = std::min(m, capacity());
  double s = 0.0;
  for (int k = 0; k <= m; ++k) s += p[k];
  return std::min(s, 1.0);
}

double RootLaw::tail_ge(int k) const {
  if (k <= 0) return 1.0;
  double s = 0.0;
  for (int i = k; i <= capacity(); ++i) s += p[i];
  return std::min(s, 1.0);
}

double RootLaw::Q(int i) const {
  if (p[0] <= 0.0)
    throw std::domain_error("odds undefined: no mass on the empty state");
  return p[i] / p[0];
}

double RootLaw::R(int i) const {
  if (i == 0) return 1.0;
  double c = cum(capacity() - i);
  if (c <= 0.0) return pos_inf;
  return 1.0 / c;
}

RootLaw make_root_law(std::vector<double> p, int level) {
  if (p.size() < 2) throw std::invalid_argument("law needs at least two states");
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument("law entries must be >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("law mass deviates from 1 beyond 1e-12");
  return RootLaw{std::move(p), level};
}

RootLaw boundary_law(const BoundaryCondition& bc, const ModelParams& params) {
  int c = bc.constant_value(params.C);
  if (c > params.C) throw std::invalid_argument("boundary spin exceeds C");
  std::vector<double> p(params.num_states(), 0.0);
  p[c] = 1.0;
  return RootLaw{std::move(p), 0};
}

namespace detail {

double log_cum(const std::vector<double>& logp, int m) {
  int C = static_cast<int>(logp.size()) - 1;
  if (m < 0) return neg_inf;
  if (m >= C) return 0.0;
  double log_tail = neg_inf;
  for (int k = m + 1; k <= C; ++k) log_tail = log_add(log_tail, logp[k]);
  if (log_tail < -0.6931471805599453)  // tail below 1/2: complement is sharper
    return log1m_exp(log_tail);
  double log_head = neg_inf;
  for (int k = 0; k <= m; ++k) log_head = log_add(log_head, logp[k]);
  return std::min(log_head, 0.0);
}

std::vector<double> law_step_logp(const std::vector<double>& logp, int b, int C,
                                  double log_lambda) {
  std::vector<double> next(C + 1, neg_inf);
  for (int i = 0; i <= C; ++i) {
    double lc = log_cum(logp, C - i);
    if (lc == neg_inf) continue;
    next[i] = i * log_lambda + b * lc;
  }
  double norm = log_sum_exp(next);
  if (norm == neg_inf)
    throw std::domain_error("degenerate law: no state has positive mass");
  for (double& x : next)
    if (x != neg_inf) x -= norm;
  return next;
}

}  // namespace detail

namespace {

std::vector<double> logp_of(const RootLaw& law) {
  std::vector<double> lp(law.p.size());
  for (size_t i = 0; i < law.p.size(); ++i)
    lp[i] = law.p[i] > 0.0 ? std::log(law.p[i]) : neg_inf;
  return lp;
}

RootLaw law_from_logp(const std::vector<double>& logp, int level) {
  std::vector<double> p(logp.size());
  double norm = log_sum_exp(logp);
  double sum = 0.0;
  for (size_t i = 0; i < logp.size(); ++i) {
    p[i] = logp[i] == neg_inf ? 0.0 : std::exp(logp[i] - norm);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return RootLaw{std::move(p), level};
}

constexpr std::uint64_t kExplicitLimit = 1u << 20;

// Bottom-up pass with one logZ vector per vertex, each normalised to its own
// spin-0 entry.  Handles heterogeneous children, so PerVertex boundaries and
// the cross-check against the level recursion both go through here.
PartitionVector dp_explicit(const TreeShape& shape, const BoundaryCondition& bc,
                            const ModelParams& params) {
  const int C = params.C;
  const double log_lambda = std::log(params.lambda);
  std::vector<std::vector<double>> below;  // level+1 vectors, one per vertex
  for (int level = shape.depth - 1; level >= 0; --level) {
    std::uint64_t n = shape.level_size(level);
    std::vector<std::vector<double>> current(n);
    for (std::uint64_t pos = 0; pos < n; ++pos) {
      std::vector<double> logZ(C + 1, neg_inf);
      if (level == shape.depth - 1) {
        int cmax = 0;
        for (int k = 0; k < shape.b; ++k)
          cmax = std::max(cmax, bc.spin_at(pos * shape.b + k, C));
        for (int i = 0; i + cmax <= C; ++i) logZ[i] = i * log_lambda;
      } else {
        for (int i = 0; i <= C; ++i) {
          double acc = i * log_lambda;
          for (int k = 0; k < shape.b && acc != neg_inf; ++k) {
            const auto& child = below[pos * shape.b + k];
            double lc = neg_inf;
            for (int j = 0; j <= C - i; ++j) lc = log_add(lc, child[j]);
            acc = lc == neg_inf ? neg_inf : acc + lc;
          }
          logZ[i] = acc;
        }
      }
      if (logZ[0] == neg_inf)
        throw std::domain_error("empty ensemble: zero partition function");
      for (int i = C; i >= 0; --i)
        if (logZ[i] != neg_inf) logZ[i] -= logZ[0];
      current[pos] = std::move(logZ);
    }
    below = std::move(current);
  }
  return PartitionVector{std::move(below[0]), shape.depth};
}

// Uniform boundary: every vertex of a level shares one vector, so the pass is
// the normalised level recursion re-expressed as Z(i)/Z(0) ratios.
PartitionVector dp_symmetric(const TreeShape& shape, const BoundaryCondition& bc,
                             const ModelParams& params) {
  const double log_lambda = std::log(params.lambda);
  std::vector<double> logp = logp_of(boundary_law(bc, params));
  for (int level = 0; level < shape.depth; ++level)
    logp = detail::law_step_logp(logp, shape.b, params.C, log_lambda);
  std::vector<double> logZ(logp.size());
  for (size_t i = 0; i < logp.size(); ++i)
    logZ[i] = logp[i] == neg_inf ? neg_inf : logp[i] - logp[0];
  return PartitionVector{std::move(logZ), shape.depth};
}

}  // namespace

PartitionVector dp_partition(const TreeShape& shape, const BoundaryCondition& bc,
                             const ModelParams& params) {
  if (shape.b != params.b)
    throw std::invalid_argument("shape and params disagree on b");
  bc.validate(shape, params.C);
  if (shape.vertex_count() <= kExplicitLimit) return dp_explicit(shape, bc, params);
  if (!bc.uniform())
    throw std::invalid_argument("per-vertex boundary too large for explicit pass");
  return dp_symmetric(shape, bc, params);
}

RootLaw root_marginal(const TreeShape& shape, const BoundaryCondition& bc,
                      const ModelParams& params) {
  PartitionVector z = dp_partition(shape, bc, params);
  return law_from_logp(z.logZ, z.level);
}

double tv_distance(const RootLaw& a, const RootLaw& b) {
  if (a.p.size() != b.p.size())
    throw std::invalid_argument("laws live on different spin ranges");
  double s = 0.0;
  for (size_t i = 0; i < a.p.size(); ++i) s += std::abs(a.p[i] - b.p[i]);
  return 0.5 * s;
}

double conditional_tv(const RootLaw& unconditioned, int i, int k) {
  int C = unconditioned.capacity();
  if (!(0 <= k && k < i && i <= C))
    throw std::invalid_argument("conditional_tv needs 0 <= k < i <= C");
  double denom = unconditioned.cum(C - k);
  if (denom <= 0.0)
    throw std::domain_error("conditioning event has zero mass");
  double numer = 0.0;
  for (int j = C - i + 1; j <= C - k; ++j) numer += unconditioned.p[j];
  return numer / denom;
}

double conditional_tv(const TreeShape& shape, const BoundaryCondition& bc,
                      const ModelParams& params, int i, int k) {
  return conditional_tv(root_marginal(shape, bc, params), i, k);
}

namespace {

struct BruteForcePass {
  int C;
  std::vector<double> lambda_pow;  // lambda^s, s = 0..C
  std::vector<int> parent;         // flat BFS index of each vertex's parent
  std::vector<int> max_spin;       // cap from the boundary (leaves) or C
  std::vector<int> spin;
  std::vector<double> mass;        // accumulated weight per root spin

  void descend(std::size_t idx, double w) {
    if (idx == spin.size()) {
      mass[spin[0]] += w;
      return;
    }
    int cap = max_spin[idx];
    if (idx > 0) cap = std::min(cap, C - spin[parent[idx]]);
    for (int s = 0; s <= cap; ++s) {
      spin[idx] = s;
      descend(idx + 1, w * lambda_pow[s]);
    }
  }
};

}  // namespace

RootLaw brute_force_marginal(const TreeShape& shape, const BoundaryCondition& bc,
                             const ModelParams& params,
                             std::uint64_t max_vertices) {
  if (shape.b != params.b)
    throw std::invalid_argument("shape and params disagree on b");
  if (shape.vertex_count() > max_vertices)
    throw std::invalid_argument("tree too large for enumeration: " +
                                std::to_string(shape.vertex_count()) +
                                " vertices exceeds the guard of " +
                                std::to_string(max_vertices));
  bc.validate(shape, params.C);
  const std::size_t n = shape.vertex_count();
  BruteForcePass pass;
  pass.C = params.C;
  pass.lambda_pow.resize(params.num_states());
  for (int s = 0; s <= params.C; ++s)
    pass.lambda_pow[s] = std::pow(params.lambda, s);
  pass.parent.assign(n, -1);
  for (int level = 1; level < shape.depth; ++level) {
    std::uint64_t sz = shape.level_size(level);
    for (std::uint64_t pos = 0; pos < sz; ++pos)
      pass.parent[shape.level_offset(level) + pos] =
          static_cast<int>(shape.level_offset(level - 1) + pos / shape.b);
  }
  pass.max_spin.assign(n, params.C);
  std::uint64_t leaf_start = shape.level_offset(shape.depth - 1);
  for (std::uint64_t pos = 0; pos < shape.level_size(shape.depth - 1); ++pos) {
    int cmax = 0;
    for (int k = 0; k < shape.b; ++k)
      cmax = std::max(cmax, bc.spin_at(pos * shape.b + k, params.C));
    pass.max_spin[leaf_start + pos] = params.C - cmax;
  }
  pass.spin.assign(n, 0);
  pass.mass.assign(params.num_states(), 0.0);
  pass.descend(0, 1.0);
  double total = 0.0;
  for (double m : pass.mass) total += m;
  if (total <= 0.0)
    throw std::domain_error("empty ensemble: zero partition function");
  std::vector<double> p(pass.mass);
  for (double& x : p) x /= total;
  return RootLaw{std::move(p), shape.depth};
}

}  // namespace hardcore
