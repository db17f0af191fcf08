#include "hardcore/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hardcore/numeric.hpp"

namespace hardcore {

namespace {

std::vector<double> to_logp(const RootLaw& law) {
  std::vector<double> lp(law.p.size());
  for (size_t i = 0; i < law.p.size(); ++i)
    lp[i] = law.p[i] > 0.0 ? std::log(law.p[i]) : neg_inf;
  return lp;
}

RootLaw from_logp(const std::vector<double>& logp, int level) {
  std::vector<double> p(logp.size());
  double sum = 0.0;
  for (size_t i = 0; i < logp.size(); ++i) {
    p[i] = logp[i] == neg_inf ? 0.0 : std::exp(logp[i]);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return RootLaw{std::move(p), level};
}

double sup_diff(const RootLaw& a, const RootLaw& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.p.size(); ++i)
    d = std::max(d, std::abs(a.p[i] - b.p[i]));
  return d;
}

}  // namespace

RootLaw law_step(const RootLaw& law, const ModelParams& params) {
  if (law.capacity() != params.C)
    throw std::invalid_argument("law capacity does not match params");
  auto next =
      detail::law_step_logp(to_logp(law), params.b, params.C, std::log(params.lambda));
  return from_logp(next, law.level + 1);
}

double tail_scalar(const RootLaw& law, int j) {
  int C = law.capacity();
  if (j < 1 || j > C) throw std::invalid_argument("scalar index out of range");
  double den = law.cum(C - j);
  if (den <= 0.0) return pos_inf;
  return law.tail_ge(C - j + 1) / den;
}

C2State c2_seed(const BoundaryCondition& bc, const ModelParams& params) {
  if (params.C != 2) throw std::invalid_argument("c2 recursion requires C = 2");
  RootLaw p0 = boundary_law(bc, params);
  RootLaw p1 = law_step(p0, params);
  return C2State{p0.R(1), p1.R(1)};
}

C2State c2_two_step(const C2State& state, const ModelParams& params) {
  if (params.C != 2) throw std::invalid_argument("c2 recursion requires C = 2");
  const double lambda = params.lambda;
  const double b = params.b;
  // lambda / Y^b with the convention lambda / inf = 0 exactly
  auto inv_pow = [&](double y) {
    if (y == pos_inf) return 0.0;
    return lambda / std::pow(y, b);
  };
  double denom = (std::pow(state.y_curr, b) + lambda) *
                 std::pow(1.0 + inv_pow(state.y_prev), b);
  double y_next = 1.0 + lambda * lambda / denom;
  return C2State{state.y_curr, y_next};
}

namespace {

// Estimated distance from the current iterate to its subsequence limit,
// assuming geometric decay of successive differences.
double remaining_estimate(double diff, double prev_diff) {
  if (diff <= 0.0) return 0.0;
  if (prev_diff <= diff) return pos_inf;  // not contracting yet
  double r = diff / prev_diff;
  return diff * r / (1.0 - r);
}

}  // namespace

Trajectory iterate(const RootLaw& seed, const ModelParams& params,
                   const IterateOptions& opts) {
  if (seed.capacity() != params.C)
    throw std::invalid_argument("seed capacity does not match params");
  if (!(opts.tol > 0.0) || opts.max_even_levels < 2)
    throw std::invalid_argument("need tol > 0 and max_even_levels >= 2");
  int j = opts.scalar_index > 0 ? opts.scalar_index : params.jc_half();

  Trajectory out;
  if (opts.record_laws) out.laws.push_back(seed);

  RootLaw same_parity = seed;        // last law with the seed's level parity
  RootLaw other_parity = seed;       // placeholder until one step happens
  double diff_same = pos_inf, prev_diff_same = pos_inf;
  double diff_other = pos_inf, prev_diff_other = pos_inf;

  RootLaw current = seed;
  long max_steps = 2 * opts.max_even_levels;
  long step = 0;
  bool other_seen = false;
  for (; step < max_steps; ++step) {
    RootLaw next = law_step(current, params);
    if (opts.record_laws) out.laws.push_back(next);
    bool next_same_parity = (step % 2) == 1;
    if (next_same_parity) {
      prev_diff_same = diff_same;
      diff_same = sup_diff(next, same_parity);
      same_parity = next;
    } else {
      if (other_seen) {
        prev_diff_other = diff_other;
        diff_other = sup_diff(next, other_parity);
      }
      other_parity = next;
      other_seen = true;
    }
    current = std::move(next);
    if (diff_same < opts.tol && diff_other < opts.tol) {
      ++step;
      break;
    }
  }
  out.levels = step;

  const RootLaw& even_law = (seed.level % 2 == 0) ? same_parity : other_parity;
  const RootLaw& odd_law = (seed.level % 2 == 0) ? other_parity : same_parity;
  out.even_limit = even_law;
  out.odd_limit = odd_law;

  double gap = sup_diff(even_law, odd_law);
  if (diff_same < opts.tol && diff_other < opts.tol) {
    double slack = remaining_estimate(diff_same, prev_diff_same) +
                   remaining_estimate(diff_other, prev_diff_other);
    if (!std::isfinite(slack)) slack = 0.0;
    out.status = gap > 10.0 * slack + opts.tol ? IterStatus::ConvergedPeriod2
                                               : IterStatus::ConvergedUnique;
  } else {
    out.status = IterStatus::MaxIterations;
  }

  double xe = tail_scalar(even_law, j);
  double xo = tail_scalar(odd_law, j);
  out.m = std::min(xe, xo);
  out.M = std::max(xe, xo);
  return out;
}

C2Trajectory iterate_c2(const C2State& seed, const ModelParams& params,
                        const IterateOptions& opts) {
  C2Trajectory out;
  out.ys.push_back(seed.y_prev);
  out.ys.push_back(seed.y_curr);

  C2State state = seed;
  double same = seed.y_curr, other = seed.y_prev;
  double diff_same = pos_inf, prev_diff_same = pos_inf;
  double diff_other = pos_inf, prev_diff_other = pos_inf;
  long max_steps = 2 * opts.max_even_levels;
  long step = 0;
  for (; step < max_steps; ++step) {
    state = c2_two_step(state, params);
    out.ys.push_back(state.y_curr);
    double scale = std::max(1.0, std::abs(state.y_curr));
    if ((step % 2) == 0) {
      prev_diff_other = diff_other;
      diff_other = std::abs(state.y_curr - other) / scale;
      other = state.y_curr;
    } else {
      prev_diff_same = diff_same;
      diff_same = std::abs(state.y_curr - same) / scale;
      same = state.y_curr;
    }
    if (diff_same < opts.tol && diff_other < opts.tol) {
      ++step;
      break;
    }
  }
  out.levels = step;

  // seed pair occupies levels 0 and 1, so `other` (first updated at level 2)
  // tracks the even levels and `same` the odd ones
  double even_y = other, odd_y = same;
  out.even_limit = even_y;
  out.odd_limit = odd_y;

  double gap = std::abs(even_y - odd_y);
  if (diff_same < opts.tol && diff_other < opts.tol) {
    double slack = remaining_estimate(diff_same, prev_diff_same) +
                   remaining_estimate(diff_other, prev_diff_other);
    if (!std::isfinite(slack)) slack = 0.0;
    out.status = gap > 10.0 * slack + opts.tol ? IterStatus::ConvergedPeriod2
                                               : IterStatus::ConvergedUnique;
  } else {
    out.status = IterStatus::MaxIterations;
  }
  out.m = std::min(even_y, odd_y) - 1.0;
  out.M = std::max(even_y, odd_y) - 1.0;
  return out;
}

EnvelopePair envelope_maps(int j, const ModelParams& params) {
  if (j < 1 || j > params.C)
    throw std::invalid_argument("envelope index must lie in [1, C]");
  double A = params.a_lambda();  // throws unless lambda < 1
  int jstar = params.conjugate(j);
  double level_factor = std::pow(params.lambda, jstar - j + 1);
  double lam_j = std::pow(params.lambda, j);
  return EnvelopePair{
      ScalarMap::scaled_j2(params.b, A * lam_j, level_factor / (A * A)),
      ScalarMap::scaled_j2(params.b, lam_j / A, level_factor * A * A)};
}

}  // namespace hardcore
