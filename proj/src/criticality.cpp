#include "hardcore/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hardcore/exact_tree.hpp"
#include "hardcore/numeric.hpp"
#include "hardcore/scalar_maps.hpp"

namespace hardcore {

namespace {

double sup_diff(const RootLaw& a, const RootLaw& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.p.size(); ++i)
    d = std::max(d, std::abs(a.p[i] - b.p[i]));
  return d;
}

// Empty and full boundary chains advanced in lockstep, with the last law of
// each parity retained per chain.
struct ChainPair {
  RootLaw empty_even, empty_odd, full_even, full_odd;
  double delta = 0.0;  // TV gap between the even-level limits
  double noise = 0.0;  // positional uncertainty of the polished limits
  long levels = 0;
  bool capped = false;
};

// Solves A x = rhs in place by Gaussian elimination with partial pivoting.
// Dimensions here are C, so no factorization library is warranted.
bool solve_dense(std::vector<double>& a, std::vector<double>& rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < 1e-14) return false;
    if (pivot != col) {
      for (int c = col; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    for (int c = r + 1; c < n; ++c) rhs[r] -= a[r * n + c] * rhs[c];
    rhs[r] /= a[r * n + r];
  }
  return true;
}

// Two law steps on the free coordinates q = p[1..C]; p[0] = 1 - sum(q).
std::vector<double> two_step_free(const std::vector<double>& q,
                                  const ModelParams& params, int level) {
  std::vector<double> p(params.num_states());
  double head = 1.0;
  for (int i = 1; i <= params.C; ++i) {
    p[i] = q[i - 1];
    head -= q[i - 1];
  }
  p[0] = head;
  RootLaw law{std::move(p), level};
  law = law_step(law_step(law, params), params);
  return std::vector<double>(law.p.begin() + 1, law.p.end());
}

struct PolishInfo {
  double residual = 0.0;   // achieved sup-norm residual of Phi2(q) - q
  double sigma_min = 1.0;  // conditioning of I - DPhi2 at the solution
};

// Polishes `law` to a fixed point of the two-level map by damped Newton with
// a finite-difference Jacobian.  Iterating the map stalls when the relevant
// contraction factor degenerates to 1 near the transition; Newton does not
// care about the contraction factor, only about I - DPhi staying invertible,
// which fails exactly at the transition point and nowhere else.
bool newton_polish(RootLaw& law, const ModelParams& params, PolishInfo& info) {
  const int n = params.C;
  std::vector<double> q(law.p.begin() + 1, law.p.end());
  auto residual = [&](const std::vector<double>& v) {
    std::vector<double> r = two_step_free(v, params, law.level);
    for (int i = 0; i < n; ++i) r[i] -= v[i];
    return r;
  };
  auto sup = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  };

  std::vector<double> r = residual(q);
  std::vector<double> jac_last;
  for (int iter = 0; iter < 60; ++iter) {
    double rnorm = sup(r);
    if (rnorm < 1e-14) break;
    std::vector<double> jac(n * n);
    for (int j = 0; j < n; ++j) {
      double h = 1e-7 * std::max(std::abs(q[j]), 1e-4);
      std::vector<double> hi = q, lo = q;
      hi[j] += h;
      lo[j] -= h;
      std::vector<double> rh = residual(hi), rl = residual(lo);
      for (int i = 0; i < n; ++i) jac[i * n + j] = (rh[i] - rl[i]) / (2 * h);
    }
    jac_last = jac;
    std::vector<double> step = r;
    if (!solve_dense(jac, step, n)) return false;
    // backtrack until the residual actually drops; a near-flat channel can
    // otherwise throw the iterate across the simplex
    double scale = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 25; ++bt, scale *= 0.5) {
      std::vector<double> trial = q;
      double head = 1.0;
      bool valid = true;
      for (int i = 0; i < n; ++i) {
        trial[i] -= scale * step[i];
        head -= trial[i];
        if (!(trial[i] > -1e-12) || !(trial[i] < 1.0 + 1e-12)) valid = false;
      }
      if (!valid || !(head > -1e-12)) continue;
      std::vector<double> rt = residual(trial);
      if (sup(rt) < rnorm * (1.0 - 0.25 * scale)) {
        q = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) return false;
  }
  if (sup(r) > 1e-12) return false;

  // position noise of the solution is residual / sigma_min(I - DPhi2);
  // estimate sigma_min by one inverse-iteration solve
  info.residual = std::max(sup(r), 1e-16);
  info.sigma_min = 1.0;
  if (!jac_last.empty()) {
    std::vector<double> a = jac_last;
    std::vector<double> y(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (solve_dense(a, y, n)) {
      double norm = 0.0;
      for (double v : y) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 1.0) info.sigma_min = 1.0 / norm;
    }
  }

  std::vector<double> p(params.num_states());
  double head = 1.0, total = 0.0;
  for (int i = 1; i <= params.C; ++i) {
    p[i] = std::max(q[i - 1], 0.0);
    head -= p[i];
  }
  p[0] = std::max(head, 0.0);
  for (double v : p) total += v;
  for (double& v : p) v /= total;
  law.p = std::move(p);
  return true;
}

// Drives both chains until their even-level iterates sit near their limits,
// then pins each limit exactly by Newton.  Pure iteration cannot decide
// coexistence near the transition: the contraction factor behaves like
// 1 - c*|lambda - lambda_cr|^a there, so the raw gap needs ~1/eps^a levels,
// while the polished fixed points separate at machine sharpness.
ChainPair run_chain_pair(const ModelParams& params, const CriticalityOptions& opts) {
  if (!(opts.gap_tol > 0.0) || !(opts.tol > 0.0) || opts.max_even_levels < 2)
    throw std::invalid_argument("bad criticality options");
  RootLaw pe = boundary_law(BoundaryCondition::empty(), params);
  RootLaw pf = boundary_law(BoundaryCondition::full(), params);
  ChainPair out{pe, pe, pf, pf};
  const long max_levels = 2 * opts.max_even_levels;
  const int j = params.jc_half();

  long polish_at = 256;  // even levels before the first polish attempt
  long level = 0;
  bool settled = false;
  double gap = tv_distance(pe, pf);
  while (level < max_levels && !settled) {
    pe = law_step(pe, params);
    pf = law_step(pf, params);
    ++level;
    if (level % 2 != 0) {
      out.empty_odd = pe;
      out.full_odd = pf;
      continue;
    }
    out.empty_even = pe;
    out.full_even = pf;
    gap = tv_distance(pe, pf);
    if (gap < 0.25 * opts.gap_tol && level >= 8) {
      settled = true;
      break;
    }
    if (level / 2 < polish_at) continue;

    RootLaw fe = out.empty_even, ff = out.full_even;
    PolishInfo ie, inf_f;
    bool ok = newton_polish(fe, params, ie) && newton_polish(ff, params, inf_f);
    double noise = ok ? ie.residual / ie.sigma_min + inf_f.residual / inf_f.sigma_min
                      : 0.0;
    if (ok && noise > 1e-3) ok = false;  // conditioning too poor to trust
    // the polished points must respect the boundary ordering; a violation
    // means a chain was still in transit and Newton crossed branches
    if (ok && tail_scalar(fe, j) <= tail_scalar(ff, j) + 1e-9) {
      out.empty_even = fe;
      out.full_even = ff;
      out.empty_odd = law_step(fe, params);
      out.full_odd = law_step(ff, params);
      gap = tv_distance(fe, ff);
      out.noise = noise;
      settled = true;
      break;
    }
    polish_at *= 2;  // let the transit finish, then try again
  }
  out.delta = gap;
  out.levels = level;
  out.capped = !settled;
  return out;
}

PhasePoint phase_point_from(const ChainPair& pair, const ModelParams& params,
                            const CriticalityOptions& opts) {
  PhasePoint pt;
  pt.lambda = params.lambda;
  pt.delta = pair.delta;
  // a gap below the polish noise floor is indistinguishable from zero
  pt.coexists = pair.delta > std::max(opts.gap_tol, 10.0 * pair.noise);
  pt.iterations = pair.levels;
  pt.undetermined = pair.capped;
  int j = params.jc_half();
  double xs[4] = {tail_scalar(pair.empty_even, j), tail_scalar(pair.empty_odd, j),
                  tail_scalar(pair.full_even, j), tail_scalar(pair.full_odd, j)};
  pt.m = *std::min_element(xs, xs + 4);
  pt.M = *std::max_element(xs, xs + 4);
  return pt;
}

}  // namespace

PhasePoint delta_lambda(const ModelParams& params, const CriticalityOptions& opts) {
  return phase_point_from(run_chain_pair(params, opts), params, opts);
}

CriticalSearch find_lambda_cr(int b, int C, double lambda_lo, double lambda_hi,
                              double bracket_tol, const CriticalityOptions& opts) {
  if (!(0.0 < lambda_lo && lambda_lo < lambda_hi))
    throw std::invalid_argument("need 0 < lambda_lo < lambda_hi");
  if (!(bracket_tol > 0.0))
    throw std::invalid_argument("bracket_tol must be positive");

  CriticalSearch out;
  std::vector<PhasePoint> probes;
  auto coexists_at = [&](double lambda) {
    PhasePoint pt = delta_lambda(ModelParams(b, C, lambda), opts);
    probes.push_back(pt);
    return pt.coexists;
  };

  // widen until the bracket straddles the transition
  int guard = 0;
  while (coexists_at(lambda_lo)) {
    lambda_lo *= 0.5;
    if (++guard > 60 || lambda_lo < 1e-12)
      throw std::invalid_argument("no uniqueness regime found above lambda = 0");
  }
  guard = 0;
  while (!coexists_at(lambda_hi)) {
    lambda_hi *= 1.6;
    if (++guard > 60 || lambda_hi > 1e12)
      throw std::invalid_argument("no coexistence found below lambda = 1e12");
  }

  // pre-scan: the indicator must flip exactly once on the bracket
  const int pre_n = 8;
  std::vector<bool> flags(pre_n);
  std::vector<double> grid(pre_n);
  for (int i = 0; i < pre_n; ++i) {
    grid[i] = lambda_lo + (lambda_hi - lambda_lo) * i / (pre_n - 1.0);
    flags[i] = coexists_at(grid[i]);
  }
  int first_true = pre_n;
  for (int i = 0; i < pre_n; ++i)
    if (flags[i]) {
      first_true = i;
      break;
    }
  bool monotone = true;
  for (int i = first_true; i < pre_n; ++i)
    if (!flags[i]) monotone = false;
  std::sort(probes.begin(), probes.end(),
            [](const PhasePoint& a, const PhasePoint& b) { return a.lambda < b.lambda; });
  out.probes = probes;
  if (!monotone || first_true == 0 || first_true == pre_n) {
    out.bracket_valid = false;
    out.lambda_lo = lambda_lo;
    out.lambda_hi = lambda_hi;
    out.diagnostics = "coexistence indicator is not monotone across the probe grid";
    return out;
  }
  double lo = grid[first_true - 1], hi = grid[first_true];

  while (hi - lo > bracket_tol) {
    double mid = 0.5 * (lo + hi);
    (coexists_at(mid) ? hi : lo) = mid;
  }
  std::sort(probes.begin(), probes.end(),
            [](const PhasePoint& a, const PhasePoint& b) { return a.lambda < b.lambda; });
  out.probes = std::move(probes);
  out.lambda_lo = lo;
  out.lambda_hi = hi;
  out.bracket_valid = true;
  out.delta_above = delta_lambda(ModelParams(b, C, hi * 1.001), opts).delta;
  return out;
}

OrderResult classify_order(int b, int C, double lambda_cr,
                           const std::vector<double>& offsets,
                           const CriticalityOptions& opts) {
  if (offsets.size() < 2)
    throw std::invalid_argument("need at least two offsets");
  OrderResult out;
  std::vector<double> os(offsets);
  std::sort(os.begin(), os.end(), std::greater<>());
  for (double o : os) {
    if (!(o > 0.0)) throw std::invalid_argument("offsets must be positive");
    out.probes.push_back(delta_lambda(ModelParams(b, C, lambda_cr * (1.0 + o)), opts));
  }
  for (const auto& pt : out.probes) {
    if (!pt.coexists) {
      out.diagnostics = "no coexistence detected at offset probes; lambda_cr too high?";
      return out;
    }
    if (pt.undetermined) {
      out.diagnostics = "chain did not settle at an offset probe";
      return out;
    }
  }
  // deltas must shrink (weakly) with the offset
  for (size_t i = 1; i < out.probes.size(); ++i) {
    if (out.probes[i].delta > out.probes[i - 1].delta * (1.0 + 1e-9)) {
      out.diagnostics = "delta is not monotone in the offset";
      return out;
    }
  }
  // least-squares fit of log delta against log offset
  double n = static_cast<double>(os.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < os.size(); ++i) {
    double x = std::log(os[i]), y = std::log(out.probes[i].delta);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double c = (sy - p * sx) / n;
  out.fitted_power = p;

  constexpr double power_threshold = 0.15;
  if (p < power_threshold) {
    out.order = TransitionOrder::First;
    // linear-in-offset extrapolation from the two smallest offsets
    size_t k = os.size();
    double o1 = os[k - 1], o2 = os[k - 2];
    double d1 = out.probes[k - 1].delta, d2 = out.probes[k - 2].delta;
    out.jump_estimate = d1 - (d2 - d1) * o1 / (o2 - o1);
    if (C == 2) {
      double floor = epsilon_b(b, lambda_cr);
      if (out.jump_estimate < floor) {
        out.order = TransitionOrder::Undetermined;
        std::ostringstream ss;
        ss << "first-order jump " << out.jump_estimate
           << " fell below the structural floor " << floor;
        out.diagnostics = ss.str();
        return out;
      }
    }
  } else {
    out.order = TransitionOrder::Second;
    out.jump_estimate = std::exp(c + p * std::log(1e-12));
  }
  return out;
}

WindowResult asymptotic_window(int b, int C, const WindowOptions& opts) {
  WindowResult out;
  std::vector<std::pair<double, bool>> gamma_probes;  // gamma, expect coexist
  std::vector<double> lambdas;
  if (C % 2 == 1) {
    if (b < opts.min_b_odd)
      throw std::invalid_argument("odd-C window needs b >= " +
                                  std::to_string(opts.min_b_odd));
    int jc = (C + 1) / 2;
    gamma_probes = {{2.5, false}, {3.2, true}};
    for (auto [g, unused] : gamma_probes)
      lambdas.push_back(std::pow(g / b, 1.0 / jc));
  } else {
    if (b < opts.min_b_even)
      throw std::invalid_argument("even-C window needs b >= " +
                                  std::to_string(opts.min_b_even));
    int jc = C / 2 + 1;
    double pivot = 1.0 / (C + 2);
    gamma_probes = {{0.6 * pivot, false}, {2.0 * pivot, true}};
    for (auto [g, unused] : gamma_probes)
      lambdas.push_back(std::pow(g * std::log(b) / b, 1.0 / jc));
  }
  out.all_match = true;
  for (size_t i = 0; i < gamma_probes.size(); ++i) {
    WindowProbe probe;
    probe.gamma = gamma_probes[i].first;
    probe.expect_coexist = gamma_probes[i].second;
    probe.lambda = lambdas[i];
    probe.outcome = delta_lambda(ModelParams(b, C, lambdas[i]), opts.crit);
    probe.matches =
        !probe.outcome.undetermined && probe.outcome.coexists == probe.expect_coexist;
    out.all_match = out.all_match && probe.matches;
    out.probes.push_back(probe);
  }
  if (C % 2 == 1) {
    // The two mid-spin boundary seeds pin the low and high branches of X(jc)
    // at the coexistence probe.
    ModelParams params(b, C, lambdas[1]);
    IterateOptions it;
    it.tol = opts.crit.tol;
    it.max_even_levels = opts.crit.max_even_levels;
    Trajectory low = iterate(
        boundary_law(BoundaryCondition::constant(C / 2), params), params, it);
    Trajectory high = iterate(
        boundary_law(BoundaryCondition::constant((C + 1) / 2), params), params, it);
    out.x_low_seed = tail_scalar(low.even_limit, params.jc_half());
    out.x_high_seed = tail_scalar(high.even_limit, params.jc_half());
  }
  return out;
}

namespace {

template <typename Fn>
void parallel_over(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 0)
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<std::size_t>(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<PhasePoint> scan_lambda_grid(int b, int C,
                                         const std::vector<double>& lambdas,
                                         int workers,
                                         const CriticalityOptions& opts) {
  std::vector<PhasePoint> out(lambdas.size());
  parallel_over(lambdas.size(), workers, [&](std::size_t i) {
    out[i] = delta_lambda(ModelParams(b, C, lambdas[i]), opts);
  });
  return out;
}

std::vector<MPoint> m_of_lambda_scan(int b, int C,
                                     const std::vector<double>& lambdas,
                                     int workers, const CriticalityOptions& opts) {
  if (C % 2 != 0)
    throw std::invalid_argument("the m(lambda) order parameter is defined for even C");
  std::vector<MPoint> out(lambdas.size());
  parallel_over(lambdas.size(), workers, [&](std::size_t i) {
    ModelParams params(b, C, lambdas[i]);
    ChainPair pair = run_chain_pair(params, opts);
    double tail_full = pair.full_even.tail_ge(C / 2 + 1);
    double tail_empty = pair.empty_even.tail_ge(C / 2 + 1);
    out[i] = MPoint{lambdas[i], tail_full - tail_empty};
  });
  return out;
}

}  // namespace hardcore
