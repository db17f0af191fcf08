#pragma once

#include <vector>

#include "hardcore/exact_tree.hpp"
#include "hardcore/model.hpp"
#include "hardcore/scalar_maps.hpp"

namespace hardcore {

// One level of the root-law recursion: p'(i) proportional to
// lambda^i * P_p(sigma <= C-i)^b.  Level counter advances by one.
RootLaw law_step(const RootLaw& law, const ModelParams& params);

// Tail-to-head odds X(j) = P(sigma >= C-j+1) / P(sigma <= C-j) = R(j) - 1.
// +inf when the conditioning mass vanishes (degenerate seeds).
double tail_scalar(const RootLaw& law, int j);

// C = 2 closed form: the whole law is summarised by Y = R(1), which obeys a
// recursion in (Y_{n-1}, Y_n).  y_prev = +inf encodes the full-boundary seed,
// where lambda / Y^b is an exact zero.
struct C2State {
  double y_prev;
  double y_curr;
};

C2State c2_seed(const BoundaryCondition& bc, const ModelParams& params);
C2State c2_two_step(const C2State& state, const ModelParams& params);

enum class IterStatus { ConvergedUnique, ConvergedPeriod2, MaxIterations };

struct IterateOptions {
  double tol = 1e-12;
  long max_even_levels = 100000;
  bool record_laws = false;
  int scalar_index = -1;  // X(j) summary index; -1 means ceil(C/2)
};

// Even and odd levels are tracked as separate subsequences: each converges on
// its own, and a persistent gap between them is the period-2 signature.
struct Trajectory {
  std::vector<RootLaw> laws;  // seed first, when recorded
  RootLaw even_limit;
  RootLaw odd_limit;
  IterStatus status = IterStatus::MaxIterations;
  long levels = 0;  // law_step applications performed
  double m = 0.0;   // min of the two subsequence limits of X(j)
  double M = 0.0;   // max
};

Trajectory iterate(const RootLaw& seed, const ModelParams& params,
                   const IterateOptions& opts = {});

struct C2Trajectory {
  std::vector<double> ys;  // Y by level, seed pair first
  double even_limit = 0.0;
  double odd_limit = 0.0;
  IterStatus status = IterStatus::MaxIterations;
  long levels = 0;
  double m = 0.0;  // limits of X = Y - 1
  double M = 0.0;
};

C2Trajectory iterate_c2(const C2State& seed, const ModelParams& params,
                        const IterateOptions& opts = {});

// Two-level comparison maps for the scalar X_n(j) at activity lambda < 1:
// X_{n+2}(j) is trapped between lower(X_n(j)) and upper(X_n(j)), both scaled
// copies of J2 at shifted activities.
struct EnvelopePair {
  ScalarMap lower;
  ScalarMap upper;
};

EnvelopePair envelope_maps(int j, const ModelParams& params);

}  // namespace hardcore
