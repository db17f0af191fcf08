#pragma once

#include <string>
#include <vector>

#include "hardcore/model.hpp"
#include "hardcore/recursion.hpp"

namespace hardcore {

struct CriticalityOptions {
  double gap_tol = 1e-8;   // coexistence threshold on the limit TV gap
  double tol = 1e-12;      // per-subsequence convergence tolerance
  long max_even_levels = 100000;
  double gap_stop = 1e-14; // stop once the even-level gap stops moving
};

// Verdict of the two-boundary test at a single activity: delta is the total
// variation between the even-level limits of the empty- and full-boundary
// chains; the Gibbs measure is unique iff delta vanishes.
struct PhasePoint {
  double lambda = 0.0;
  double delta = 0.0;
  bool coexists = false;
  double m = 0.0;  // extreme subsequence limits of the X scalar
  double M = 0.0;
  long iterations = 0;   // levels run per chain
  bool undetermined = false;  // level cap hit before the gap settled
};

PhasePoint delta_lambda(const ModelParams& params,
                        const CriticalityOptions& opts = {});

enum class TransitionOrder { First, Second, Undetermined };

struct CriticalSearch {
  double lambda_lo = 0.0;  // final bracket: unique at lo, coexisting at hi
  double lambda_hi = 0.0;
  std::vector<PhasePoint> probes;  // every evaluated activity, ascending
  bool bracket_valid = false;      // indicator was monotone across the grid
  double delta_above = 0.0;        // gap just above the bracket
  std::string diagnostics;
};

// Brackets the critical activity by bisection on the coexistence indicator.
// The initial bracket auto-widens geometrically when it does not straddle the
// transition; an 8-point pre-scan rejects non-monotone indicators.
CriticalSearch find_lambda_cr(int b, int C, double lambda_lo, double lambda_hi,
                              double bracket_tol,
                              const CriticalityOptions& opts = {});

struct OrderResult {
  TransitionOrder order = TransitionOrder::Undetermined;
  double jump_estimate = 0.0;
  double fitted_power = 0.0;  // exponent of delta ~ offset^p
  std::vector<PhasePoint> probes;
  std::string diagnostics;
};

// Transition order from the decay of delta at lambda_cr * (1 + o) over the
// given offsets: a power-law fit that extrapolates to zero is second order, a
// flat one extrapolating to a positive jump is first order.
OrderResult classify_order(int b, int C, double lambda_cr,
                           const std::vector<double>& offsets = {1e-2, 1e-3, 1e-4},
                           const CriticalityOptions& opts = {});

struct WindowProbe {
  double gamma = 0.0;
  double lambda = 0.0;
  bool expect_coexist = false;
  PhasePoint outcome;
  bool matches = false;
};

struct WindowOptions {
  // The asymptotic predictions only apply at large branching; below these
  // floors the probe activities are outside their regime of validity.
  int min_b_odd = 1000;
  int min_b_even = 10000;
  CriticalityOptions crit;
};

struct WindowResult {
  std::vector<WindowProbe> probes;  // uniqueness-side first
  bool all_match = false;
  // Odd C: X(jc) limits at the coexistence probe under the two mid-spin
  // boundary seeds that pin the low and high branches.
  double x_low_seed = 0.0;
  double x_high_seed = 0.0;
};

// Probes the predicted uniqueness/coexistence window: for odd C at
// lambda = (gamma/b)^(1/jc) with gamma on both sides of e, for even C at
// lambda = (gamma log b / b)^(1/jc) with gamma on both sides of 1/(C+2).
WindowResult asymptotic_window(int b, int C, const WindowOptions& opts = {});

// Parallel map of delta_lambda over an activity grid; results are ordered by
// the input grid regardless of the worker count.
std::vector<PhasePoint> scan_lambda_grid(int b, int C,
                                         const std::vector<double>& lambdas,
                                         int workers = 0,
                                         const CriticalityOptions& opts = {});

struct MPoint {
  double lambda = 0.0;
  double m = 0.0;  // boundary-condition sensitivity of P(sigma_root > C/2)
};

// Even-C order parameter m(lambda) along a grid: the difference of the
// even-level limit tail probabilities P(sigma_root > C/2) between the full
// and empty boundary chains.
std::vector<MPoint> m_of_lambda_scan(int b, int C,
                                     const std::vector<double>& lambdas,
                                     int workers = 0,
                                     const CriticalityOptions& opts = {});

}  // namespace hardcore
