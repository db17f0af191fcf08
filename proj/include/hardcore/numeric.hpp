#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace hardcore {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), stable for any mix of finite and -inf arguments.
inline double log_add(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(sum_i exp(x_i)); returns -inf for an empty span or all -inf entries.
inline double log_sum_exp(std::span<const double> xs) {
  double m = neg_inf;
  for (double x : xs) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& xs) {
  return log_sum_exp(std::span<const double>(xs.data(), xs.size()));
}

// log(1 - exp(x)) for x <= 0.  Accurate both for x near 0 and x << 0.
inline double log1m_exp(double x) {
  if (x == neg_inf) return 0.0;
  if (x >= 0.0) return neg_inf;  // mass >= 1: complement empty up to rounding
  // crossover at log(1/2): see Maechler's log1mexp note
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

inline bool approx_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

inline bool approx_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace hardcore
