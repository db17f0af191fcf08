#include "hardcore/scalar_maps.hpp"

#include <cmath>
#include <stdexcept>

#include "hardcore/numeric.hpp"

namespace hardcore {

namespace {

// Unscaled J(x) = lambda (1+x)^(-b) and derivatives, via logs.
double j_eval(int b, double lambda, double x) {
  return std::exp(std::log(lambda) - b * std::log1p(x));
}
double j_d1(int b, double lambda, double x) {
  return -b * j_eval(b, lambda, x) / (1.0 + x);
}
double j_d2(int b, double lambda, double x) {
  return b * (b + 1.0) * j_eval(b, lambda, x) / ((1.0 + x) * (1.0 + x));
}

void check_domain(double x) {
  if (!(x >= 0.0)) throw std::domain_error("scalar maps live on [0, inf)");
}

}  // namespace

ScalarMap ScalarMap::j_map(int b, double lambda) {
  if (b < 2 || !(lambda > 0.0)) throw std::invalid_argument("need b >= 2, lambda > 0");
  return ScalarMap{Family::J, b, lambda, 0.0, 1.0};
}

ScalarMap ScalarMap::j2_map(int b, double lambda) {
  if (b < 2 || !(lambda > 0.0)) throw std::invalid_argument("need b >= 2, lambda > 0");
  return ScalarMap{Family::J2, b, lambda, 0.0, 1.0};
}

ScalarMap ScalarMap::scaled_j2(int b, double activity, double scale) {
  if (b < 2 || !(activity > 0.0) || !(scale > 0.0))
    throw std::invalid_argument("need b >= 2, activity > 0, scale > 0");
  return ScalarMap{Family::J2, b, activity, 0.0, scale};
}

ScalarMap ScalarMap::damped_j2(int b, double lambda, double kappa) {
  if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
  return scaled_j2(b, lambda, lambda / (kappa + lambda));
}

ScalarMap ScalarMap::h_gamma(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return ScalarMap{Family::Hgamma, 0, 0.0, gamma, 1.0};
}

double ScalarMap::operator()(double x) const {
  check_domain(x);
  switch (family) {
    case Family::J:
      return scale * j_eval(b, activity, x);
    case Family::J2:
      return scale * j_eval(b, activity, j_eval(b, activity, x));
    case Family::Hgamma:
      return gamma * std::exp(-gamma * std::exp(-x));
  }
  throw std::logic_error("unreachable");
}

double ScalarMap::deriv(double x) const {
  check_domain(x);
  switch (family) {
    case Family::J:
      return scale * j_d1(b, activity, x);
    case Family::J2: {
      double u = j_eval(b, activity, x);
      return scale * j_d1(b, activity, u) * j_d1(b, activity, x);
    }
    case Family::Hgamma:
      return gamma * std::exp(-x) * (*this)(x);
  }
  throw std::logic_error("unreachable");
}

double ScalarMap::deriv2(double x) const {
  check_domain(x);
  switch (family) {
    case Family::J:
      return scale * j_d2(b, activity, x);
    case Family::J2: {
      double u = j_eval(b, activity, x);
      double dx = j_d1(b, activity, x);
      return scale * (j_d2(b, activity, u) * dx * dx +
                      j_d1(b, activity, u) * j_d2(b, activity, x));
    }
    case Family::Hgamma: {
      double g = gamma * std::exp(-x);
      return g * (*this)(x)*(g - 1.0);
    }
  }
  throw std::logic_error("unreachable");
}

double ScalarMap::sup_value() const {
  switch (family) {
    case Family::J:
      return scale * activity;  // attained at 0
    case Family::J2:
      return scale * activity;  // approached as x -> inf
    case Family::Hgamma:
      return gamma;
  }
  throw std::logic_error("unreachable");
}

SShapeReport verify_s_shape(const ScalarMap& map, double x_max, int grid) {
  SShapeReport report;
  if (grid < 16) throw std::invalid_argument("grid too coarse");
  double f0 = map(0.0);
  if (!(f0 > 0.0)) {
    report.violation = "f(0) is not positive";
    return report;
  }
  double sup = map.sup_value();
  if (x_max <= 0.0) {
    x_max = sup;
    // extend until the concave tail is visible
    int guard = 0;
    while (map.deriv2(x_max) > 0.0 && guard++ < 60) x_max *= 2.0;
    if (guard >= 60) {
      report.violation = "no concave tail found";
      return report;
    }
  }
  double prev_d2 = 0.0;
  bool have_prev = false;
  double first_d2 = 0.0;
  int sign_flips = 0;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double x = x_max * static_cast<double>(i) / grid;
    if (map.deriv(x) <= 0.0) {
      report.violation = "not strictly increasing";
      return report;
    }
    if (map(x) > sup * (1.0 + 1e-12)) {
      report.violation = "exceeds the closed-form supremum";
      return report;
    }
    double d2 = map.deriv2(x);
    if (have_prev && prev_d2 > 0.0 && d2 < 0.0) {
      ++sign_flips;
      bracket_lo = x_max * static_cast<double>(i - 1) / grid;
      bracket_hi = x;
    } else if (have_prev && prev_d2 < 0.0 && d2 > 0.0) {
      report.violation = "curvature flips back to convex";
      return report;
    }
    if (d2 != 0.0) {
      if (!have_prev) first_d2 = d2;
      prev_d2 = d2;
      have_prev = true;
    }
  }
  if (sign_flips == 0 && have_prev && first_d2 < 0.0) {
    // concave from the origin: the convex piece is empty and the inflection
    // degenerates to 0 (small-activity regime lambda <= 1/(b-1))
    report.is_s_shaped = true;
    report.inflection = 0.0;
    return report;
  }
  if (sign_flips != 1) {
    report.violation = sign_flips == 0 ? "no inflection in the window"
                                       : "multiple inflections";
    return report;
  }
  for (int it = 0; it < 200 && bracket_hi - bracket_lo > 1e-13 * (1.0 + bracket_hi);
       ++it) {
    double mid = 0.5 * (bracket_lo + bracket_hi);
    (map.deriv2(mid) > 0.0 ? bracket_lo : bracket_hi) = mid;
  }
  report.is_s_shaped = true;
  report.inflection = 0.5 * (bracket_lo + bracket_hi);
  return report;
}

namespace {

double bisect_root(const ScalarMap& map, double lo, double hi, double tol) {
  // g = f(x) - x changes sign on [lo, hi]
  double glo = map(lo) - lo;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double gmid = map(mid) - mid;
    if (std::abs(gmid) < tol && hi - lo < 1e-12 * (1.0 + std::abs(mid))) return mid;
    if ((gmid > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * (1.0 + std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

int count_crossings(const ScalarMap& map, double x_hi, int n,
                    std::vector<std::pair<double, double>>& brackets) {
  brackets.clear();
  double prev_x = 0.0;
  double prev_g = map(0.0);
  int count = 0;
  for (int i = 1; i <= n; ++i) {
    double x = x_hi * static_cast<double>(i) / n;
    double g = map(x) - x;
    if ((g > 0.0) != (prev_g > 0.0)) {
      ++count;
      brackets.emplace_back(prev_x, x);
    }
    prev_x = x;
    prev_g = g;
  }
  return count;
}

}  // namespace

FixedPointSet fixed_points(const ScalarMap& map, double tol) {
  double sup = map.sup_value();
  // Every fixed point lies in [0, sup]: f maps [0,inf) into (0, sup).
  std::vector<std::pair<double, double>> brackets, prev_brackets;
  int n = 512, stable = 0, prev_count = -1;
  while (stable < 2 && n <= (1 << 21)) {
    int count = count_crossings(map, sup, n, brackets);
    if (count == prev_count) ++stable;
    else stable = 0;
    prev_count = count;
    prev_brackets = brackets;
    n *= 2;
  }
  FixedPointSet result;
  for (auto [lo, hi] : prev_brackets) {
    FixedPoint fp;
    fp.value = bisect_root(map, lo, hi, tol);
    fp.map_deriv = map.deriv(fp.value);
    if (std::abs(fp.map_deriv - 1.0) < 1e-9) {
      fp.stability = Stability::Neutral;
      result.near_tangency = true;
    } else {
      fp.stability = std::abs(fp.map_deriv) < 1.0 ? Stability::Attracting
                                                  : Stability::Repelling;
    }
    result.points.push_back(fp);
  }
  // Two-level structure check: the outer fixed points of J2 are swapped by J.
  // Skipped near tangency, where a merging pair leaves the root positions
  // ill-conditioned (error ~ sqrt(tol)) and no fixed accuracy is attainable.
  if (map.family == ScalarMap::Family::J2 && map.scale == 1.0 &&
      result.points.size() == 3 && !result.near_tangency) {
    ScalarMap j = ScalarMap::j_map(map.b, map.activity);
    double lo = result.points[0].value, hi = result.points[2].value;
    // root positions carry error ~ tol/|f'-1|, amplified through J
    double budget = 1e-10;
    for (double x : {lo, hi}) {
      double cond = std::abs(map.deriv(x) - 1.0);
      budget += 100.0 * tol * (1.0 + std::abs(j.deriv(x))) / std::max(cond, 1e-12);
    }
    if (std::abs(j(lo) - hi) > budget || std::abs(j(hi) - lo) > budget)
      throw std::runtime_error("fixed-point pair not swapped by the one-level map");
  }
  return result;
}

double lambda_cr1(int b) {
  if (b < 2) throw std::invalid_argument("b must be >= 2");
  double lb = static_cast<double>(b);
  return std::exp(lb * std::log(lb) - (lb + 1.0) * std::log(lb - 1.0));
}

double epsilon_b(int b, double lambda) {
  auto fps = fixed_points(ScalarMap::damped_j2(b, lambda, 1.0));
  if (fps.points.empty())
    throw std::runtime_error("damped map lost its fixed point");
  return 1.0 / b - fps.points.front().value;
}

double epsilon_b_infimum(int b, double lambda_lo, double lambda_hi, int grid_n) {
  if (!(0.0 < lambda_lo && lambda_lo < lambda_hi) || grid_n < 2)
    throw std::invalid_argument("bad lambda grid");
  double inf = pos_inf;
  for (int i = 0; i < grid_n; ++i) {
    double lambda = lambda_lo + (lambda_hi - lambda_lo) * i / (grid_n - 1.0);
    inf = std::min(inf, epsilon_b(b, lambda));
  }
  return inf;
}

double tangency_activity(int b, double kappa, double lambda_lo, double lambda_hi,
                         double tol) {
  auto multiple = [&](double lambda) {
    return fixed_points(ScalarMap::damped_j2(b, lambda, kappa)).points.size() >= 3;
  };
  if (multiple(lambda_lo) || !multiple(lambda_hi))
    throw std::invalid_argument("bracket does not straddle the tangency");
  while (lambda_hi - lambda_lo > tol * lambda_hi) {
    double mid = 0.5 * (lambda_lo + lambda_hi);
    (multiple(mid) ? lambda_hi : lambda_lo) = mid;
  }
  return 0.5 * (lambda_lo + lambda_hi);
}

}  // namespace hardcore
