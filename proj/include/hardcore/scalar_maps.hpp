#pragma once

#include <string>
#include <vector>

namespace hardcore {

// One-dimensional maps whose fixed points control the tree recursions.
//
//   J(x)      = lambda / (1+x)^b          (one level of the C = 1 recursion)
//   J2(x)     = J(J(x))                   (two levels; S-shaped, increasing)
//   theta*J2  = scaled J2 with a prefactor; covers the damped map
//               lambda/(kappa+lambda) * J2 and the order-comparison
//               envelopes of the general-C recursion
//   Hg(z)     = gamma * exp(-gamma * exp(-z))  (large-b limit map)
//
// Evaluation runs through logs so huge b and tiny activities stay exact.
struct ScalarMap {
  enum class Family { J, J2, Hgamma };

  Family family = Family::J2;
  int b = 2;
  double activity = 1.0;  // lambda for J / J2
  double gamma = 0.0;     // Hgamma only
  double scale = 1.0;     // multiplies J / J2 output

  static ScalarMap j_map(int b, double lambda);
  static ScalarMap j2_map(int b, double lambda);
  static ScalarMap scaled_j2(int b, double activity, double scale);
  // Damped two-level map lambda/(kappa+lambda) * J2; kappa >= 0.
  static ScalarMap damped_j2(int b, double lambda, double kappa);
  static ScalarMap h_gamma(double gamma);

  double operator()(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;

  // Supremum of the map over [0, inf); attained only in the limit.
  double sup_value() const;
};

struct SShapeReport {
  bool is_s_shaped = false;
  double inflection = 0.0;  // valid when is_s_shaped
  std::string violation;    // first failed property otherwise
};

// Checks f(0) > 0, f increasing, f bounded by its closed-form sup, and a
// single sign change of f'' (convex then concave); locates the inflection by
// bisection.  A map that is concave from the origin (J2 with b*lambda <=
// 1 + lambda) passes with inflection 0.  The scan window is [0, x_max];
// x_max = 0 auto-sizes from sup.
SShapeReport verify_s_shape(const ScalarMap& map, double x_max = 0.0,
                            int grid = 4096);

enum class Stability { Attracting, Repelling, Neutral };

struct FixedPoint {
  double value = 0.0;
  double map_deriv = 0.0;
  Stability stability = Stability::Attracting;
};

struct FixedPointSet {
  std::vector<FixedPoint> points;  // ascending
  bool near_tangency = false;      // some |f'(x*) - 1| < 1e-9
};

// All fixed points of an increasing bounded map on [0, sup], found by a
// sign-change scan refined until the crossing count stabilises, then bisected.
// Near-tangent crossings are flagged rather than classified.
FixedPointSet fixed_points(const ScalarMap& map, double tol = 1e-13);

// Critical activity of the C = 1 model: b^b / (b-1)^(b+1), in log domain.
double lambda_cr1(int b);

// Gap 1/b - x_- between the packing density bound and the smallest fixed
// point of the damped map with kappa = 1.  Strictly positive for every
// activity; the infimum over a lambda grid lower-bounds the C = 2 jump.
double epsilon_b(int b, double lambda);
double epsilon_b_infimum(int b, double lambda_lo, double lambda_hi, int grid_n);

// Smallest activity at which theta(kappa) * J2 acquires three fixed points,
// located by bisection on the fixed-point count.
double tangency_activity(int b, double kappa, double lambda_lo, double lambda_hi,
                         double tol = 1e-9);

}  // namespace hardcore
