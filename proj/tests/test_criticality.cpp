#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardcore/criticality.hpp"
#include "hardcore/model.hpp"
#include "hardcore/scalar_maps.hpp"

using namespace hardcore;

TEST_CASE("coexistence verdicts straddle the known transitions") {
  // C=1, b=2: transition at 4
  auto low = delta_lambda(ModelParams(2, 1, 3.0));
  CHECK(!low.coexists);
  CHECK(low.delta < 1e-8);
  CHECK(!low.undetermined);

  auto high = delta_lambda(ModelParams(2, 1, 7.0));
  CHECK(high.coexists);
  CHECK(high.delta > 1e-3);
  CHECK(high.m < high.M);

  // the two limits' odds are the outer fixed points of the two-level map
  auto fps = fixed_points(ScalarMap::j2_map(2, 7.0));
  REQUIRE(fps.points.size() == 3);
  CHECK(high.m == doctest::Approx(fps.points[0].value).epsilon(1e-6));
  CHECK(high.M == doctest::Approx(fps.points[2].value).epsilon(1e-6));

  // C=2, b=2: tabulated transition near 7.2754
  CHECK(!delta_lambda(ModelParams(2, 2, 7.2)).coexists);
  CHECK(delta_lambda(ModelParams(2, 2, 7.35)).coexists);
}

TEST_CASE("uniqueness holds for C=2 below the C=1 critical activity") {
  for (int b : {2, 3}) {
    CAPTURE(b);
    double lc1 = lambda_cr1(b);
    for (double lambda : {lc1, 0.9 * lc1}) {
      auto pt = delta_lambda(ModelParams(b, 2, lambda));
      CHECK(!pt.coexists);
      CHECK(pt.delta < 1e-8);
    }
  }
}

TEST_CASE("bisection lands on the closed form for C=1") {
  for (int b : {2, 3}) {
    CAPTURE(b);
    double expect = lambda_cr1(b);
    auto search = find_lambda_cr(b, 1, 0.5 * expect, 2.0 * expect, 1e-7 * expect);
    CHECK(search.bracket_valid);
    CHECK(search.lambda_lo <= expect * (1.0 + 1e-9));
    CHECK(search.lambda_hi >= expect * (1.0 - 1e-9));
    double mid = 0.5 * (search.lambda_lo + search.lambda_hi);
    CHECK(std::abs(mid - expect) / expect < 1e-6);
    CHECK(search.delta_above > 0.0);
  }
}

TEST_CASE("bisection auto-widens a bracket that misses the transition") {
  // both ends below the C=1 b=2 transition at 4
  auto search = find_lambda_cr(2, 1, 1.0, 2.0, 1e-4);
  CHECK(search.bracket_valid);
  CHECK(search.lambda_lo < 4.0);
  CHECK(search.lambda_hi > 4.0 - 1e-3);
  double mid = 0.5 * (search.lambda_lo + search.lambda_hi);
  CHECK(mid == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("bracket midpoint is stable under tolerance refinement") {
  auto coarse = find_lambda_cr(2, 2, 6.0, 9.0, 1e-3);
  auto fine = find_lambda_cr(2, 2, 6.0, 9.0, 5e-4);
  REQUIRE(coarse.bracket_valid);
  REQUIRE(fine.bracket_valid);
  double mid_c = 0.5 * (coarse.lambda_lo + coarse.lambda_hi);
  double mid_f = 0.5 * (fine.lambda_lo + fine.lambda_hi);
  CHECK(std::abs(mid_f - mid_c) < coarse.lambda_hi - coarse.lambda_lo);
}

TEST_CASE("C=2 transition sits above the C=1 one") {
  for (int b : {2, 3}) {
    CAPTURE(b);
    auto search = find_lambda_cr(b, 2, 0.5 * lambda_cr1(b), 6.0 * lambda_cr1(b),
                                 1e-3);
    REQUIRE(search.bracket_valid);
    CHECK(search.lambda_lo > lambda_cr1(b));
  }
}

TEST_CASE("order classification separates the two transition types") {
  // C=2, b=2: first order with a jump above the structural floor
  auto c2 = find_lambda_cr(2, 2, 6.0, 9.0, 1e-6);
  REQUIRE(c2.bracket_valid);
  double lc2 = 0.5 * (c2.lambda_lo + c2.lambda_hi);
  auto first = classify_order(2, 2, lc2);
  CHECK(first.order == TransitionOrder::First);
  CHECK(first.fitted_power < 0.15);
  CHECK(first.jump_estimate > epsilon_b(2, lc2));

  // C=1, b=2: second order, jump extrapolates to zero
  auto second = classify_order(2, 1, 4.0);
  CHECK(second.order == TransitionOrder::Second);
  CHECK(second.fitted_power > 0.3);
  CHECK(second.jump_estimate < 1e-4);

  // a lambda_cr nowhere near the transition cannot be classified
  auto lost = classify_order(2, 1, 2.0);
  CHECK(lost.order == TransitionOrder::Undetermined);
  CHECK(!lost.diagnostics.empty());

  CHECK_THROWS_AS(classify_order(2, 1, 4.0, {1e-2}), std::invalid_argument);
  CHECK_THROWS_AS(classify_order(2, 1, 4.0, {1e-2, -1e-3}), std::invalid_argument);
}

TEST_CASE("asymptotic window guards") {
  CHECK_THROWS_AS(asymptotic_window(100, 3), std::invalid_argument);
  CHECK_THROWS_AS(asymptotic_window(1000, 2), std::invalid_argument);
}

TEST_CASE("odd-C window matches the large-b prediction") {
  auto win = asymptotic_window(10000, 3);
  REQUIRE(win.probes.size() == 2);
  // probes at (gamma/b)^(1/2) for jc = 2, uniqueness side first
  CHECK(win.probes[0].gamma == doctest::Approx(2.5));
  CHECK(win.probes[1].gamma == doctest::Approx(3.2));
  CHECK(win.probes[0].lambda == doctest::Approx(std::sqrt(2.5 / 1e4)).epsilon(1e-12));
  CHECK(win.probes[1].lambda == doctest::Approx(std::sqrt(3.2 / 1e4)).epsilon(1e-12));
  CHECK(!win.probes[0].expect_coexist);
  CHECK(win.probes[1].expect_coexist);
  CHECK(win.probes[0].matches);
  CHECK(win.probes[1].matches);
  CHECK(win.all_match);
  // mid-spin boundary seeds pin distinct branches at the coexistence probe
  CHECK(win.x_low_seed > 0.0);
  CHECK(win.x_low_seed < win.x_high_seed);
}

TEST_CASE("even-C window reports the observed mismatch honestly") {
  // The predicted coexistence probe at gamma = 0.5 sits below the finite-b
  // threshold (near 0.9 at this b), so the engine must report the probe as
  // unique and flag the mismatch rather than echo the asymptotic claim.
  auto win = asymptotic_window(100000, 2);
  REQUIRE(win.probes.size() == 2);
  double L = std::log(1e5);
  CHECK(win.probes[0].gamma == doctest::Approx(0.15));
  CHECK(win.probes[1].gamma == doctest::Approx(0.5));
  CHECK(win.probes[0].lambda ==
        doctest::Approx(std::sqrt(0.15 * L / 1e5)).epsilon(1e-12));
  CHECK(win.probes[1].lambda ==
        doctest::Approx(std::sqrt(0.5 * L / 1e5)).epsilon(1e-12));
  CHECK(win.probes[0].matches);  // uniqueness side agrees
  CHECK(!win.probes[1].outcome.coexists);
  CHECK(!win.probes[1].matches);
  CHECK(!win.all_match);
}

TEST_CASE("grid scan is order-preserving and worker-count independent") {
  std::vector<double> grid;
  for (int i = 0; i < 7; ++i) grid.push_back(7.0 + 0.1 * i);
  auto serial = scan_lambda_grid(2, 2, grid, 1);
  auto parallel = scan_lambda_grid(2, 2, grid, 3);
  REQUIRE(serial.size() == grid.size());
  REQUIRE(parallel.size() == grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial[i].lambda == grid[i]);
    CHECK(serial[i].delta == parallel[i].delta);  // same code path, same bits
    CHECK(serial[i].coexists == parallel[i].coexists);
  }
  // exactly one flip across the C=2, b=2 transition
  int flips = 0;
  for (size_t i = 1; i < serial.size(); ++i)
    if (serial[i].coexists != serial[i - 1].coexists) ++flips;
  CHECK(flips == 1);
  CHECK(!serial.front().coexists);
  CHECK(serial.back().coexists);
}

TEST_CASE("even-C order parameter turns on at the transition") {
  CHECK_THROWS_AS(m_of_lambda_scan(2, 1, {1.0}), std::invalid_argument);

  std::vector<double> grid = {7.0, 7.2, 7.3, 7.35, 7.5};
  auto pts = m_of_lambda_scan(2, 2, grid, 2);
  REQUIRE(pts.size() == grid.size());
  CHECK(pts[0].m == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(pts[1].m == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(pts.back().m > 0.05);
  for (size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i].m >= pts[i - 1].m - 1e-9);  // nondecreasing across the grid
}
