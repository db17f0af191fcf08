#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hardcore/exact_tree.hpp"
#include "hardcore/model.hpp"
#include "hardcore/numeric.hpp"
#include "hardcore/recursion.hpp"
#include "hardcore/scalar_maps.hpp"

using namespace hardcore;

TEST_CASE("law step endpoint cases") {
  ModelParams p(3, 2, 0.7);

  // children all at C force the root empty
  auto from_full = law_step(boundary_law(BoundaryCondition::full(), p), p);
  CHECK(from_full.p[0] == doctest::Approx(1.0));
  CHECK(from_full.p[1] == 0.0);
  CHECK(from_full.level == 1);

  // children empty leave the tilt lambda^i
  auto from_empty = law_step(boundary_law(BoundaryCondition::empty(), p), p);
  double z = 1.0 + 0.7 + 0.49;
  CHECK(from_empty.p[0] == doctest::Approx(1.0 / z).epsilon(1e-14));
  CHECK(from_empty.p[1] == doctest::Approx(0.7 / z).epsilon(1e-14));
  CHECK(from_empty.p[2] == doctest::Approx(0.49 / z).epsilon(1e-14));

  auto wrong = make_root_law({0.5, 0.5}, 0);
  CHECK_THROWS_AS(law_step(wrong, p), std::invalid_argument);
}

TEST_CASE("one step acts as J on the odds, two as J2") {
  ModelParams p(2, 1, 5.0);
  auto j = ScalarMap::j_map(p.b, p.lambda);
  auto j2 = ScalarMap::j2_map(p.b, p.lambda);

  for (double x : {0.0, 0.4, 1.0, 3.7}) {
    auto law = make_root_law({1.0 / (1.0 + x), x / (1.0 + x)}, 0);
    auto one = law_step(law, p);
    CHECK(one.Q(1) == doctest::Approx(j(x)).epsilon(1e-12));
    auto two = law_step(one, p);
    CHECK(two.Q(1) == doctest::Approx(j2(x)).epsilon(1e-12));
  }
}

TEST_CASE("R view of successive laws obeys the ratio recursion") {
  ModelParams p(3, 3, 1.4);
  auto law = law_step(boundary_law(BoundaryCondition::empty(), p), p);
  for (int n = 0; n < 6; ++n) {
    auto next = law_step(law, p);
    // Z'(k)-shaped weights lambda^k / R(k)^b, cumulated from below
    std::vector<double> w(p.num_states());
    for (int k = 0; k <= p.C; ++k)
      w[k] = std::pow(p.lambda, k) / std::pow(law.R(k), p.b);
    double total = 0.0;
    for (double x : w) total += x;
    double partial = 0.0;
    for (int i = p.C; i >= 1; --i) {
      double head = 0.0;
      for (int k = 0; k <= p.C - i; ++k) head += w[k];
      partial = total / head;
      CHECK(next.R(i) == doctest::Approx(partial).epsilon(1e-10));
    }
    law = next;
  }
}

TEST_CASE("tail scalar matches its R definition") {
  auto law = make_root_law({0.4, 0.3, 0.2, 0.1}, 0);
  for (int j = 1; j <= 3; ++j)
    CHECK(tail_scalar(law, j) == doctest::Approx(law.R(j) - 1.0).epsilon(1e-13));
  CHECK_THROWS_AS(tail_scalar(law, 0), std::invalid_argument);
  CHECK_THROWS_AS(tail_scalar(law, 4), std::invalid_argument);
}

TEST_CASE("c2 seeds match the boundary laws") {
  ModelParams p(2, 2, 1.3);
  auto se = c2_seed(BoundaryCondition::empty(), p);
  CHECK(se.y_prev == doctest::Approx(1.0));
  CHECK(se.y_curr ==
        doctest::Approx(1.0 + p.lambda * p.lambda / (1.0 + p.lambda)).epsilon(1e-14));
  auto sf = c2_seed(BoundaryCondition::full(), p);
  CHECK(sf.y_prev == pos_inf);
  CHECK(sf.y_curr == doctest::Approx(1.0));
  CHECK_THROWS_AS(c2_seed(BoundaryCondition::empty(), ModelParams(2, 1, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("c2 two-step arithmetic") {
  ModelParams p(2, 2, 1.0);
  auto out = c2_two_step({1.0, 1.5}, p);
  CHECK(out.y_prev == doctest::Approx(1.5));
  CHECK(out.y_curr == doctest::Approx(1.0 + 1.0 / 13.0).epsilon(1e-14));

  // infinite y_prev contributes an exact zero, not a NaN
  auto from_full = c2_two_step({pos_inf, 1.0}, p);
  CHECK(from_full.y_curr == doctest::Approx(1.0 + 1.0 / 2.0).epsilon(1e-14));
}

TEST_CASE("two law steps reproduce the c2 recursion") {
  ModelParams p(2, 2, 6.5);
  for (auto bc : {BoundaryCondition::empty(), BoundaryCondition::full()}) {
    auto state = c2_seed(bc, p);
    auto prev = boundary_law(bc, p);
    auto curr = law_step(prev, p);
    // Y_n = R_n(1) tracked through laws must follow the scalar recursion
    for (int n = 1; n <= 12; ++n) {
      CHECK(curr.R(1) == doctest::Approx(state.y_curr).epsilon(1e-12));
      state = c2_two_step(state, p);
      prev = curr;
      curr = law_step(prev, p);
    }
  }
}

TEST_CASE("iterated law equals the exact tree marginal level by level") {
  for (int b = 2; b <= 4; ++b) {
    for (int C : {1, 2, 3}) {
      ModelParams p(b, C, 1.2);
      for (auto bc : {BoundaryCondition::empty(), BoundaryCondition::full()}) {
        auto law = boundary_law(bc, p);
        for (int depth = 1; depth <= 8; ++depth) {
          law = law_step(law, p);
          auto exact = root_marginal(TreeShape(b, depth), bc, p);
          CAPTURE(b);
          CAPTURE(C);
          CAPTURE(depth);
          CHECK(tv_distance(law, exact) < 1e-10);
          CHECK(law.level == depth);
        }
      }
    }
  }
}

TEST_CASE("unique regime: both seeds land on the same law") {
  ModelParams p(2, 1, 3.0);  // below the C=1 transition at 4
  auto te = iterate(boundary_law(BoundaryCondition::empty(), p), p);
  auto tf = iterate(boundary_law(BoundaryCondition::full(), p), p);
  CHECK(te.status == IterStatus::ConvergedUnique);
  CHECK(tf.status == IterStatus::ConvergedUnique);
  CHECK(tv_distance(te.even_limit, tf.even_limit) < 1e-9);
  CHECK(te.m == doctest::Approx(te.M).epsilon(1e-9));

  // the limit odds solve J(x) = x
  auto j = ScalarMap::j_map(p.b, p.lambda);
  double x = te.even_limit.Q(1);
  CHECK(j(x) == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("coexistence regime: seeds pin the outer fixed points") {
  ModelParams p(2, 1, 7.0);
  auto fps = fixed_points(ScalarMap::j2_map(p.b, p.lambda));
  REQUIRE(fps.points.size() == 3);
  double x_minus = fps.points[0].value;
  double x_plus = fps.points[2].value;

  auto te = iterate(boundary_law(BoundaryCondition::empty(), p), p);
  auto tf = iterate(boundary_law(BoundaryCondition::full(), p), p);
  CHECK(te.status == IterStatus::ConvergedPeriod2);
  CHECK(tf.status == IterStatus::ConvergedPeriod2);
  CHECK(te.even_limit.Q(1) == doctest::Approx(x_minus).epsilon(1e-8));
  CHECK(te.odd_limit.Q(1) == doctest::Approx(x_plus).epsilon(1e-8));
  CHECK(tf.even_limit.Q(1) == doctest::Approx(x_plus).epsilon(1e-8));
  CHECK(te.m == doctest::Approx(x_minus).epsilon(1e-8));
  CHECK(te.M == doctest::Approx(x_plus).epsilon(1e-8));
}

TEST_CASE("c2 scalar chain agrees with the law chain") {
  ModelParams p(2, 2, 7.5);  // past the C=2 transition
  for (auto bc : {BoundaryCondition::empty(), BoundaryCondition::full()}) {
    auto tl = iterate(boundary_law(bc, p), p);
    auto ts = iterate_c2(c2_seed(bc, p), p);
    CHECK(tl.status == IterStatus::ConvergedPeriod2);
    CHECK(ts.status == IterStatus::ConvergedPeriod2);
    CHECK(ts.m == doctest::Approx(tl.m).epsilon(1e-9));
    CHECK(ts.M == doctest::Approx(tl.M).epsilon(1e-9));
  }
  // the two boundary seeds disagree in the limit
  auto le = iterate(boundary_law(BoundaryCondition::empty(), p), p);
  auto lf = iterate(boundary_law(BoundaryCondition::full(), p), p);
  CHECK(tv_distance(le.even_limit, lf.even_limit) > 1e-3);
}

TEST_CASE("recorded laws start at the seed") {
  ModelParams p(2, 2, 1.0);
  IterateOptions opts;
  opts.record_laws = true;
  auto seed = boundary_law(BoundaryCondition::empty(), p);
  auto t = iterate(seed, p, opts);
  REQUIRE(!t.laws.empty());
  CHECK(t.laws[0].p == seed.p);
  for (size_t k = 0; k < t.laws.size(); ++k)
    CHECK(t.laws[k].level == static_cast<int>(k));
  // recorded orbit is the law_step orbit
  auto manual = law_step(seed, p);
  CHECK(tv_distance(t.laws[1], manual) < 1e-15);
}

TEST_CASE("even subsequence scalars are monotone from extremal seeds") {
  ModelParams p(2, 2, 7.0);
  IterateOptions opts;
  opts.record_laws = true;
  auto te = iterate(boundary_law(BoundaryCondition::empty(), p), p, opts);
  auto tf = iterate(boundary_law(BoundaryCondition::full(), p), p, opts);
  int jc = p.jc_half();
  for (size_t k = 4; k + 2 < te.laws.size(); k += 2) {
    double step = tail_scalar(te.laws[k + 2], jc) - tail_scalar(te.laws[k], jc);
    CHECK(step >= -1e-12);  // empty-seed even chain climbs
  }
  for (size_t k = 4; k + 2 < tf.laws.size(); k += 2) {
    double step = tail_scalar(tf.laws[k + 2], jc) - tail_scalar(tf.laws[k], jc);
    CHECK(step <= 1e-12);  // full-seed even chain descends
  }
}

TEST_CASE("iterate rejects malformed options") {
  ModelParams p(2, 1, 1.0);
  auto seed = boundary_law(BoundaryCondition::empty(), p);
  IterateOptions opts;
  opts.tol = 0.0;
  CHECK_THROWS_AS(iterate(seed, p, opts), std::invalid_argument);
  auto wide = make_root_law({0.5, 0.3, 0.2}, 0);
  CHECK_THROWS_AS(iterate(wide, p), std::invalid_argument);
}

TEST_CASE("envelope maps bound the two-level scalar chain") {
  ModelParams p(50, 3, 0.3);
  int jc = p.jc_half();
  auto env = envelope_maps(jc, p);

  // pointwise order; for C=3, j=2 the lambda power drops out and the scales
  // are exactly A^2 and A^-2
  double A = p.a_lambda();
  for (double x : {0.0, 0.01, 0.1, 0.5}) {
    CHECK(env.upper(x) >= env.lower(x));
  }
  CHECK(env.upper.scale == doctest::Approx(A * A).epsilon(1e-13));
  CHECK(env.lower.scale == doctest::Approx(1.0 / (A * A)).epsilon(1e-13));
  CHECK(env.upper.activity == doctest::Approx(p.lambda * p.lambda / A).epsilon(1e-13));
  CHECK(env.lower.activity == doctest::Approx(A * p.lambda * p.lambda).epsilon(1e-13));

  // trajectory containment from both extremal seeds
  for (auto bc : {BoundaryCondition::empty(), BoundaryCondition::full()}) {
    auto law = law_step(boundary_law(bc, p), p);
    double x_prev = tail_scalar(law, jc);
    for (int n = 0; n < 20; ++n) {
      law = law_step(law_step(law, p), p);
      double x_next = tail_scalar(law, jc);
      CHECK(x_next <= env.upper(x_prev) + 1e-12);
      CHECK(x_next >= env.lower(x_prev) - 1e-12);
      x_prev = x_next;
    }
  }

  CHECK_THROWS_AS(envelope_maps(0, p), std::invalid_argument);
  CHECK_THROWS_AS(envelope_maps(jc, ModelParams(50, 3, 1.5)), std::domain_error);
}
