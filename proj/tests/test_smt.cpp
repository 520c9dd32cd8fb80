#include <cmath>
#include <set>

#include "doctest.h"
#include "steinerlab/melzak.hpp"
#include "steinerlab/smt.hpp"
#include "support.hpp"

using namespace steinerlab;

TEST_CASE("the unit square is ambiguous with exactly two types of length 1+sqrt(3)") {
  SmtResult res = steiner_minimal_trees(testsupport::unit_square());
  REQUIRE(res.minima.size() == 2);
  CHECK(res.ambiguous);
  for (const SmtMinimum& m : res.minima)
    CHECK(m.length == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-9));
  CHECK(res.minima[0].signature != res.minima[1].signature);
}

TEST_CASE("the equilateral triangle has a unique full minimum of length sqrt(3)") {
  auto [unique, res] = is_unambiguous(testsupport::equilateral_triangle());
  CHECK(unique);
  REQUIRE(res.minima.size() == 1);
  CHECK(res.minima[0].length == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(is_full_topology(res.minima[0].network.topology));
}

TEST_CASE("trivial cases: one point and two points") {
  SmtResult one = steiner_minimal_trees(make_configuration(2, {Vec{1, 2}}));
  REQUIRE(one.minima.size() == 1);
  CHECK(one.min_length == 0.0);
  SmtResult two = steiner_minimal_trees(make_configuration(3, {Vec{0, 0, 0}, Vec{1, 1, 1}}));
  REQUIRE(two.minima.size() == 1);
  CHECK(two.min_length == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("cell membership against the square and the triangle") {
  SmtResult sq = steiner_minimal_trees(testsupport::unit_square());
  CHECK(cell_membership(testsupport::unit_square(), sq.minima[0].signature) ==
        CellMembership::Ambiguous);

  SmtResult tri = steiner_minimal_trees(testsupport::equilateral_triangle());
  CHECK(cell_membership(testsupport::equilateral_triangle(), tri.minima[0].signature) ==
        CellMembership::UnambiguousInterior);
  CHECK(cell_membership(testsupport::equilateral_triangle(),
                        classify3_signature(Triangle3Kind::PathB)) ==
        CellMembership::Outside);
}

TEST_CASE("random generic five-point configurations are unambiguous") {
  auto& gen = testsupport::rng(501);
  int unambiguous_count = 0;
  const int trials = 12;
  for (int it = 0; it < trials; ++it) {
    Configuration c = testsupport::random_config(5, 2, gen);
    auto [unique, res] = is_unambiguous(c);
    unambiguous_count += unique ? 1 : 0;
    CHECK(res.min_length <= testsupport::mst_length(c) + 1e-9);
  }
  CHECK(unambiguous_count == trials);
}

TEST_CASE("SMT length obeys rigid invariance and scaling") {
  auto& gen = testsupport::rng(502);
  for (int it = 0; it < 6; ++it) {
    Configuration c = testsupport::random_config(4 + it % 2, 2, gen);
    SmtResult base = steiner_minimal_trees(c);

    const double angle = 0.7 + 0.1 * it;
    Configuration moved = c;
    for (Vec& p : moved.points) {
      p = rotate2(p, angle);
      p[0] += 0.3;
      p[1] -= 1.7;
    }
    SmtResult rigid = steiner_minimal_trees(moved);
    CHECK(rigid.min_length == doctest::Approx(base.min_length).epsilon(1e-9));
    REQUIRE(rigid.minima.size() == base.minima.size());
    for (std::size_t i = 0; i < base.minima.size(); ++i)
      CHECK(rigid.minima[i].signature == base.minima[i].signature);

    Configuration scaled_c = c;
    for (Vec& p : scaled_c.points) p = scaled(p, 2.5);
    SmtResult big = steiner_minimal_trees(scaled_c);
    CHECK(big.min_length == doctest::Approx(2.5 * base.min_length).epsilon(1e-9));
  }
}

TEST_CASE("classify3 matches the exhaustive solver") {
  SUBCASE("hand-picked representatives") {
    Configuration ccw = testsupport::equilateral_triangle();
    CHECK(classify3(ccw) == Triangle3Kind::FullCcw);

    Configuration cw = make_configuration(
        2, {Vec{1.0, 0.0}, Vec{0.0, 0.0}, Vec{0.5, std::sqrt(3.0) / 2.0}});
    CHECK(classify3(cw) == Triangle3Kind::FullCw);

    // 150 degrees at B forces the path through B
    const double a = 150.0 * M_PI / 180.0;
    Configuration obtuse = make_configuration(
        2, {Vec{1, 0}, Vec{0, 0}, Vec{std::cos(a), std::sin(a)}});
    CHECK(classify3(obtuse) == Triangle3Kind::PathB);
  }

  SUBCASE("agreement with steiner_minimal_trees on random triangles") {
    auto& gen = testsupport::rng(503);
    std::set<Triangle3Kind> seen;
    for (int it = 0; it < 300; ++it) {
      Configuration c = testsupport::random_config(3, 2, gen);
      const Triangle3Kind kind = classify3(c);
      seen.insert(kind);
      auto [unique, res] = is_unambiguous(c);
      REQUIRE(unique);
      CHECK(res.minima[0].signature == classify3_signature(kind));
    }
    CHECK(seen.size() == 5);
  }

  SUBCASE("label swap flips the orientation") {
    Configuration ccw = testsupport::equilateral_triangle();
    Configuration swapped = make_configuration(2, {ccw.points[1], ccw.points[0], ccw.points[2]});
    CHECK(classify3(swapped) == Triangle3Kind::FullCw);
  }
}

TEST_CASE("degenerate minima arise through collapse inside full solves") {
  // 150 degrees at B: the full topology collapses onto B and the reported
  // minimum is the path type
  const double a = 150.0 * M_PI / 180.0;
  Configuration obtuse = make_configuration(
      2, {Vec{1, 0}, Vec{0, 0}, Vec{std::cos(a), std::sin(a)}});
  SmtResult res = steiner_minimal_trees(obtuse);
  REQUIRE(res.minima.size() == 1);
  CHECK(res.minima[0].signature == classify3_signature(Triangle3Kind::PathB));
  CHECK(res.minima[0].length == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(res.minima[0].network.topology.interior == 0);
}
