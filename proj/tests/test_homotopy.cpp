#include <cmath>

#include "doctest.h"
#include "steinerlab/homotopy.hpp"
#include "support.hpp"

using namespace steinerlab;

namespace {

PathParams quick_params() {
  PathParams p;
  p.samples = 48;
  p.r1_probes = 5;
  p.r1_gap = 0.1;
  return p;
}

void check_passed(const CertifiedPath& path, const TypeSignature& sig) {
  INFO("failure: ", path.failure);
  CHECK(path.passed);
  CHECK(path.target_type == sig);
  REQUIRE(path.samples.size() == path.verdicts.size());
  REQUIRE(path.samples.size() == path.t.size());
  for (std::size_t i = 1; i < path.t.size(); ++i) CHECK(path.t[i] > path.t[i - 1]);
  for (const SampleVerdict& v : path.verdicts) {
    CHECK(v.ok);
    CHECK(v.unambiguous);
    CHECK(v.type == sig);
  }
}

}  // namespace

TEST_CASE("constant path certifies trivially") {
  Configuration c = testsupport::equilateral_triangle();
  SmtResult res = steiner_minimal_trees(c);
  CertifiedPath path = connect_unambiguous(c, c, res.minima[0].signature, quick_params());
  check_passed(path, res.minima[0].signature);
  CHECK(config_distance(path.samples.front(), c) == 0.0);
  CHECK(config_distance(path.samples.back(), c) == 0.0);
}

TEST_CASE("two acute triangles of the same orientation connect inside the ucell") {
  Configuration a = testsupport::equilateral_triangle();
  Configuration b = make_configuration(
      2, {Vec{-0.1, 0.05}, Vec{1.3, -0.1}, Vec{0.4, 1.1}});
  REQUIRE(classify3(a) == Triangle3Kind::FullCcw);
  REQUIRE(classify3(b) == Triangle3Kind::FullCcw);
  const TypeSignature sig = classify3_signature(Triangle3Kind::FullCcw);
  CertifiedPath path = connect_unambiguous(a, b, sig, quick_params());
  check_passed(path, sig);
  CHECK(config_distance(path.samples.front(), a) < 1e-12);
  CHECK(config_distance(path.samples.back(), b) < 1e-12);
  CHECK(static_cast<int>(path.samples.size()) >= quick_params().samples);
}

TEST_CASE("endpoint preconditions are enforced") {
  Configuration tri = testsupport::equilateral_triangle();
  SmtResult res = steiner_minimal_trees(tri);
  // ambiguous endpoint
  CHECK_THROWS_AS(
      connect_unambiguous(tri, testsupport::unit_square(), res.minima[0].signature),
      std::invalid_argument);
  // type mismatch
  Configuration cw = make_configuration(2, {tri.points[1], tri.points[0], tri.points[2]});
  CHECK_THROWS_AS(connect_unambiguous(tri, cw, res.minima[0].signature),
                  std::invalid_argument);
  // square endpoint is ambiguous, not in any ucell
  SmtResult sq = steiner_minimal_trees(testsupport::unit_square());
  CHECK_THROWS_AS(connect_unambiguous(testsupport::unit_square(), testsupport::unit_square(),
                                      sq.minima[0].signature),
                  std::invalid_argument);
}

TEST_CASE("halving the sampling step keeps certified paths certified") {
  Configuration a = testsupport::equilateral_triangle();
  Configuration b = make_configuration(
      2, {Vec{0.05, -0.1}, Vec{1.15, 0.1}, Vec{0.55, 0.95}});
  const TypeSignature sig = classify3_signature(Triangle3Kind::FullCcw);
  REQUIRE(classify3(b) == Triangle3Kind::FullCcw);
  PathParams coarse = quick_params();
  coarse.samples = 24;
  PathParams fine = quick_params();
  fine.samples = 48;
  CertifiedPath first = connect_unambiguous(a, b, sig, coarse);
  CertifiedPath second = connect_unambiguous(a, b, sig, fine);
  CHECK(first.passed);
  CHECK(second.passed);
  CHECK(second.samples.size() > first.samples.size());
}

TEST_CASE("paths connect rotated and translated copies (n=4, d=2)") {
  Configuration a = make_configuration(
      2, {Vec{0.0, 0.0}, Vec{1.1, 0.1}, Vec{0.9, 1.0}, Vec{-0.2, 0.9}});
  auto [unique, res] = is_unambiguous(a);
  REQUIRE(unique);
  Configuration b = a;
  for (Vec& p : b.points) {
    p = rotate2(p, 0.4);
    p[0] += 0.25;
    p[1] += 0.1;
  }
  const TypeSignature sig = res.minima[0].signature;
  CertifiedPath path = connect_unambiguous(a, b, sig, quick_params());
  check_passed(path, sig);
}

TEST_CASE("paths work in three dimensions (n=3)") {
  Configuration a = make_configuration(
      3, {Vec{0.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.1}, Vec{0.4, 0.9, -0.1}});
  Configuration b = make_configuration(
      3, {Vec{0.1, -0.1, 0.4}, Vec{1.2, 0.15, 0.5}, Vec{0.5, 1.0, 0.6}});
  auto [ua, ra] = is_unambiguous(a);
  auto [ub, rb] = is_unambiguous(b);
  REQUIRE(ua);
  REQUIRE(ub);
  REQUIRE(ra.minima[0].signature == rb.minima[0].signature);
  CertifiedPath path = connect_unambiguous(a, b, ra.minima[0].signature, quick_params());
  check_passed(path, ra.minima[0].signature);
}

TEST_CASE("paths work in four dimensions (n=3)") {
  Configuration a = make_configuration(
      4, {Vec{0.0, 0.0, 0.0, 0.0}, Vec{1.0, 0.1, -0.1, 0.0}, Vec{0.4, 0.9, 0.2, 0.1}});
  Configuration b = make_configuration(
      4, {Vec{0.2, -0.1, 0.3, 0.4}, Vec{1.1, 0.0, 0.2, 0.5}, Vec{0.5, 1.0, 0.5, 0.3}});
  auto [ua, ra] = is_unambiguous(a);
  auto [ub, rb] = is_unambiguous(b);
  REQUIRE(ua);
  REQUIRE(ub);
  REQUIRE(ra.minima[0].signature == rb.minima[0].signature);
  CertifiedPath path = connect_unambiguous(a, b, ra.minima[0].signature, quick_params());
  check_passed(path, ra.minima[0].signature);
}

TEST_CASE("paths through a thin type with a degree-3 terminal anchor") {
  // star centered at a terminal with exact 120-degree separations: every
  // moustache is two-sided with a terminal anchor, so the lift must keep the
  // anchor a terminal
  auto star_config = [](double rot) {
    std::vector<Vec> pts{Vec{0.0, 0.0}};
    const double radii[] = {1.0, 1.1, 1.2};
    for (int k = 0; k < 3; ++k) {
      const double a = rot + k * 2.0 * M_PI / 3.0;
      pts.push_back(Vec{radii[k] * std::cos(a), radii[k] * std::sin(a)});
    }
    return make_configuration(2, std::move(pts));
  };
  Configuration a = star_config(0.0);
  Configuration b = star_config(0.5);
  for (Vec& p : b.points) {
    p[0] += 0.3;
    p[1] -= 0.2;
  }
  auto [ua, ra] = is_unambiguous(a);
  auto [ub, rb] = is_unambiguous(b);
  REQUIRE(ua);
  REQUIRE(ub);
  REQUIRE(ra.minima[0].signature == rb.minima[0].signature);
  // the type really is the terminal-centered star
  auto deg = adjacency(ra.minima[0].network.topology);
  CHECK(deg[0].size() == 3);
  CHECK(ra.minima[0].network.topology.interior == 0);

  CertifiedPath path = connect_unambiguous(a, b, ra.minima[0].signature, quick_params());
  check_passed(path, ra.minima[0].signature);
}

TEST_CASE("escape from the square's ambiguity lands in the chosen ucell") {
  Configuration sq = testsupport::unit_square();
  SmtResult res = steiner_minimal_trees(sq);
  REQUIRE(res.minima.size() == 2);
  for (const SmtMinimum& m : res.minima) {
    EscapeMove move = escape_ambiguity(sq, m.signature);
    CHECK(move.r > 0.0);
    CHECK(move.margin > 0.0);
    CHECK(move.after.minima.size() == 1);
    CHECK(move.after.minima[0].signature == m.signature);
    // motions are unit vectors at the four degree-1 corners
    for (const Vec& mv : move.motions) CHECK(norm(mv) == doctest::Approx(1.0).epsilon(1e-9));
    // the move is bounded by half the shortest edge
    CHECK(move.r <= 0.5 * shortest_edge(m.network) + 1e-12);
  }

  // already unambiguous input is a precondition error
  Configuration tri = testsupport::equilateral_triangle();
  SmtResult tri_res = steiner_minimal_trees(tri);
  CHECK_THROWS_AS(escape_ambiguity(tri, tri_res.minima[0].signature),
                  std::invalid_argument);
}

TEST_CASE("connect_cell joins two ambiguous squares of a shared full type") {
  Configuration sq = testsupport::unit_square();
  Configuration sq2 = make_configuration(
      2, {Vec{0.3, 0.2}, Vec{1.3, 0.2}, Vec{1.3, 1.2}, Vec{0.3, 1.2}});
  SmtResult r0 = steiner_minimal_trees(sq);
  SmtResult r1 = steiner_minimal_trees(sq2);
  TypeSignature shared;
  for (const SmtMinimum& a : r0.minima)
    for (const SmtMinimum& b : r1.minima)
      if (a.signature == b.signature) shared = a.signature;
  REQUIRE_FALSE(shared.empty());

  CertifiedPath path = connect_cell(sq, sq2, shared, quick_params());
  INFO("failure: ", path.failure);
  CHECK(path.passed);
  for (const SampleVerdict& v : path.verdicts) {
    CHECK(v.ok);
    CHECK(v.target_present);
  }
  CHECK(config_distance(path.samples.front(), sq) < 1e-12);
  CHECK(config_distance(path.samples.back(), sq2) < 1e-12);

  // unambiguous endpoints reduce to connect_unambiguous
  Configuration tri = testsupport::equilateral_triangle();
  SmtResult tres = steiner_minimal_trees(tri);
  CertifiedPath direct = connect_cell(tri, tri, tres.minima[0].signature, quick_params());
  CHECK(direct.passed);

  // dimension restriction
  Configuration a3 = make_configuration(
      3, {Vec{0, 0, 0}, Vec{1, 0, 0}, Vec{0.4, 0.9, 0.2}});
  SmtResult r3 = steiner_minimal_trees(a3);
  CHECK_THROWS_AS(connect_cell(a3, a3, r3.minima[0].signature), std::domain_error);

  // endpoints of different full types are rejected
  Configuration wide = make_configuration(
      2, {Vec{0, 0}, Vec{1.6, 0}, Vec{1.6, 1}, Vec{0, 1}});
  Configuration tall = make_configuration(
      2, {Vec{0, 0}, Vec{1, 0}, Vec{1, 1.6}, Vec{0, 1.6}});
  SmtResult wide_res = steiner_minimal_trees(wide);
  REQUIRE(wide_res.minima.size() == 1);
  CHECK_THROWS_AS(connect_cell(wide, tall, wide_res.minima[0].signature, quick_params()),
                  std::invalid_argument);
}

TEST_CASE("angle_alpha measures the counterclockwise angle at C") {
  // straight angle: edges from C toward D and the opposite direction
  SteinerTopology path4;
  path4.n = 4;
  path4.edges = {{0, 2}, {2, 3}, {1, 3}};  // A - C - D - B with C adjacent D
  Configuration c = make_configuration(
      2, {Vec{-1.0, 0.0}, Vec{2.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 0.0}});
  Network net{path4, c, {}, 0.0};
  net.length = network_length(net);
  CHECK(angle_alpha(net) == doctest::Approx(M_PI));

  // quarter turns on either side
  Configuration up = make_configuration(
      2, {Vec{0.0, 1.0}, Vec{2.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 0.0}});
  Network net_up{path4, up, {}, 0.0};
  net_up.length = network_length(net_up);
  CHECK(angle_alpha(net_up) == doctest::Approx(0.5 * M_PI));

  Configuration down = make_configuration(
      2, {Vec{0.0, -1.0}, Vec{2.0, 0.0}, Vec{0.0, 0.0}, Vec{1.0, 0.0}});
  Network net_down{path4, down, {}, 0.0};
  net_down.length = network_length(net_down);
  CHECK(angle_alpha(net_down) == doctest::Approx(1.5 * M_PI));
}

TEST_CASE("ambiguous4_demo exhibits the disconnected ambiguous locus") {
  Ambiguous4Demo demo = ambiguous4_demo();
  REQUIRE(demo.smt.minima.size() == 2);
  const double gap = std::abs(demo.smt.minima[0].length - demo.smt.minima[1].length);
  CHECK(gap <= 1e-9 * demo.smt.min_length);
  CHECK(demo.alpha0 > M_PI);
  CHECK(demo.alpha1 < M_PI);
  CHECK(demo.alpha0 + demo.alpha1 == doctest::Approx(2 * M_PI).epsilon(1e-6));
  CHECK_FALSE(demo.shared_type.empty());

  // the two orderings really share the claimed type among their minima
  for (int i = 0; i < 2; ++i) {
    SmtResult res = steiner_minimal_trees(demo.ordered[i]);
    bool present = false;
    for (const SmtMinimum& m : res.minima) present |= m.signature == demo.shared_type;
    CHECK(present);
  }
}
