#include <algorithm>
#include <set>

#include "doctest.h"
#include "steinerlab/topology.hpp"
#include "support.hpp"

using namespace steinerlab;

namespace {

SteinerTopology star3() {
  SteinerTopology g;
  g.n = 3;
  g.interior = 1;
  g.edges = {{0, 3}, {1, 3}, {2, 3}};
  return g;
}

SteinerTopology path3(int mid) {
  SteinerTopology g;
  g.n = 3;
  const int a = mid == 0 ? 1 : 0;
  const int b = mid == 2 ? 1 : 2;
  g.edges = {{a, mid}, {mid, b}};
  return g;
}

// the two square trees: pairing {A,B|C,D} vs {A,D|B,C}
SteinerTopology square_tree(bool vertical) {
  SteinerTopology g;
  g.n = 4;
  g.interior = 2;
  if (vertical)
    g.edges = {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 5}};
  else
    g.edges = {{0, 4}, {3, 4}, {1, 5}, {2, 5}, {4, 5}};
  return g;
}

double factorial2(int k) {  // (k)!! for odd k
  double out = 1.0;
  for (int i = k; i >= 1; i -= 2) out *= i;
  return out;
}

}  // namespace

TEST_CASE("signatures separate terminal-labeled trees") {
  CHECK(canonicalize(square_tree(true)) != canonicalize(square_tree(false)));
  CHECK(canonicalize(path3(1)) != canonicalize(path3(0)));

  // interior relabeling is invisible
  SteinerTopology g = square_tree(true);
  SteinerTopology swapped = g;
  for (auto& [a, b] : swapped.edges) {
    auto flip = [&](int v) { return v == 4 ? 5 : v == 5 ? 4 : v; };
    a = flip(a);
    b = flip(b);
  }
  CHECK(canonicalize(g) == canonicalize(swapped));
}

TEST_CASE("signatures are invariant under random interior relabeling") {
  auto& gen = testsupport::rng(201);
  for (const SteinerTopology& g : enumerate_full_topologies(6)) {
    std::vector<int> perm(g.interior);
    for (int i = 0; i < g.interior; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    SteinerTopology relabeled = g;
    for (auto& [a, b] : relabeled.edges) {
      if (a >= g.n) a = g.n + perm[a - g.n];
      if (b >= g.n) b = g.n + perm[b - g.n];
    }
    CHECK(canonicalize(g) == canonicalize(relabeled));
  }
}

TEST_CASE("planar signatures keep the embedding orientation") {
  PlanarOrders ccw(4), cw(4);
  ccw[0] = cw[0] = {3};
  ccw[1] = cw[1] = {3};
  ccw[2] = cw[2] = {3};
  ccw[3] = {0, 1, 2};
  cw[3] = {0, 2, 1};
  CHECK(canonicalize(star3(), ccw) != canonicalize(star3(), cw));
  // rotating the cyclic order is invisible
  PlanarOrders rot = ccw;
  rot[3] = {1, 2, 0};
  CHECK(canonicalize(star3(), ccw) == canonicalize(star3(), rot));
}

TEST_CASE("full topology enumeration matches the double factorial") {
  for (int n = 3; n <= 7; ++n) {
    auto all = enumerate_full_topologies(n);
    CHECK(all.size() == doctest::Approx(factorial2(2 * n - 5)));
    std::set<TypeSignature> sigs;
    for (const SteinerTopology& g : all) {
      REQUIRE_FALSE(validate_topology(g).has_value());
      CHECK(is_full_topology(g));
      sigs.insert(canonicalize(g));
    }
    CHECK(sigs.size() == all.size());
  }
  CHECK_THROWS_AS(enumerate_full_topologies(2), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_full_topologies(10), BudgetExceeded);
}

TEST_CASE("contraction shrinks coincident subtrees") {
  SUBCASE("all distinct images is the identity on signatures") {
    SteinerTopology g = star3();
    std::vector<Vec> pos{{0, 0}, {1, 0}, {0.5, 0.8}, {0.5, 0.3}};
    ContractResult c = contract(g, pos, 1e-9);
    CHECK(canonicalize(c.type) == canonicalize(g));
  }

  SUBCASE("a collapsed center edge leaves one degree-4 vertex") {
    SteinerTopology g = square_tree(true);
    std::vector<Vec> pos{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0.5}};
    ContractResult c = contract(g, pos, 1e-9);
    CHECK(c.type.interior == 1);
    CHECK(c.type.edges.size() == 4);
    auto adj = adjacency(c.type);
    CHECK(adj[4].size() == 4);
  }

  SUBCASE("an interior vertex on a terminal collapses to the path type") {
    SteinerTopology g = star3();
    std::vector<Vec> pos{{0, 0}, {1, 0}, {2, 0}, {1, 0}};
    ContractResult c = contract(g, pos, 1e-9);
    CHECK(canonicalize(c.type) == canonicalize(path3(1)));
  }

  SUBCASE("merging two terminals is rejected") {
    SteinerTopology g = path3(1);
    std::vector<Vec> pos{{0, 0}, {1e-12, 0}, {1, 0}};
    CHECK_THROWS_AS(contract(g, pos, 1e-9), std::domain_error);
  }
}

TEST_CASE("moustache detection") {
  SUBCASE("n=3 star has all three leaf pairs") {
    auto ms = find_moustaches(star3());
    REQUIRE(ms.size() == 3);
    for (const MoustacheSpec& m : ms) {
      CHECK(m.kind == MoustacheSpec::Kind::TwoSided);
      CHECK(m.anchor == 3);
    }
    CHECK(ms[0].leaf_p == 0);
    CHECK(ms[0].leaf_q == 1);
  }

  SUBCASE("path A-B-C has two one-sided moustaches at B") {
    auto ms = find_moustaches(path3(1));
    REQUIRE(ms.size() == 2);
    CHECK(ms[0].kind == MoustacheSpec::Kind::OneSided);
    CHECK(ms[0].leaf_p == 0);
    CHECK(ms[0].anchor == 1);
    CHECK(ms[1].leaf_p == 2);
  }

  SUBCASE("n=4 full topologies have one moustache per interior vertex") {
    for (const SteinerTopology& g : enumerate_full_topologies(4)) {
      auto ms = find_moustaches(g);
      CHECK(ms.size() == 2);
      for (const MoustacheSpec& m : ms) CHECK(m.kind == MoustacheSpec::Kind::TwoSided);
    }
  }
}

TEST_CASE("shaving removes the moustache and renumbers terminals") {
  SUBCASE("two-sided shave of the star leaves a single edge") {
    auto ms = find_moustaches(star3());
    ShaveResult sh = shave(star3(), ms[0]);  // leaves {0,1} at the center
    CHECK(sh.topology.n == 2);
    CHECK(sh.topology.interior == 0);
    CHECK(sh.topology.edges.size() == 1);
    CHECK(sh.anchor_new_label == 0);  // anchor takes the smaller label
    CHECK(sh.terminal_map[2] == 1);
  }

  SUBCASE("one-sided shave of the path leaves an edge") {
    auto ms = find_moustaches(path3(1));
    ShaveResult sh = shave(path3(1), ms[0]);  // shave A at B
    CHECK(sh.topology.n == 2);
    CHECK(sh.topology.edges.size() == 1);
    CHECK(sh.anchor_new_label == 0);  // B becomes terminal 0
    CHECK(sh.terminal_map[1] == 0);
    CHECK(sh.terminal_map[2] == 1);
  }

  SUBCASE("shaving a full n=4 topology gives the full n=3 topology") {
    for (const SteinerTopology& g : enumerate_full_topologies(4)) {
      auto ms = find_moustaches(g);
      ShaveResult sh = shave(g, ms.front());
      CHECK(sh.topology.n == 3);
      CHECK(is_full_topology(sh.topology));
    }
  }

  SUBCASE("shaves of every full topology stay trees with n-1 terminals") {
    for (int n = 4; n <= 6; ++n)
      for (const SteinerTopology& g : enumerate_full_topologies(n))
        for (const MoustacheSpec& m : find_moustaches(g)) {
          ShaveResult sh = shave(g, m);
          CHECK(sh.topology.n == n - 1);
          CHECK_FALSE(validate_topology(sh.topology).has_value());
        }
  }
}
