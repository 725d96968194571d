#include <doctest.h>

#include <set>

#include "ensemblekit/error.hpp"
#include "ensemblekit/lattice.hpp"

using namespace ensemblekit;

TEST_SUITE("lattice") {

TEST_CASE("lexicographic site numbering") {
  LatticeSpec lat(3, 2);
  CHECK(lat.num_sites() == 9);
  CHECK(lat.index({1, 1}) == 0);
  CHECK(lat.index({1, 2}) == 1);
  CHECK(lat.index({2, 1}) == 3);
  CHECK(lat.coord(5) == Coord{2, 3});
  for (std::size_t s = 0; s < lat.num_sites(); ++s) CHECK(lat.index(lat.coord(s)) == s);
  CHECK_THROWS_AS(LatticeSpec(0, 1), Error);
}

TEST_CASE("region distance is the minimum Manhattan distance") {
  LatticeSpec lat(5, 2);
  const auto x = Region::from_coords(lat, {{1, 1}, {1, 2}});
  const auto y = Region::from_coords(lat, {{4, 4}});
  CHECK(distance(x, y) == 5);
  CHECK(distance(x, x) == 0);
  const auto z = Region::from_coords(lat, {{1, 3}});
  CHECK(distance(x, z) == 1);
}

TEST_CASE("radius and diameter") {
  LatticeSpec lat(5, 1);
  const Region r(lat, {0, 1, 2});
  CHECK(r.radius() == 1);
  CHECK(r.diameter() == 2);
  CHECK(Region::single(lat, 3).radius() == 0);
}

TEST_CASE("regions reject duplicates and foreign sites") {
  LatticeSpec lat(3, 1);
  CHECK_THROWS_AS(Region(lat, {0, 0}), Error);
  CHECK_THROWS_AS(Region(lat, {3}), Error);
  CHECK_THROWS_AS(Region(lat, {}), Error);
  const Region r(lat, {2, 0});
  CHECK(r.sites()[0] == 0);
  CHECK(r.position_of(2) == 1);
}

TEST_CASE("hypercube count is (n-l+1)^d") {
  for (int d = 1; d <= 2; ++d)
    for (int n = 1; n <= 10; ++n)
      for (int l = 1; 2 * l <= n + 1; ++l) {
        LatticeSpec lat(n, d);
        const auto fam = hypercubes(lat, l);
        std::size_t expected = 1;
        for (int k = 0; k < d; ++k) expected *= static_cast<std::size_t>(n - l + 1);
        REQUIRE(fam.cubes.size() == expected);
        const auto volume = static_cast<std::size_t>(d == 1 ? l : l * l);
        for (const auto& c : fam.cubes) CHECK(c.size() == volume);
      }
  CHECK_THROWS_AS(hypercubes(LatticeSpec(4, 1), 3), Error);
  CHECK_THROWS_AS(hypercubes(LatticeSpec(4, 1), 0), Error);
}

TEST_CASE("group decomposition partitions and separates, exhaustively") {
  for (int d = 1; d <= 2; ++d)
    for (int n = 1; n <= 10; ++n)
      for (int l = 1; 2 * l <= n + 1; ++l)
        for (int r = 0; r <= 3; ++r) {
          LatticeSpec lat(n, d);
          const auto fam = hypercubes(lat, l);
          const auto groups = group_decomposition(fam, r);
          std::multiset<std::size_t> seen;
          for (const auto& g : groups.groups) {
            for (auto i : g) seen.insert(i);
            for (std::size_t a = 0; a < g.size(); ++a)
              for (std::size_t b = a + 1; b < g.size(); ++b)
                REQUIRE(distance(fam.cubes[g[a]], fam.cubes[g[b]]) > r);
          }
          REQUIRE(seen.size() == fam.cubes.size());
          for (std::size_t i = 0; i < fam.cubes.size(); ++i) REQUIRE(seen.count(i) == 1);
        }
}

TEST_CASE("n=5 d=2 l=2 r=1 by brute force") {
  LatticeSpec lat(5, 2);
  const auto fam = hypercubes(lat, 2);
  const auto groups = group_decomposition(fam, 1);
  CHECK(groups.keys.size() == 9);
  std::size_t total = 0;
  for (const auto& g : groups.groups) {
    total += g.size();
    for (auto a : g)
      for (auto b : g)
        if (a != b) CHECK(distance(fam.cubes[a], fam.cubes[b]) > 1);
  }
  CHECK(total == 16);
}

}
