#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lulu/operators.hpp"
#include "lulu/synth.hpp"

using namespace lulu;

namespace {

ScalarField field1d(std::vector<Value> v, Boundary b = Boundary::zero_padded) {
  auto lat = std::make_shared<Lattice>(std::vector<int>{static_cast<int>(v.size())},
                                       Connectivity::facet, b);
  return ScalarField(std::move(lat), std::move(v));
}

}  // namespace

TEST_CASE("flat zones of a 1D staircase") {
  const auto zp = flat_zones(field1d({4, 4, 2}));
  REQUIRE(zp.zones.size() == 2);
  CHECK(zp.zones[0].cells == CellSet{0, 1});
  CHECK(zp.zones[0].value == 4);
  CHECK(zp.zones[1].cells == CellSet{2});
  CHECK(zp.zones[1].value == 2);
  CHECK(zp.zones[0].neighbor_zone_ids == std::vector<int>{1});
  CHECK(zp.zones[0].touches_outside);
}

TEST_CASE("flat zones of a constant field") {
  auto lat = std::make_shared<Lattice>(std::vector<int>{2, 2});
  const auto zp = flat_zones(ScalarField(lat, {7, 7, 7, 7}));
  REQUIRE(zp.zones.size() == 1);
  CHECK(zp.zones[0].cells.size() == 4);
}

TEST_CASE("flat zones separate equal values across a gap") {
  const auto zp = flat_zones(field1d({1, 2, 1}));
  REQUIRE(zp.zones.size() == 3);
  for (const Zone& z : zp.zones) CHECK(z.size() == 1);
}

TEST_CASE("flat zones form a partition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto lat = std::make_shared<Lattice>(std::vector<int>{4, 4});
    const ScalarField f = uniform_random_field(lat, rng, 0, 3);
    const auto zp = flat_zones(f);
    std::vector<int> covered(static_cast<std::size_t>(f.cell_count()), 0);
    for (const Zone& z : zp.zones) {
      CHECK(is_connected(*lat, z.cells));
      for (Cell c : z.cells) {
        CHECK(f.at(c) == z.value);
        ++covered[static_cast<std::size_t>(c)];
      }
      // maximality: no adjacent cell outside the zone shares the value
      for (Cell c : adjacency_set(*lat, z.cells).cells) CHECK(f.at(c) != z.value);
    }
    for (int k : covered) CHECK(k == 1);
  }
}

TEST_CASE("local min set detection") {
  const ScalarField f = field1d({3, 1, 3});
  CHECK(is_local_min_set(f, {1}));
  CHECK_FALSE(is_local_min_set(f, {0}));  // borders OUTSIDE at 0
  const ScalarField g = field1d({0, 3, 1, 2, 4, 0}, Boundary::domain_only);
  CHECK(is_local_min_set(g, {2, 3}));
}

TEST_CASE("local extremal set error paths") {
  const ScalarField f = field1d({3, 1, 3, 1});
  CHECK_THROWS_AS(is_local_min_set(f, {}), std::invalid_argument);
  CHECK_THROWS_AS(is_local_min_set(f, {1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(is_local_max_set(f, {0, 2}), std::invalid_argument);
}

TEST_CASE("a set is never both a local min and a local max set") {
  std::mt19937_64 rng(5);
  auto lat = std::make_shared<Lattice>(std::vector<int>{3, 3});
  for (int trial = 0; trial < 60; ++trial) {
    const ScalarField f = uniform_random_field(lat, rng, -2, 2);
    for_each_connected_set(*lat, 2, [&](std::span<const Cell> s) {
      CellSet v(s.begin(), s.end());
      std::sort(v.begin(), v.end());
      CHECK_FALSE((is_local_min_set(f, v) && is_local_max_set(f, v)));
    });
  }
}

TEST_CASE("whole window in domain_only mode is not extremal") {
  const ScalarField f = field1d({5}, Boundary::domain_only);
  CHECK_FALSE(is_local_min_set(f, {0}));
  CHECK_FALSE(is_local_max_set(f, {0}));
}

TEST_CASE("extremal zones of a signed ramp") {
  const ScalarField f = field1d({-3, 0, 5});
  const auto mins = extremal_zones(f, 1, Extremum::minimum);
  REQUIRE(mins.size() == 1);
  CHECK(mins[0].cells == CellSet{0});
  CHECK(mins[0].value == -3);
  const auto maxs = extremal_zones(f, 1, Extremum::maximum);
  REQUIRE(maxs.size() == 1);
  CHECK(maxs[0].cells == CellSet{2});
  CHECK(maxs[0].value == 5);
}

TEST_CASE("constant field has no extremal zones below the window size") {
  auto lat = std::make_shared<Lattice>(std::vector<int>{2, 2});
  const ScalarField f(lat, {7, 7, 7, 7});
  for (int n = 1; n < 4; ++n) {
    CHECK(extremal_zones(f, n, Extremum::minimum).empty());
    CHECK(extremal_zones(f, n, Extremum::maximum).empty());
  }
  CHECK(extremal_zones(f, 4, Extremum::maximum).size() == 1);  // vs OUTSIDE at 0
}

TEST_CASE("same-polarity extremal zones are disjoint and non-adjacent") {
  std::mt19937_64 rng(23);
  auto lat = std::make_shared<Lattice>(std::vector<int>{10});
  for (int trial = 0; trial < 80; ++trial) {
    const ScalarField f = uniform_random_field(lat, rng, -3, 3);
    for (Extremum pol : {Extremum::minimum, Extremum::maximum}) {
      const auto zones = extremal_zones(f, 1, pol);
      for (std::size_t i = 0; i < zones.size(); ++i)
        for (std::size_t j = i + 1; j < zones.size(); ++j) {
          CellSet inter;
          std::set_intersection(zones[i].cells.begin(), zones[i].cells.end(),
                                zones[j].cells.begin(), zones[j].cells.end(),
                                std::back_inserter(inter));
          CHECK(inter.empty());
          const auto adj = adjacency_set(*lat, zones[i].cells).cells;
          for (Cell c : zones[j].cells) CHECK_FALSE(std::binary_search(adj.begin(), adj.end(), c));
        }
    }
  }
}

TEST_CASE("adjacent witness of a pit between walls") {
  const ScalarField f = field1d({3, 1, 3});
  const auto w = min_adjacent_witness(f, {1});
  CHECK(w.value == 3);
  CHECK(w.cell == 0);  // tie broken by smallest index
  CHECK_FALSE(w.is_outside);
}

TEST_CASE("adjacent witness prefers window cells at equal value") {
  const ScalarField f = field1d({-3, 0, 5});
  const auto w = min_adjacent_witness(f, {0});
  CHECK(w.value == 0);
  CHECK(w.cell == 1);
  CHECK_FALSE(w.is_outside);
}

TEST_CASE("adjacent witness falls back to OUTSIDE") {
  const ScalarField f = field1d({4, 4, 2});
  const auto w = min_adjacent_witness(f, {0, 1});
  CHECK(w.value == 0);
  CHECK(w.is_outside);
  CHECK(w.cell == -1);

  const auto m = max_adjacent_witness(f, {0, 1});
  CHECK(m.value == 2);
  CHECK(m.cell == 2);
}

TEST_CASE("adjacent witness rejects a full domain_only window") {
  const ScalarField f = field1d({1, 2}, Boundary::domain_only);
  CHECK_THROWS_AS(min_adjacent_witness(f, {0, 1}), std::invalid_argument);
}

TEST_CASE("brute force extremal sets agree with zone search under the hypothesis") {
  // When no extremal sets of size < n exist, all size-n extremal sets are
  // flat zones, so the zone-based search must be complete.
  std::mt19937_64 rng(31);
  for (Boundary b : {Boundary::zero_padded, Boundary::domain_only}) {
    auto lat = std::make_shared<Lattice>(std::vector<int>{8}, Connectivity::facet, b);
    int used = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2;
      const ScalarField f = p_n(uniform_random_field(lat, rng, -4, 4), n - 1);
      if (has_extremal_set_smaller_than(f, n)) continue;
      ++used;
      for (Extremum pol : {Extremum::minimum, Extremum::maximum}) {
        std::vector<CellSet> zones;
        for (const Zone& z : extremal_zones(f, n, pol)) zones.push_back(z.cells);
        std::sort(zones.begin(), zones.end());
        CHECK(zones == brute_force_extremal_sets(f, n, pol));
      }
    }
    CHECK(used > 0);
  }
}
