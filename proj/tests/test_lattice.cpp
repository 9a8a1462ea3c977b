#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "entbound/error.hpp"
#include "entbound/lattice.hpp"

using namespace entbound;

TEST_SUITE("lattice") {

TEST_CASE("open chain geometry") {
  const auto lat = build_lattice({LatticeKind::chain, {4}, 0.5, Boundary::open});
  CHECK(lat.size() == 4);
  CHECK(lat.neighbor_pairs().size() == 3);
  CHECK(lat.position(3)[0] == doctest::Approx(1.5));
  CHECK(lat.planar());
  for (auto [i, j] : lat.neighbor_pairs()) CHECK(i < j);
}

TEST_CASE("periodic chain wraps and needs three sites") {
  const auto lat = build_lattice({LatticeKind::chain, {4}, 1.0, Boundary::periodic});
  CHECK(lat.neighbor_pairs().size() == 4);
  const auto z = lat.coordination_numbers();
  CHECK(std::all_of(z.begin(), z.end(), [](int c) { return c == 2; }));
  CHECK_THROWS_AS(build_lattice({LatticeKind::chain, {2}, 1.0, Boundary::periodic}), Error);
}

TEST_CASE("square and cubic bond counts") {
  const auto sq = build_lattice({LatticeKind::square, {3, 3}, 1.0, Boundary::open});
  CHECK(sq.size() == 9);
  CHECK(sq.neighbor_pairs().size() == 12);
  const auto z = sq.coordination_numbers();
  CHECK(z[0] == 2);
  CHECK(z[4] == 4);
  CHECK(sq.planar());

  const auto cube = build_lattice({LatticeKind::cubic, {2, 2, 2}, 1.0, Boundary::open});
  CHECK(cube.neighbor_pairs().size() == 12);
  CHECK_FALSE(cube.planar());

  const auto torus = build_lattice({LatticeKind::square, {3, 4}, 1.0, Boundary::periodic});
  CHECK(torus.neighbor_pairs().size() == 24);
}

TEST_CASE("row-major site order, last axis fastest") {
  const auto sq = build_lattice({LatticeKind::square, {2, 3}, 1.0, Boundary::open});
  CHECK(sq.coordinates()[1] == std::array<int, 3>{0, 1, 0});
  CHECK(sq.coordinates()[3] == std::array<int, 3>{1, 0, 0});
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(build_lattice({LatticeKind::chain, {}, 1.0, Boundary::open}), Error);
  CHECK_THROWS_AS(build_lattice({LatticeKind::chain, {3}, 0.0, Boundary::open}), Error);
  CHECK_THROWS_AS(build_lattice({LatticeKind::square, {3}, 1.0, Boundary::open}), Error);
  CHECK_THROWS_AS(build_lattice({LatticeKind::chain, {0}, 1.0, Boundary::open}), Error);
}

TEST_CASE("q grid covers the Brillouin zone edge to edge") {
  const auto chain = build_lattice({LatticeKind::chain, {4}, 2.0, Boundary::open});
  const auto g = q_grid(chain, {16});
  REQUIRE(g.points.size() == 16);
  CHECK(g.points.front()[0] == doctest::Approx(-std::numbers::pi / 2));
  CHECK(g.points.back()[0] == doctest::Approx(std::numbers::pi / 2));

  const auto odd = q_grid(chain, {5});
  CHECK(odd.points[2][0] == 0.0);

  const auto sq = build_lattice({LatticeKind::square, {2, 2}, 1.0, Boundary::open});
  const auto corners = q_grid(sq, {2, 2});
  CHECK(corners.points.size() == 4);
  CHECK(corners.points[1][0] == doctest::Approx(-std::numbers::pi));
  CHECK(corners.points[1][1] == doctest::Approx(std::numbers::pi));
  CHECK_THROWS_AS(q_grid(sq, {1, 3}), Error);
  CHECK_THROWS_AS(q_grid(sq, {3}), Error);
}

TEST_CASE("lattice JSON round trip and strict keys") {
  const LatticeSpec spec{LatticeKind::square, {3, 4}, 0.75, Boundary::periodic};
  const auto back = lattice_spec_from_json(to_json(spec));
  CHECK(back.kind == spec.kind);
  CHECK(back.dims == spec.dims);
  CHECK(back.spacing == spec.spacing);
  CHECK(back.boundary == spec.boundary);

  auto j = to_json(spec);
  j["colour"] = "blue";
  CHECK_THROWS_AS(lattice_spec_from_json(j), Error);
  CHECK_THROWS_AS(lattice_spec_from_json(nlohmann::json{{"kind", "hexagonal"}, {"dims", {3}}}), Error);
}

}
