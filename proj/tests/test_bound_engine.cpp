#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dense_oracle.hpp"
#include "entbound/bound_engine.hpp"
#include "entbound/error.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/witness_oracle.hpp"

using namespace entbound;
using std::numbers::pi;

TEST_SUITE("bound_engine") {

TEST_CASE("spin bound formula") {
  CHECK(spin_bound(0.0) == 1.0);
  CHECK(spin_bound(2.0) == 0.0);
  CHECK(spin_bound(3.0) == 0.0);
  CHECK(spin_bound_raw(3.0) == -0.5);
  CHECK(spin_bound(-5e-10) == doctest::Approx(1.0));
  CHECK_THROWS_AS(spin_bound(-1e-8), Error);
  CHECK_THROWS_AS(spin_bound(std::nan("")), Error);
}

TEST_CASE("two-site singlet bound follows the closed form") {
  const auto lat = build_lattice({LatticeKind::chain, {2}, 1.0, Boundary::open});
  const auto corr = correlators(ground_state(build_heisenberg(lat, 1.0)).state);
  CHECK(spin_bound(structure_factor(corr, lat, {pi / 3, 0, 0}).total) == doctest::Approx(0.25));

  // the oracle agrees on S at the same point
  const auto rho = oracle::ground_projector(oracle::heisenberg(2, oracle::open_chain_bonds(2), 1.0));
  CHECK(oracle::chain_structure_factor(rho, 2, 1.0, pi / 3) == doctest::Approx(1.5));

  const auto map = spin_bound_map(structure_factor_grid(corr, lat, q_grid(lat, {33})));
  CHECK(map.masked_count() == 0);
  for (const auto& p : map.points) {
    CHECK(*p.value == doctest::Approx(std::max(0.0, -0.5 + 1.5 * std::cos(p.coords[0]))).epsilon(1e-12));
    CHECK(*p.value == std::max(0.0, *p.raw));
    CHECK(*p.value <= 1.0 + 1e-9);
  }
}

TEST_CASE("dataset maps mask invalid rows") {
  SqDataset data;
  data.dimension = 1;
  data.q = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  data.s = {3.0, -0.2, 0.0, -1e-10};
  const auto map = spin_bound_map(data);
  CHECK(map.masked_count() == 1);
  CHECK(map.points[1].mask == MaskReason::negative_s);
  CHECK_FALSE(map.points[1].value.has_value());
  CHECK(*map.points[0].value == 0.0);
  CHECK(*map.points[2].value == 1.0);
  CHECK(map.points[3].mask == MaskReason::ok);
  CHECK(map.argmax() == 3u);  // S = -1e-10 is rounding and gives E marginally above 1
  CHECK(map.points[0].coords.size() == 2);
}

TEST_CASE("product witness expectation") {
  const auto one = build_lattice({LatticeKind::chain, {1}, 1.0, Boundary::open});
  const std::array<double, 3> up{0, 0, 1}, zero{0, 0, 0};
  for (double q : {0.0, 1.0, pi}) {
    CHECK(product_witness_expectation({q, 0, 0}, std::span(&up, 1), one) == doctest::Approx(0.5));
    CHECK(product_witness_expectation({q, 0, 0}, std::span(&zero, 1), one) == doctest::Approx(0.5));
  }
  const auto lat = build_lattice({LatticeKind::chain, {5}, 1.0, Boundary::open});
  std::vector<std::array<double, 3>> mixed(5, zero);
  CHECK(product_witness_expectation({0.7, 0, 0}, mixed, lat) == doctest::Approx(0.5));
  mixed[2] = {0.8, 0.8, 0.0};
  CHECK_THROWS_AS(product_witness_expectation({0.7, 0, 0}, mixed, lat), Error);

  for (std::uint64_t k = 0; k < 200; ++k) {
    const auto sample = sample_product_spin_state(5, k % 2 ? Purity::mixed : Purity::pure, 3, k);
    for (double q : {0.0, 0.9, pi}) CHECK(product_witness_expectation({q, 0, 0}, sample.bloch, lat) >= -1e-10);
  }
}

TEST_CASE("boson bound formula") {
  CHECK(boson_bound(4.0, 1.0, 4.0) == 0.0);
  CHECK(boson_bound(0.0, 0.3, 1.0) == 1.0);
  CHECK(boson_bound(0.2, 0.3, 0.0) == 0.0);
  CHECK(boson_bound_raw(1.0, 2.0, 3.0) == 2.5);
  CHECK_THROWS_AS(boson_bound(1.0, 0.0, 1.0), Error);
  CHECK_THROWS_AS(boson_bound(1.0, 0.5, 1.0, 0.6), Error);
  CHECK_THROWS_AS(boson_bound(-0.1, 1.0, 1.0), Error);
  CHECK_THROWS_AS(boson_bound(0.1, 1.0, -1.0), Error);
}

TEST_CASE("mean atom number precedence") {
  TofImage img;
  TofCalibration calib;
  CHECK_THROWS_AS(resolve_mean_number(img, calib), Error);
  calib.mean_atom_number = 3.0;
  CHECK(resolve_mean_number(img, calib) == 3.0);
  img.mean_atom_number = 5.0;
  CHECK(resolve_mean_number(img, calib) == 5.0);
  CHECK(resolve_mean_number(img, calib, 7.0) == 7.0);
}

TEST_CASE("boson map masking") {
  TofCalibration calib;
  calib.lattice = {LatticeKind::chain, {2}, 1.0, Boundary::open};
  calib.far_field = true;
  TofImage img;
  img.nx = 3;
  img.ny = 1;
  img.xs = {-30.0, 0.0, 1.0};
  img.ys = {0.0};
  img.mean_atom_number = 2.0;
  img.values = {0.0, 2.0 * tof_envelope(0.0, 0.0, calib), -1.0};
  const auto map = boson_bound_map(img, calib);
  CHECK(map.points[0].mask == MaskReason::f_floor);
  CHECK(map.points[1].mask == MaskReason::ok);
  CHECK(*map.points[1].value == 0.0);
  CHECK(map.points[2].mask == MaskReason::negative_n);

  BosonBoundOptions all;
  all.f_floor_relative = 1.0;
  CHECK(boson_bound_map(img, calib, all).all_masked());

  img.values[1] = std::nan("");
  CHECK(boson_bound_map(img, calib).points[1].mask == MaskReason::missing_data);
}

TEST_CASE("mask codes round trip through text") {
  for (auto r : {MaskReason::ok, MaskReason::f_floor, MaskReason::negative_s, MaskReason::negative_n,
                 MaskReason::missing_data}) {
    CHECK(mask_reason_from_string(to_string(r)) == r);
  }
  CHECK(to_string(MaskReason::negative_s) == "negative-S");
  CHECK_FALSE(mask_reason_from_string("bogus").has_value());
}

}
