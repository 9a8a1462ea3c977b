#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "entbound/io.hpp"
#include "fixtures.hpp"

using namespace entbound;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = entbound::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path(const std::string& name) { return fixtures::scratch("cli_" + name).string(); }

std::string write(const std::string& name, const std::string& text) {
  const auto p = path(name);
  write_file_atomic(p, text);
  return p;
}

std::string chain(int m) {
  return write("chain" + std::to_string(m) + ".json",
               R"({"kind":"chain","dims":[)" + std::to_string(m) + R"(],"spacing":1,"boundary":"open"})");
}

std::string calib(bool far_field, const std::string& extra = "") {
  return write(std::string("calib") + (far_field ? "_far" : "_near") + (extra.empty() ? "" : "_x") + ".json",
               std::string(R"({"units":"natural","mass":1,"flight_time":1,"wannier_width":0.2,"far_field":)") +
                   (far_field ? "true" : "false") + extra +
                   R"(,"lattice":{"kind":"chain","dims":[4],"spacing":1,"boundary":"open"}})");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("spin-sim writes a q grid") {
  const auto r = run_cli({"spin-sim", "--lattice", chain(4), "--J", "1", "--beta", "1", "--q-res", "16", "--out", path("sq.csv")});
  REQUIRE(r.code == 0);
  const auto data = load_sq_csv(path("sq.csv"));
  CHECK(data.size() == 16);
  CHECK(data.comments.at(0).rfind("config {", 0) == 0);

  REQUIRE(run_cli({"spin-sim", "--lattice", chain(4), "--beta", "0", "--out", path("sq0.csv")}).code == 0);
  for (double s : load_sq_csv(path("sq0.csv")).s) CHECK(s == doctest::Approx(3.0));

  REQUIRE(run_cli({"spin-sim", "--lattice", chain(2), "--ground", "--q-res", "3", "--out", path("sq2.csv")}).code == 0);
  const auto singlet = load_sq_csv(path("sq2.csv"));
  CHECK(singlet.q[1][0] == 0.0);
  CHECK(std::abs(singlet.s[1]) < 1e-12);
}

TEST_CASE("spin-sim usage errors") {
  CHECK(run_cli({"spin-sim", "--lattice", chain(4), "--out", path("x.csv")}).code == 2);
  CHECK(run_cli({"spin-sim", "--lattice", chain(4), "--beta", "1", "--ground", "--out", path("x.csv")}).code == 2);
  CHECK(run_cli({"spin-sim", "--lattice", path("missing.json"), "--beta", "1", "--out", path("x.csv")}).code == 2);
  const auto big = run_cli({"spin-sim", "--lattice", chain(14), "--beta", "1", "--out", path("x.csv")});
  CHECK(big.code == 2);
  CHECK(big.err.find("limited") != std::string::npos);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("spin-bound") {
  const auto in = write("sq_in.csv", "qx,S\n0,0\n1,3\n2,-0.5\n");
  REQUIRE(run_cli({"spin-bound", "--in", in, "--out", path("b.csv")}).code == 0);
  const auto map = load_bound_map(path("b.csv"));
  CHECK(*map.points[0].value == 1.0);
  CHECK(*map.points[1].value == 0.0);
  CHECK(map.points[2].mask == MaskReason::negative_s);

  const auto all3 = write("sq3.csv", "qx,S\n0,3\n1,3\n");
  CHECK(run_cli({"spin-bound", "--in", all3, "--out", path("b3.csv")}).code == 0);
  const auto bad = write("sqbad.csv", "qx,S\n0,zero\n");
  CHECK(run_cli({"spin-bound", "--in", bad, "--out", path("bb.csv")}).code == 2);
  const auto neg = write("sqneg.csv", "qx,S\n0,-1\n");
  const auto r = run_cli({"spin-bound", "--in", neg, "--out", path("bn.csv")});
  CHECK(r.code == 1);
  CHECK(r.err.find("masked") != std::string::npos);
}

TEST_CASE("boson-sim and boson-bound") {
  REQUIRE(run_cli({"boson-sim", "--calib", calib(true), "--J", "0", "--N", "4", "--ground", "--pixels", "9",
               "--out", path("mott.csv"), "--bound-out", path("mott_bound.csv")}).code == 0);
  for (const auto& p : load_bound_map(path("mott_bound.csv")).points) {
    if (p.mask == MaskReason::ok) CHECK(*p.value == 0.0);
  }

  REQUIRE(run_cli({"boson-sim", "--calib", calib(true), "--N", "1", "--ground", "--pixels", "9", "--out",
               path("one.bin"), "--calib-out", path("one_calib.json"), "--bound-out", path("one_bound.csv")}).code == 0);
  const auto map = load_bound_map(path("one_bound.csv"));
  CHECK(std::abs(*map.points[*map.argmax()].value - 1.0) < 1e-8);

  REQUIRE(run_cli({"boson-bound", "--image", path("one.bin"), "--calib", path("one_calib.json"), "--out",
               path("one_bound2.csv")}).code == 0);
  const auto again = load_bound_map(path("one_bound2.csv"));
  REQUIRE(again.points.size() == map.points.size());
  for (std::size_t k = 0; k < map.points.size(); ++k) CHECK(*again.points[k].value == *map.points[k].value);

  CHECK(run_cli({"boson-bound", "--image", path("one.bin"), "--calib", path("one_calib.json"), "--out",
             path("masked.csv"), "--f-floor", "1"}).code == 1);
  // no detector and no mean atom number in the plain calibration
  CHECK(run_cli({"boson-bound", "--image", path("mott.csv"), "--calib", calib(true), "--out", path("x.csv")}).code == 0);
  const auto img = load_tof(path("mott.csv"), TofCalibration{});
  auto stripped = img;
  stripped.mean_atom_number.reset();
  save_tof(stripped, path("nomean.csv"));
  CHECK(run_cli({"boson-bound", "--image", path("nomean.csv"), "--calib", calib(true), "--out", path("x.csv")}).code == 2);
  CHECK(run_cli({"boson-bound", "--image", path("nomean.csv"), "--calib", calib(true), "--N", "4", "--out", path("x.csv")}).code == 0);
}

TEST_CASE("k-space and position images give the same bound") {
  const auto mass2 = write("calib_m2.json",
                           R"({"units":"natural","mass":2,"flight_time":1,"wannier_width":0.2,"far_field":false,)"
                           R"("lattice":{"kind":"chain","dims":[4],"spacing":1,"boundary":"open"}})");
  REQUIRE(run_cli({"boson-sim", "--calib", mass2, "--N", "2", "--beta", "1", "--pixels", "7", "--out", path("k.csv")}).code == 0);
  auto img = load_tof(path("k.csv"), TofCalibration{});
  REQUIRE(img.k_space);
  // kappa = m / (hbar t) = 2
  for (auto& x : img.xs) x /= 2.0;
  for (auto& y : img.ys) y /= 2.0;
  img.k_space = false;
  save_tof(img, path("pos.csv"));

  REQUIRE(run_cli({"boson-bound", "--image", path("k.csv"), "--calib", mass2, "--out", path("kb.csv")}).code == 0);
  REQUIRE(run_cli({"boson-bound", "--image", path("pos.csv"), "--calib", mass2, "--out", path("pb.csv")}).code == 0);
  const auto kmap = load_bound_map(path("kb.csv"));
  const auto pmap = load_bound_map(path("pb.csv"));
  REQUIRE(pmap.points.size() == kmap.points.size());
  for (std::size_t k = 0; k < kmap.points.size(); ++k) {
    CHECK(*pmap.points[k].raw == doctest::Approx(*kmap.points[k].raw).epsilon(1e-12));
  }
}

TEST_CASE("validate") {
  const auto a = run_cli({"validate", "--suite", "spin-witness", "--samples", "50", "--seed", "7", "--out", path("r1.json")});
  CHECK(a.code == 0);
  CHECK(run_cli({"validate", "--suite", "spin-witness", "--samples", "50", "--seed", "7", "--out", path("r2.json")}).code == 0);
  CHECK(read_file(path("r1.json")) == read_file(path("r2.json")));
  CHECK(run_cli({"validate", "--suite", "sector-eigs", "--Mmax", "3", "--Nmax", "2"}).code == 0);
  CHECK(run_cli({"validate", "--suite", "uncertainty", "--samples", "100"}).code == 2);
  CHECK(run_cli({"validate", "--suite", "unknown", "--seed", "1"}).code == 2);
  const auto r = run_cli({"validate", "--suite", "uncertainty", "--samples", "100", "--seed", "1"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).at("pass") == true);
}

TEST_CASE("sweep") {
  CHECK(run_cli({"sweep", "--param", "beta", "--values", "", "--lattice", chain(4), "--out", path("s.csv")}).code == 2);
  CHECK(run_cli({"sweep", "--param", "gamma", "--values", "1", "--lattice", chain(4), "--out", path("s.csv")}).code == 2);
  REQUIRE(run_cli({"sweep", "--param", "beta", "--values", "2,1,0.5", "--lattice", chain(4), "--q", "0", "--out",
               path("s.csv")}).code == 0);
  std::istringstream in(read_file(path("s.csv")));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 6);
  CHECK(lines[2] == "beta,qx,qy,S,raw,E,status");

  REQUIRE(run_cli({"sweep", "--model", "boson", "--param", "J", "--values", "0.01,0.02", "--calib", calib(true),
               "--N", "4", "--ground", "--pixels", "9", "--out", path("sj.csv")}).code == 0);

  // a point over the cap is reported and the run continues
  const auto r = run_cli({"sweep", "--param", "beta", "--values", "1", "--lattice", chain(14), "--out", path("sc.csv")});
  CHECK(r.code == 2);
  CHECK(read_file(path("sc.csv")).find("resource") != std::string::npos);
}

TEST_CASE("identical configurations give identical bytes") {
  for (int k = 0; k < 2; ++k) {
    REQUIRE(run_cli({"spin-sim", "--lattice", chain(4), "--beta", "0.5", "--out", path("d" + std::to_string(k) + ".csv"),
                 "--bound-out", path("db" + std::to_string(k) + ".csv")}).code == 0);
  }
  CHECK(read_file(path("d0.csv")) == read_file(path("d1.csv")));
  CHECK(read_file(path("db0.csv")) == read_file(path("db1.csv")));
}

}
