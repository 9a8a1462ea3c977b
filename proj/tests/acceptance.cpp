// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "entbound/bound_engine.hpp"
#include "entbound/boson_sim.hpp"
#include "entbound/io.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/tof_model.hpp"
#include "entbound/witness_oracle.hpp"
#include "fixtures.hpp"

using namespace entbound;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Lattice chain(int m) { return build_lattice({LatticeKind::chain, {m}, 1.0, Boundary::open}); }

TofCalibration chain_calibration(int m, bool far_field) {
  TofCalibration c;
  c.lattice = {LatticeKind::chain, {m}, 1.0, Boundary::open};
  c.far_field = far_field;
  return c;
}

// 1 ---------------------------------------------------------------------------
Outcome singlet_saturation() {
  const auto lat = chain(2);
  const auto gs = ground_state(build_heisenberg(lat, 1.0));
  const double e = spin_bound(structure_factor(correlators(gs.state), lat, {0, 0, 0}).total);
  return {std::abs(e - 1.0) <= 1e-12, "E(0) = " + format_double(e)};
}

// 2 ---------------------------------------------------------------------------
Outcome spin_witness_soundness() {
  const auto lat = chain(6);
  const auto r = check_spin_witness(lat, q_grid(lat, {16}).points, 1000, 2024);
  // raw bound value = -(witness expectation), so max raw = -margin
  const double max_raw = -r.margin;
  return {max_raw <= 1e-9 && r.consistency_error <= 1e-9 && r.samples == 1000,
          "max raw " + fmt(max_raw) + ", dual-path error " + fmt(r.consistency_error)};
}

// 3 ---------------------------------------------------------------------------
Outcome uncertainty_relation() {
  const auto r = check_uncertainty(10000, 2024);
  return {r.pass && r.samples == 10000 && r.tolerance <= 1e-12,
          "min sum - 2 = " + fmt(r.margin) + (r.note.empty() ? "" : ", " + r.note)};
}

// 4 ---------------------------------------------------------------------------
Outcome heisenberg_regression() {
  bool ok = true;
  std::string detail;
  {
    const auto lat = chain(4);
    const auto gs = ground_state(build_heisenberg(lat, 1.0));
    const double s = structure_factor(correlators(gs.state), lat, {pi, 0, 0}).total;
    const double dev_e = std::abs(spin_bound(s) - std::max(0.0, fixtures::kChain4RawPi));
    const double dev_raw = std::abs(spin_bound_raw(s) - fixtures::kChain4RawPi);
    ok = ok && dev_e <= 1e-10 && dev_raw <= 1e-10 && std::abs(gs.energy - fixtures::kChain4GroundEnergy) <= 1e-10;
    detail += "4-site E(pi) dev " + fmt(dev_e) + ", raw dev " + fmt(dev_raw);
  }
  {
    const auto lat = chain(8);
    const auto h = build_heisenberg(lat, 1.0);
    std::vector<double> e_pi, e_zero;
    double worst = 0.0;
    for (std::size_t k = 0; k < fixtures::kChain8Betas.size(); ++k) {
      const auto corr = correlators(thermal_state(h, fixtures::kChain8Betas[k]));
      const double s_pi = structure_factor(corr, lat, {pi, 0, 0}).total;
      const double s_zero = structure_factor(corr, lat, {0, 0, 0}).total;
      worst = std::max({worst, std::abs(s_pi - fixtures::kChain8SPi[k]), std::abs(s_zero - fixtures::kChain8SZero[k])});
      e_pi.push_back(spin_bound(s_pi));
      e_zero.push_back(spin_bound(s_zero));
    }
    // betas are listed in increasing temperature
    bool trend = true;
    for (std::size_t k = 1; k < e_pi.size(); ++k) {
      trend = trend && e_pi[k] <= e_pi[k - 1] && e_zero[k] <= e_zero[k - 1];
    }
    ok = ok && trend && worst <= 1e-10;
    detail += "; 8-site E(pi) = [";
    for (std::size_t k = 0; k < e_pi.size(); ++k) detail += (k ? " " : "") + fmt(e_pi[k]);
    detail += "], E(0) = [";
    for (std::size_t k = 0; k < e_zero.size(); ++k) detail += (k ? " " : "") + fmt(e_zero[k]);
    detail += "] non-increasing in T, S fixture dev " + fmt(worst);
  }
  return {ok, detail};
}

// 5 ---------------------------------------------------------------------------
Outcome mott_null() {
  const auto calib = chain_calibration(4, false);
  const auto lat = build_lattice(calib.lattice);
  const auto h = build_bose_hubbard(lat, {0.0, 1.0, 0.0}, 4);
  const auto g = one_body_dm(ground_state_sector(h, 4).state);
  const auto image = simulate_tof_image(g, lat, calib, default_detector(calib), 41, 41);
  const auto map = boson_bound_map(image, calib);
  std::size_t nonzero = 0, unmasked = 0;
  for (const auto& p : map.points) {
    if (p.mask != MaskReason::ok) continue;
    ++unmasked;
    if (*p.value != 0.0) ++nonzero;
  }
  return {nonzero == 0 && unmasked > 0,
          std::to_string(unmasked) + " unmasked pixels, " + std::to_string(nonzero) + " with E != 0"};
}

// 6 ---------------------------------------------------------------------------
Outcome delocalized_saturation() {
  const int m = 4;
  const auto calib = chain_calibration(m, true);
  const auto lat = build_lattice(calib.lattice);
  const auto h = build_bose_hubbard(lat, {1.0, 1.0, 0.0}, 1);
  const auto g = one_body_dm(ground_state_sector(h, 1).state);
  const auto detector = default_detector(calib);
  const auto image = simulate_tof_image(g, lat, calib, detector, 33, 5);
  const auto map = boson_bound_map(image, calib);
  const auto best = map.argmax();
  if (!best) return {false, "no unmasked pixel"};
  const double e_max = *map.points[*best].value;

  // analytic: psi_j ~ sin(pi (j+1)/(M+1)), E(k) = 1 - |sum_j psi_j e^{i k j}|^2
  double norm = 0.0;
  for (int j = 0; j < m; ++j) norm += std::pow(std::sin(pi * (j + 1) / (m + 1)), 2);
  double analytic = 0.0;
  for (double kx : image.xs) {
    std::complex<double> amp = 0.0;
    for (int j = 0; j < m; ++j) amp += std::sin(pi * (j + 1) / (m + 1)) / std::sqrt(norm) * std::polar(1.0, kx * j);
    analytic = std::max(analytic, 1.0 - std::norm(amp));
  }
  return {std::abs(e_max - 1.0) <= 1e-8 && std::abs(e_max - analytic) <= 1e-8,
          "max E = " + format_double(e_max) + " at kx = " + fmt(map.points[*best].coords[0]) +
              ", analytic " + format_double(analytic)};
}

// 7 ---------------------------------------------------------------------------
Outcome sector_witness_bounds() {
  TofCalibration calib = chain_calibration(1, false);
  const auto points = default_detector_points(calib);
  SectorCheckOptions options;
  options.separable_samples = 500;
  options.seed = 2024;
  const auto r = check_sector_witness_eigs(4, 3, points, calib, options);
  return {r.pass && points.size() == 16,
          "min margin " + fmt(r.margin) + ", max separable coherence " + fmt(r.consistency_error)};
}

// 8 ---------------------------------------------------------------------------
Outcome bsa_consistency() {
  const auto lat = chain(2);
  const auto r = check_bsa_consistency(200, 4, q_grid(lat, {16}).points, 2024);
  return {r.pass && r.samples == 200 && r.tolerance <= 1e-6,
          "min (upper - E) = " + fmt(r.margin) + (r.note.empty() ? "" : ", " + r.note)};
}

// 9 ---------------------------------------------------------------------------
std::vector<std::vector<std::string>> read_csv_rows(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

Outcome hopping_trend() {
  const auto calib_path = fixtures::scratch("acceptance_calib.json");
  write_file_atomic(calib_path, to_json(chain_calibration(4, false)).dump());
  const auto out = fixtures::scratch("acceptance_sweep.csv").string();
  std::string values;
  std::vector<double> ratios;
  for (int k = 1; k <= 10; ++k) {
    ratios.push_back(0.005 * k);
    values += (k > 1 ? "," : "") + format_double(0.005 * k);
  }
  std::ostringstream sink_out, sink_err;
  const int code = cli::run({"sweep", "--model", "boson", "--param", "J", "--values", values, "--U", "1",
                             "--N", "4", "--ground", "--calib", calib_path.string(), "--pixels", "33",
                             "--out", out},
                            sink_out, sink_err);
  if (code != 0) return {false, "sweep exited with " + std::to_string(code) + ": " + sink_err.str()};
  const auto rows = read_csv_rows(out);
  if (rows.size() != ratios.size()) return {false, "sweep produced " + std::to_string(rows.size()) + " rows"};
  std::vector<double> e;
  for (const auto& r : rows) {
    if (r.size() != 7 || r[6] != "ok") return {false, "sweep row failed"};
    e.push_back(std::stod(r[5]));
  }
  bool monotone = true;
  for (std::size_t k = 1; k < e.size(); ++k) monotone = monotone && e[k] >= e[k - 1];

  const double n = static_cast<double>(e.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    sx += ratios[k];
    sy += e[k];
    sxx += ratios[k] * ratios[k];
    sxy += ratios[k] * e[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    ss_res += std::pow(e[k] - (slope * ratios[k] + icpt), 2);
    ss_tot += std::pow(e[k] - sy / n, 2);
  }
  const double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return {monotone && r2 > 0.95, "E from " + fmt(e.front()) + " to " + fmt(e.back()) + ", slope " + fmt(slope) +
                                     ", R^2 = " + format_double(r2)};
}

// 10 --------------------------------------------------------------------------
Outcome io_determinism() {
  std::vector<std::string> failures;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };

  // library round trips
  const auto lat = chain(4);
  const auto corr = correlators(thermal_state(build_heisenberg(lat, 1.0), 0.8));
  const auto grid = structure_factor_grid(corr, lat, q_grid(lat, {17}));
  const auto sq_text = format_sq_csv(to_dataset(grid, {"round trip"}));
  {
    std::istringstream in(sq_text);
    expect(format_sq_csv(parse_sq_csv(in)) == sq_text, "S(q) CSV");
  }
  auto map = spin_bound_map(grid);
  map.comments = {"round trip"};
  const auto map_text = format_bound_map(map);
  {
    std::istringstream in(map_text);
    expect(format_bound_map(parse_bound_map(in)) == map_text, "spin bound map");
  }
  const auto corr_text = format_correlators_csv(corr);
  {
    std::istringstream in(corr_text);
    expect(format_correlators_csv(parse_correlators_csv(in)) == corr_text, "correlator CSV");
  }
  const auto calib = [] {
    auto c = chain_calibration(4, false);
    c.detector = default_detector(c);
    return c;
  }();
  const auto blat = build_lattice(calib.lattice);
  const auto g = one_body_dm(thermal_state_sector(build_bose_hubbard(blat, {1.0, 1.0, 0.0}, 3), 1.0));
  const auto image = simulate_tof_image(g, blat, calib, *calib.detector, 9, 9);
  const auto tof_text = format_tof_csv(image);
  {
    std::istringstream in(tof_text);
    expect(format_tof_csv(parse_tof_csv(in, calib)) == tof_text, "TOF CSV");
  }
  const auto tof_bytes = encode_tof_binary(image);
  expect(encode_tof_binary(decode_tof_binary(tof_bytes, calib)) == tof_bytes, "TOF binary");
  const auto bmap_text = format_bound_map(boson_bound_map(image, calib));
  {
    std::istringstream in(bmap_text);
    expect(format_bound_map(parse_bound_map(in)) == bmap_text, "boson bound map");
  }
  const auto g_text = format_one_body_csv(g);
  {
    std::istringstream in(g_text);
    expect(format_one_body_csv(parse_one_body_csv(in)) == g_text, "one-body CSV");
  }

  // identical CLI runs give identical bytes
  const auto lattice_path = fixtures::scratch("acceptance_chain4.json").string();
  write_file_atomic(lattice_path, to_json(lat.spec()).dump());
  const auto calib_path = fixtures::scratch("acceptance_calib_det.json").string();
  write_file_atomic(calib_path, to_json(calib).dump());
  auto twice = [&](const std::string& name, std::vector<std::string> args, const std::string& flag) {
    std::string first;
    for (int k = 0; k < 2; ++k) {
      const auto out = fixtures::scratch("acceptance_" + name + std::to_string(k)).string();
      auto a = args;
      a.push_back(flag);
      a.push_back(out);
      std::ostringstream o, e;
      if (cli::run(a, o, e) != 0) {
        failures.push_back(name + " run failed: " + e.str());
        return;
      }
      const auto bytes = read_file(out);
      if (k == 0) first = bytes;
      expect(bytes == first, name + " bytes differ");
    }
  };
  twice("spin_sim", {"spin-sim", "--lattice", lattice_path, "--beta", "0.7", "--q-res", "16"}, "--out");
  twice("boson_sim", {"boson-sim", "--calib", calib_path, "--N", "3", "--beta", "1", "--pixels", "9"}, "--out");
  twice("witness", {"validate", "--suite", "spin-witness", "--samples", "200", "--seed", "11"}, "--out");
  twice("sectors", {"validate", "--suite", "sector-eigs", "--samples", "20", "--seed", "11"}, "--out");
  twice("bsa", {"validate", "--suite", "bsa", "--samples", "10", "--seed", "11"}, "--out");

  std::string detail = failures.empty() ? "7 formats byte-stable, 5 CLI runs byte-identical" : "failed:";
  for (const auto& f : failures) detail += " " + f + ";";
  return {failures.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "singlet saturation", 1.0, singlet_saturation},
      {2, "spin witness soundness", 30.0, spin_witness_soundness},
      {3, "uncertainty relation", 5.0, uncertainty_relation},
      {4, "Heisenberg regression", 120.0, heisenberg_regression},
      {5, "Mott null", 10.0, mott_null},
      {6, "delocalized-particle saturation", 10.0, delocalized_saturation},
      {7, "sector witness bounds", 120.0, sector_witness_bounds},
      {8, "BSA consistency", 300.0, bsa_consistency},
      {9, "hopping trend", 300.0, hopping_trend},
      {10, "I/O round trips and determinism", 120.0, io_determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] criterion %d (%s): %s; %.2f s of %.0f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                outcome.detail.c_str(), seconds, c.budget_seconds, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
