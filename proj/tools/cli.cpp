#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entbound/bound_engine.hpp"
#include "entbound/boson_sim.hpp"
#include "entbound/error.hpp"
#include "entbound/io.hpp"
#include "entbound/lattice.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/tof_model.hpp"
#include "entbound/witness_oracle.hpp"

namespace entbound::cli {

namespace {

using nlohmann::json;

struct SpinSimArgs {
  std::string lattice, out, bound_out, correlators_out;
  double coupling = 1.0;
  std::optional<double> beta;
  bool ground = false;
  std::vector<int> q_res{16};
  SpinCaps caps;
};

struct SpinBoundArgs {
  std::string in, out;
};

struct BosonModelArgs {
  std::string calib, lattice, units;
  double hopping = 1.0, interaction = 1.0, mu = 0.0;
  std::optional<int> particles, n_min, n_max;
  std::optional<double> beta;
  bool ground = false, far_field = false;
  std::vector<int> pixels{33};
  std::string method = "auto";
  BosonCaps caps;
};

struct BosonSimArgs {
  BosonModelArgs model;
  std::string out, calib_out, bound_out, one_body_out;
  double f_floor = 1e-6;
};

struct BosonBoundArgs {
  std::string image, calib, out, format = "auto", units;
  std::optional<double> mean_number;
  double f_floor = 1e-6;
};

struct ValidateArgs {
  std::string suite, out, lattice, calib;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  int max_sites = 4, max_particles = 3, effort = 4;
  std::vector<int> q_res{16};
};

struct SweepArgs {
  std::string model = "spin", param, out, lattice;
  std::string values;
  std::vector<double> q;
  std::vector<double> pixel;
  double coupling = 1.0;
  SpinCaps spin_caps;
  BosonModelArgs boson;
};

std::vector<int> broadcast(const std::vector<int>& res, int dimension) {
  if (res.size() == 1) return std::vector<int>(static_cast<std::size_t>(dimension), res[0]);
  if (static_cast<int>(res.size()) != dimension) {
    throw Error(ErrorCode::invalid_argument, "resolution needs 1 or " + std::to_string(dimension) + " values");
  }
  return res;
}

KernelMethod parse_method(const std::string& name) {
  if (name == "auto") return KernelMethod::automatic;
  if (name == "analytic") return KernelMethod::analytic;
  if (name == "quadrature") return KernelMethod::quadrature;
  throw Error(ErrorCode::invalid_argument, "unknown kernel method '" + name + "'");
}

void apply_units(TofCalibration& calib, const std::string& units) {
  if (units.empty()) return;
  if (units == "si" || units == "SI") {
    calib.units = UnitMode::si;
  } else if (units == "natural") {
    calib.units = UnitMode::natural;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown unit mode '" + units + "'");
  }
}

std::vector<std::string> config_comments(const json& config) {
  return {"config " + config.dump()};
}

void write_text(const std::string& path, const std::string& text) { write_file_atomic(path, text); }

json model_json(const BosonModelArgs& m) {
  json j{{"J", m.hopping}, {"U", m.interaction}, {"mu", m.mu}, {"ground", m.ground},
         {"far_field", m.far_field}, {"pixels", m.pixels}, {"method", m.method},
         {"calib", m.calib}, {"sector_max_dim", m.caps.sector_dim},
         {"dense_max_dim", m.caps.dense_dim}};
  if (!m.lattice.empty()) j["lattice"] = m.lattice;
  if (!m.units.empty()) j["units"] = m.units;
  if (m.beta) j["beta"] = *m.beta;
  if (m.particles) j["N"] = *m.particles;
  if (m.n_min) j["N_min"] = *m.n_min;
  if (m.n_max) j["N_max"] = *m.n_max;
  return j;
}

// Calibration with lattice override, unit override, far-field flag and detector resolved.
TofCalibration resolve_calibration(const BosonModelArgs& m) {
  TofCalibration calib = load_calibration(m.calib);
  if (!m.lattice.empty()) calib.lattice = load_lattice_spec(m.lattice);
  apply_units(calib, m.units);
  if (m.far_field) calib.far_field = true;
  if (!calib.detector) calib.detector = default_detector(calib);
  calib.validate();
  return calib;
}

BosonState boson_state(const BosonModelArgs& m, const Lattice& lattice) {
  BoseHubbardParams params{m.hopping, m.interaction, m.mu};
  if (m.ground == m.beta.has_value()) {
    throw Error(ErrorCode::invalid_argument, "give exactly one of --beta and --ground");
  }
  if (m.particles) {
    if (m.n_min || m.n_max) throw Error(ErrorCode::invalid_argument, "--N excludes --N-min/--N-max");
    const auto h = build_bose_hubbard(lattice, params, *m.particles, m.caps);
    if (m.ground) return ground_state_sector(h, *m.particles).state;
    return thermal_state_sector(h, *m.beta, m.caps);
  }
  if (!m.n_min || !m.n_max) throw Error(ErrorCode::invalid_argument, "give --N or both --N-min and --N-max");
  if (m.ground) throw Error(ErrorCode::invalid_argument, "--ground needs a fixed --N");
  const auto h = build_bose_hubbard(lattice, params, *m.n_min, *m.n_max, m.caps);
  return thermal_state_sector(h, *m.beta, m.caps);
}

TofImage render(const BosonModelArgs& m, const TofCalibration& calib, const OneBodyDM& g,
                const Lattice& lattice) {
  const auto px = broadcast(m.pixels, 2);
  if (px[0] < 1 || px[1] < 1) throw Error(ErrorCode::invalid_argument, "--pixels must be positive");
  return simulate_tof_image(g, lattice, calib, *calib.detector, static_cast<std::size_t>(px[0]),
                            static_cast<std::size_t>(px[1]), parse_method(m.method));
}

int report_map(const BoundMap& map, std::ostream& out, std::ostream& err) {
  if (map.all_masked()) {
    err << "error: every point of the bound map is masked\n";
    return kFailure;
  }
  if (const auto best = map.argmax()) {
    const auto& p = map.points[*best];
    out << "max E = " << format_double(*p.value) << " at (";
    for (std::size_t k = 0; k < p.coords.size(); ++k) out << (k ? ", " : "") << format_double(p.coords[k]);
    out << "), " << map.masked_count() << " of " << map.points.size() << " points masked\n";
  }
  return kSuccess;
}

// subcommands ----------------------------------------------------------------

int spin_sim(const SpinSimArgs& a, std::ostream& out, std::ostream& err) {
  if (a.ground == a.beta.has_value()) {
    throw Error(ErrorCode::invalid_argument, "give exactly one of --beta and --ground");
  }
  const auto spec = load_lattice_spec(a.lattice);
  const auto lattice = build_lattice(spec);
  json config{{"subcommand", "spin-sim"}, {"lattice", to_json(spec)}, {"J", a.coupling},
              {"q_res", a.q_res}, {"ground", a.ground},
              {"sparse_max_sites", a.caps.sparse_max_sites}, {"dense_max_sites", a.caps.dense_max_sites}};
  if (a.beta) config["beta"] = *a.beta;
  const auto comments = config_comments(config);

  const auto h = build_heisenberg(lattice, a.coupling, a.caps);
  std::optional<SpinState> state;
  if (a.ground) {
    auto gs = ground_state(h, {}, a.caps);
    if (gs.degenerate) err << "warning: ground state is degenerate; using one vector of the manifold\n";
    state = std::move(gs.state);
  } else {
    state = thermal_state(h, *a.beta, a.caps);
  }
  const auto corr = correlators(*state);
  const auto grid = structure_factor_grid(corr, lattice, q_grid(lattice, broadcast(a.q_res, lattice.dimension())));

  write_text(a.out, format_sq_csv(to_dataset(grid, comments)));
  out << "wrote " << grid.s.size() << " q-points to " << a.out << "\n";
  if (!a.correlators_out.empty()) write_text(a.correlators_out, format_correlators_csv(corr, comments));
  if (!a.bound_out.empty()) {
    auto map = spin_bound_map(grid);
    map.comments = comments;
    save_bound_map(map, a.bound_out);
    return report_map(map, out, err);
  }
  return kSuccess;
}

int spin_bound(const SpinBoundArgs& a, std::ostream& out, std::ostream& err) {
  const auto data = load_sq_csv(a.in);
  auto map = spin_bound_map(data);
  map.comments = data.comments;
  map.comments.push_back("config " + json{{"subcommand", "spin-bound"}, {"in", a.in}}.dump());
  save_bound_map(map, a.out);
  return report_map(map, out, err);
}

int boson_sim(const BosonSimArgs& a, std::ostream& out, std::ostream& err) {
  auto calib = resolve_calibration(a.model);
  const auto lattice = build_lattice(calib.lattice);
  json config = model_json(a.model);
  config["subcommand"] = "boson-sim";
  config["f_floor"] = a.f_floor;
  config["calibration"] = to_json(calib);
  const auto comments = config_comments(config);

  const auto state = boson_state(a.model, lattice);
  const auto g = one_body_dm(state);
  auto image = render(a.model, calib, g, lattice);
  image.comments = comments;
  save_tof(image, a.out);
  out << "wrote " << image.nx << "x" << image.ny << " image to " << a.out << "\n";

  calib.mean_atom_number = g.mean_number;
  if (!a.calib_out.empty()) write_text(a.calib_out, to_json(calib).dump(2) + "\n");
  if (!a.one_body_out.empty()) write_text(a.one_body_out, format_one_body_csv(g, comments));
  if (!a.bound_out.empty()) {
    BosonBoundOptions options;
    options.f_floor_relative = a.f_floor;
    auto map = boson_bound_map(image, calib, options);
    map.comments = comments;
    save_bound_map(map, a.bound_out);
    return report_map(map, out, err);
  }
  return kSuccess;
}

int boson_bound(const BosonBoundArgs& a, std::ostream& out, std::ostream& err) {
  auto calib = load_calibration(a.calib);
  apply_units(calib, a.units);
  calib.validate();
  TofFormat format = TofFormat::automatic;
  if (a.format == "csv") {
    format = TofFormat::csv;
  } else if (a.format == "binary") {
    format = TofFormat::binary;
  } else if (a.format != "auto") {
    throw Error(ErrorCode::invalid_argument, "unknown image format '" + a.format + "'");
  }
  const auto image = load_tof(a.image, calib, format);
  BosonBoundOptions options;
  options.f_floor_relative = a.f_floor;
  options.mean_number = a.mean_number;
  auto map = boson_bound_map(image, calib, options);
  const double mean = resolve_mean_number(image, calib, a.mean_number);
  if (const auto warning = tof_integral_warning(image, calib, mean); !warning.empty()) {
    err << "warning: " << warning << "\n";
  }

  json config{{"subcommand", "boson-bound"}, {"image", a.image}, {"calibration", to_json(calib)},
              {"f_floor", a.f_floor}, {"format", a.format}};
  if (a.mean_number) config["N"] = *a.mean_number;
  map.comments = image.comments;
  map.comments.push_back("config " + config.dump());
  save_bound_map(map, a.out);
  return report_map(map, out, err);
}

std::uint64_t require_seed(const ValidateArgs& a) {
  if (!a.seed) throw Error(ErrorCode::invalid_argument, "suite '" + a.suite + "' needs an explicit --seed");
  return *a.seed;
}

std::vector<Vec3> chain_q_list(const Lattice& lattice, int resolution) {
  return q_grid(lattice, broadcast({resolution}, lattice.dimension())).points;
}

int validate(const ValidateArgs& a, std::ostream& out, std::ostream&) {
  if (a.q_res.size() != 1) throw Error(ErrorCode::invalid_argument, "--q-res takes one value here");
  OracleReport report;
  json config{{"subcommand", "validate"}, {"suite", a.suite}, {"q_res", a.q_res}};
  if (a.seed) config["seed"] = *a.seed;
  if (a.samples) config["samples"] = *a.samples;

  if (a.suite == "spin-witness") {
    LatticeSpec spec{LatticeKind::chain, {6}, 1.0, Boundary::open};
    if (!a.lattice.empty()) spec = load_lattice_spec(a.lattice);
    const auto lattice = build_lattice(spec);
    config["lattice"] = to_json(spec);
    report = check_spin_witness(lattice, chain_q_list(lattice, a.q_res[0]), a.samples.value_or(1000),
                                require_seed(a));
  } else if (a.suite == "uncertainty") {
    report = check_uncertainty(a.samples.value_or(10000), require_seed(a));
  } else if (a.suite == "sector-eigs") {
    TofCalibration calib;
    if (!a.calib.empty()) calib = load_calibration(a.calib);
    SectorCheckOptions options;
    options.separable_samples = a.samples.value_or(0);
    if (options.separable_samples > 0) options.seed = require_seed(a);
    config["Mmax"] = a.max_sites;
    config["Nmax"] = a.max_particles;
    config["calibration"] = to_json(calib);
    report = check_sector_witness_eigs(a.max_sites, a.max_particles, default_detector_points(calib),
                                       calib, options);
    if (a.seed) report.seed = *a.seed;
  } else if (a.suite == "bsa") {
    const auto lattice = build_lattice(LatticeSpec{LatticeKind::chain, {2}, 1.0, Boundary::open});
    config["effort"] = a.effort;
    report = check_bsa_consistency(a.samples.value_or(200), a.effort,
                                   chain_q_list(lattice, a.q_res[0]), require_seed(a));
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown suite '" + a.suite + "'");
  }

  json doc = to_json(report);
  doc["format"] = kFormatVersion;
  doc["config"] = config;
  const auto text = doc.dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    write_text(a.out, text);
    out << report.suite << ": " << (report.pass ? "pass" : "FAIL") << " (margin "
        << format_double(report.margin) << ")\n";
  }
  return report.pass ? kSuccess : kFailure;
}

// sweep ----------------------------------------------------------------------

struct SweepRow {
  std::vector<double> coords;
  double observable = 0.0;
  double raw = 0.0;
};

SweepRow spin_point(const SweepArgs& a, const Lattice& lattice, double value) {
  double coupling = a.coupling;
  std::optional<double> beta = a.boson.beta;
  bool ground = a.boson.ground;
  if (a.param == "beta") {
    beta = value;
    ground = false;
  } else if (a.param == "J") {
    coupling = value;
  } else {
    throw Error(ErrorCode::invalid_argument, "spin sweeps take --param beta or J");
  }
  if (ground == beta.has_value()) throw Error(ErrorCode::invalid_argument, "give exactly one of --beta and --ground");
  const auto h = build_heisenberg(lattice, coupling, a.spin_caps);
  const auto state = ground ? ground_state(h, {}, a.spin_caps).state : thermal_state(h, *beta, a.spin_caps);
  Vec3 q{0.0, 0.0, 0.0};
  if (a.q.empty()) {
    for (int k = 0; k < lattice.dimension(); ++k) q[k] = std::numbers::pi / lattice.spacing();
  } else {
    if (a.q.size() > 3) throw Error(ErrorCode::invalid_argument, "--q takes at most 3 components");
    std::copy(a.q.begin(), a.q.end(), q.begin());
  }
  const double s = structure_factor(correlators(state), lattice, q).total;
  return {{q[0], q[1]}, s, spin_bound_raw(s)};
}

SweepRow boson_point(const SweepArgs& a, const TofCalibration& calib, const Lattice& lattice,
                     double value) {
  BosonModelArgs m = a.boson;
  if (a.param == "beta") {
    m.beta = value;
    m.ground = false;
  } else if (a.param == "J") {
    m.hopping = value;
  } else if (a.param == "U") {
    m.interaction = value;
  } else {
    throw Error(ErrorCode::invalid_argument, "boson sweeps take --param beta, J or U");
  }
  const auto g = one_body_dm(boson_state(m, lattice));
  if (!a.pixel.empty()) {
    if (a.pixel.size() != 2) throw Error(ErrorCode::invalid_argument, "--pixel takes two coordinates");
    double x = a.pixel[0], y = a.pixel[1];
    if (calib.detector->k_space) std::tie(x, y) = position_from_k(x, y, calib);
    const auto v = tof_density_point(g, x, y, lattice, calib, parse_method(m.method));
    return {{a.pixel[0], a.pixel[1]}, v.n_over_f, g.mean_number - v.n_over_f};
  }
  const auto image = render(m, calib, g, lattice);
  const auto map = boson_bound_map(image, calib);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < map.points.size(); ++k) {
    if (map.points[k].raw && (!best || *map.points[k].raw > *map.points[*best].raw)) best = k;
  }
  if (!best) throw Error(ErrorCode::validation, "every pixel is masked");
  const auto& p = map.points[*best];
  return {p.coords, g.mean_number - *p.raw, *p.raw};
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "--values entry '" + cell + "' is not a finite number");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "--values is empty");
  return values;
}

int sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto values = parse_values(a.values);
  if (a.param != "beta" && a.param != "J" && a.param != "U") {
    throw Error(ErrorCode::invalid_argument, "--param must be beta, J or U");
  }
  json config{{"subcommand", "sweep"}, {"model", a.model}, {"param", a.param}, {"values", values}};
  std::ostringstream csv;
  std::vector<std::string> errors;
  std::size_t ok = 0;
  auto emit = [&](double value, auto&& compute) {
    csv << format_double(value) << ",";
    try {
      const SweepRow row = compute(value);
      csv << format_double(row.coords[0]) << "," << format_double(row.coords[1]) << ","
          << format_double(row.observable) << "," << format_double(row.raw) << ","
          << format_double(std::max(0.0, row.raw)) << ",ok\n";
      ++ok;
    } catch (const Error& e) {
      csv << ",,,,," << sanitize(std::string(to_string(e.code())) + ": " + e.what()) << "\n";
      err << "warning: " << a.param << "=" << format_double(value) << ": " << e.what() << "\n";
    }
  };

  if (a.model == "spin") {
    if (a.lattice.empty()) throw Error(ErrorCode::invalid_argument, "spin sweeps need --lattice");
    const auto spec = load_lattice_spec(a.lattice);
    const auto lattice = build_lattice(spec);
    config["lattice"] = to_json(spec);
    config["J"] = a.coupling;
    if (a.boson.beta) config["beta"] = *a.boson.beta;
    config["ground"] = a.boson.ground;
    if (!a.q.empty()) config["q"] = a.q;
    csv << a.param << ",qx,qy,S,raw,E,status\n";
    for (double v : values) emit(v, [&](double x) { return spin_point(a, lattice, x); });
  } else if (a.model == "boson") {
    const auto calib = resolve_calibration(a.boson);
    const auto lattice = build_lattice(calib.lattice);
    config["boson"] = model_json(a.boson);
    config["calibration"] = to_json(calib);
    if (!a.pixel.empty()) config["pixel"] = a.pixel;
    csv << a.param << "," << (calib.detector->k_space ? "kx,ky" : "x,y") << ",n_over_f,raw,E,status\n";
    for (double v : values) emit(v, [&](double x) { return boson_point(a, calib, lattice, x); });
  } else {
    throw Error(ErrorCode::invalid_argument, "--model must be spin or boson");
  }

  std::ostringstream text;
  text << "# " << kFormatVersion << "\n# config " << config.dump() << "\n" << csv.str();
  write_text(a.out, text.str());
  out << "wrote " << values.size() << " sweep rows (" << ok << " ok) to " << a.out << "\n";
  return ok > 0 ? kSuccess : kUsage;
}

// option wiring ----------------------------------------------------------------

void add_spin_caps(CLI::App* cmd, SpinCaps& caps) {
  cmd->add_option("--sparse-max-sites", caps.sparse_max_sites, "site cap for sparse ground states")->capture_default_str();
  cmd->add_option("--dense-max-sites", caps.dense_max_sites, "site cap for dense thermal states")->capture_default_str();
}

void add_boson_model(CLI::App* cmd, BosonModelArgs& m, bool with_state) {
  cmd->add_option("--calib", m.calib, "calibration JSON")->required();
  cmd->add_option("--lattice", m.lattice, "lattice JSON overriding the calibration lattice");
  cmd->add_option("--units", m.units, "si or natural, overriding the calibration");
  cmd->add_option("--J", m.hopping, "hopping")->capture_default_str();
  cmd->add_option("--U", m.interaction, "on-site interaction")->capture_default_str();
  cmd->add_option("--mu", m.mu, "chemical potential")->capture_default_str();
  cmd->add_option("--N", m.particles, "particle number (canonical)");
  cmd->add_option("--N-min", m.n_min, "lowest sector (grand canonical)");
  cmd->add_option("--N-max", m.n_max, "highest sector (grand canonical)");
  if (with_state) {
    cmd->add_option("--beta", m.beta, "inverse temperature");
    cmd->add_flag("--ground", m.ground, "use the ground state");
  }
  cmd->add_flag("--far-field", m.far_field, "drop the quadratic phase");
  cmd->add_option("--pixels", m.pixels, "detector pixels, nx[,ny]")->delimiter(',')->expected(1, 2);
  cmd->add_option("--method", m.method, "kernel evaluation: auto, analytic, quadrature")->capture_default_str();
  cmd->add_option("--sector-max-dim", m.caps.sector_dim, "Fock sector size cap")->capture_default_str();
  cmd->add_option("--dense-max-dim", m.caps.dense_dim, "dense diagonalisation cap")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement bounds from structure factors and time-of-flight images", "entbound"};
  app.require_subcommand(1);

  SpinSimArgs spin_sim_args;
  auto* ss = app.add_subcommand("spin-sim", "simulate a Heisenberg lattice and write S(q)");
  ss->add_option("--lattice", spin_sim_args.lattice, "lattice JSON")->required();
  ss->add_option("--J", spin_sim_args.coupling, "exchange coupling")->capture_default_str();
  ss->add_option("--beta", spin_sim_args.beta, "inverse temperature");
  ss->add_flag("--ground", spin_sim_args.ground, "use the ground state");
  ss->add_option("--q-res", spin_sim_args.q_res, "q points per axis")->delimiter(',')->expected(1, 3);
  ss->add_option("--out", spin_sim_args.out, "S(q) CSV")->required();
  ss->add_option("--bound-out", spin_sim_args.bound_out, "bound map CSV");
  ss->add_option("--correlators-out", spin_sim_args.correlators_out, "correlator CSV");
  add_spin_caps(ss, spin_sim_args.caps);

  SpinBoundArgs spin_bound_args;
  auto* sb = app.add_subcommand("spin-bound", "bound entanglement from an S(q) CSV");
  sb->add_option("--in", spin_bound_args.in, "S(q) CSV")->required();
  sb->add_option("--out", spin_bound_args.out, "bound map CSV")->required();

  BosonSimArgs boson_sim_args;
  auto* bs = app.add_subcommand("boson-sim", "simulate a Bose-Hubbard lattice and write a TOF image");
  add_boson_model(bs, boson_sim_args.model, true);
  bs->add_option("--out", boson_sim_args.out, "image (.csv, or .bin/.entb for binary)")->required();
  bs->add_option("--calib-out", boson_sim_args.calib_out, "calibration echo JSON");
  bs->add_option("--bound-out", boson_sim_args.bound_out, "bound map CSV");
  bs->add_option("--one-body-out", boson_sim_args.one_body_out, "one-body density matrix CSV");
  bs->add_option("--f-floor", boson_sim_args.f_floor, "mask pixels with f below this fraction of max f")->capture_default_str();

  BosonBoundArgs boson_bound_args;
  auto* bb = app.add_subcommand("boson-bound", "bound entanglement from a TOF image");
  bb->add_option("--image", boson_bound_args.image, "image file")->required();
  bb->add_option("--calib", boson_bound_args.calib, "calibration JSON")->required();
  bb->add_option("--out", boson_bound_args.out, "bound map CSV")->required();
  bb->add_option("--format", boson_bound_args.format, "auto, csv or binary")->capture_default_str();
  bb->add_option("--units", boson_bound_args.units, "si or natural, overriding the calibration");
  bb->add_option("--N", boson_bound_args.mean_number, "mean atom number override");
  bb->add_option("--f-floor", boson_bound_args.f_floor, "mask pixels with f below this fraction of max f")->capture_default_str();

  ValidateArgs validate_args;
  auto* va = app.add_subcommand("validate", "run an oracle suite");
  va->add_option("--suite", validate_args.suite, "spin-witness, uncertainty, sector-eigs or bsa")->required();
  va->add_option("--seed", validate_args.seed, "RNG seed");
  va->add_option("--samples", validate_args.samples, "sample count");
  va->add_option("--out", validate_args.out, "report JSON (stdout when absent)");
  va->add_option("--lattice", validate_args.lattice, "lattice JSON (spin-witness)");
  va->add_option("--calib", validate_args.calib, "calibration JSON (sector-eigs)");
  va->add_option("--Mmax", validate_args.max_sites, "largest chain (sector-eigs)")->capture_default_str();
  va->add_option("--Nmax", validate_args.max_particles, "largest particle number (sector-eigs)")->capture_default_str();
  va->add_option("--effort", validate_args.effort, "BSA search effort")->capture_default_str();
  va->add_option("--q-res", validate_args.q_res, "q points per axis")->capture_default_str();

  SweepArgs sweep_args;
  auto* sw = app.add_subcommand("sweep", "scan beta, J or U and record E");
  sw->add_option("--model", sweep_args.model, "spin or boson")->capture_default_str();
  sw->add_option("--param", sweep_args.param, "beta, J or U")->required();
  sw->add_option("--values", sweep_args.values, "comma-separated values")->required();
  sw->add_option("--out", sweep_args.out, "sweep CSV")->required();
  sw->add_option("--lattice", sweep_args.lattice, "lattice JSON (spin)");
  sw->add_option("--q", sweep_args.q, "q vector for spin sweeps (default pi/a per axis)")->delimiter(',')->expected(1, 3);
  sw->add_option("--pixel", sweep_args.pixel, "detector pixel for boson sweeps (default deepest interference)")->delimiter(',')->expected(2);
  sw->add_option("--beta", sweep_args.boson.beta, "inverse temperature when not swept");
  sw->add_flag("--ground", sweep_args.boson.ground, "use ground states");
  sw->add_option("--coupling", sweep_args.coupling, "spin exchange when not swept")->capture_default_str();
  add_spin_caps(sw, sweep_args.spin_caps);
  sw->add_option("--calib", sweep_args.boson.calib, "calibration JSON (boson)");
  sw->add_option("--units", sweep_args.boson.units, "si or natural");
  sw->add_option("--J", sweep_args.boson.hopping, "hopping when not swept")->capture_default_str();
  sw->add_option("--U", sweep_args.boson.interaction, "interaction when not swept")->capture_default_str();
  sw->add_option("--mu", sweep_args.boson.mu, "chemical potential")->capture_default_str();
  sw->add_option("--N", sweep_args.boson.particles, "particle number");
  sw->add_option("--N-min", sweep_args.boson.n_min, "lowest sector (grand canonical)");
  sw->add_option("--N-max", sweep_args.boson.n_max, "highest sector (grand canonical)");
  sw->add_flag("--far-field", sweep_args.boson.far_field, "drop the quadratic phase");
  sw->add_option("--pixels", sweep_args.boson.pixels, "detector pixels, nx[,ny]")->delimiter(',')->expected(1, 2);
  sw->add_option("--method", sweep_args.boson.method, "kernel evaluation")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (ss->parsed()) return spin_sim(spin_sim_args, out, err);
    if (sb->parsed()) return spin_bound(spin_bound_args, out, err);
    if (bs->parsed()) return boson_sim(boson_sim_args, out, err);
    if (bb->parsed()) return boson_bound(boson_bound_args, out, err);
    if (va->parsed()) return validate(validate_args, out, err);
    if (sw->parsed()) {
      if (sweep_args.model == "boson" && sweep_args.boson.calib.empty()) {
        throw Error(ErrorCode::invalid_argument, "boson sweeps need --calib");
      }
      return sweep(sweep_args, out, err);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::numeric ? kFailure : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace entbound::cli
