#include "entbound/tof_model.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "entbound/boson_sim.hpp"
#include "entbound/error.hpp"
#include "entbound/parallel.hpp"

namespace entbound {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

double wannier_norm(double sigma) { return 8.0 * std::pow(kPi, 1.5) * sigma * sigma * sigma; }

double quadratic_phase(std::size_t i, std::size_t j, const Lattice& lattice,
                       const TofCalibration& calib) {
  if (calib.far_field) return 0.0;
  const auto& ri = lattice.position(i);
  const auto& rj = lattice.position(j);
  return 0.5 * calib.kappa() * (dot(rj, rj) - dot(ri, ri));
}

/// Gaussian w admits the z-integral in closed form:
/// int dz exp(-s^2 k^2 z^2 + i k z dz) = sqrt(pi)/(s k) exp(-dz^2 / (4 s^2)).
cplx analytic_kernel(std::size_t i, std::size_t j, double x, double y, const Lattice& lattice,
                     const TofCalibration& calib) {
  const double f = tof_envelope(x, y, calib);
  if (i == j) return f;
  const auto& ri = lattice.position(i);
  const auto& rj = lattice.position(j);
  const double kappa = calib.kappa();
  const double sigma = calib.wannier_width;
  const double dz = ri[2] - rj[2];
  const double phase =
      kappa * (x * (ri[0] - rj[0]) + y * (ri[1] - rj[1])) + quadratic_phase(i, j, lattice, calib);
  return f * std::exp(-dz * dz / (4.0 * sigma * sigma)) * std::polar(1.0, phase);
}

cplx quadrature_kernel(std::size_t i, std::size_t j, double x, double y, const Lattice& lattice,
                       const TofCalibration& calib) {
  const auto& ri = lattice.position(i);
  const auto& rj = lattice.position(j);
  const double kappa = calib.kappa();
  const double k3 = kappa * kappa * kappa;
  const double quad = quadratic_phase(i, j, lattice, calib);
  const Vec3 dr{ri[0] - rj[0], ri[1] - rj[1], ri[2] - rj[2]};

  auto integrand = [&](double z) {
    const Vec3 k{kappa * x, kappa * y, kappa * z};
    return k3 * wannier_sq(k, calib) * std::polar(1.0, dot(k, dr) + quad);
  };
  // the envelope exp(-sigma^2 kappa^2 z^2) is below 1e-27 outside |z| = 8/(sigma kappa)
  const double half_width = 8.0 / (calib.wannier_width * kappa);
  // scale of the z-integral of the envelope, used as the absolute error reference
  const double scale = std::abs(integrand(0.0)) * std::sqrt(kPi) / (calib.wannier_width * kappa);

  using boost::math::quadrature::gauss_kronrod;
  double err_re = 0.0;
  double err_im = 0.0;
  constexpr double rel_tol = 1e-8;
  const double re = gauss_kronrod<double, 31>::integrate(
      [&](double z) { return integrand(z).real(); }, -half_width, half_width, 20, rel_tol, &err_re);
  const double im = gauss_kronrod<double, 31>::integrate(
      [&](double z) { return integrand(z).imag(); }, -half_width, half_width, 20, rel_tol, &err_im);
  if (scale > 0.0 && (err_re > rel_tol * scale || err_im > rel_tol * scale)) {
    throw Error(ErrorCode::numeric, "time-of-flight quadrature did not converge (error " +
                                        std::to_string(std::max(err_re, err_im) / scale) + ")");
  }
  return {re, im};
}

KernelMethod resolve(KernelMethod method, const Lattice& lattice) {
  if (method != KernelMethod::automatic) return method;
  return lattice.planar() ? KernelMethod::analytic : KernelMethod::quadrature;
}

}  // namespace

void TofCalibration::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(mass) || !positive(flight_time) || !positive(wannier_width)) {
    throw Error(ErrorCode::invalid_argument,
                "calibration mass, flight_time and wannier_width must be positive");
  }
  if (mean_atom_number && !(*mean_atom_number >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "mean_atom_number must be non-negative");
  }
  lattice.validate();
}

TofCalibration calibration_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::format, "calibration JSON must be an object");
  static const std::set<std::string> known{"units", "mass", "flight_time", "wannier_width",
                                           "far_field", "mean_atom_number", "lattice", "detector"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::format, "unknown calibration field '" + key + "'");
  }
  for (const char* key : {"units", "mass", "flight_time", "wannier_width", "far_field", "lattice"}) {
    if (!j.contains(key)) {
      throw Error(ErrorCode::format, std::string("calibration JSON missing '") + key + "'");
    }
  }
  TofCalibration c;
  try {
    const auto units = j.at("units").get<std::string>();
    if (units == "SI") c.units = UnitMode::si;
    else if (units == "natural") c.units = UnitMode::natural;
    else throw Error(ErrorCode::format, "unknown unit mode '" + units + "'");
    c.mass = j.at("mass").get<double>();
    c.flight_time = j.at("flight_time").get<double>();
    c.wannier_width = j.at("wannier_width").get<double>();
    c.far_field = j.at("far_field").get<bool>();
    if (j.contains("mean_atom_number") && !j.at("mean_atom_number").is_null()) {
      c.mean_atom_number = j.at("mean_atom_number").get<double>();
    }
    c.lattice = lattice_spec_from_json(j.at("lattice"));
    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      DetectorGrid grid;
      const auto xr = d.at("x_range").get<std::vector<double>>();
      const auto yr = d.at("y_range").get<std::vector<double>>();
      if (xr.size() != 2 || yr.size() != 2) {
        throw Error(ErrorCode::format, "detector ranges need two entries");
      }
      grid.x_range = {xr[0], xr[1]};
      grid.y_range = {yr[0], yr[1]};
      grid.k_space = d.value("k_space", false);
      c.detector = grid;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("calibration JSON: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const TofCalibration& c) {
  nlohmann::json j{{"units", c.units == UnitMode::si ? "SI" : "natural"},
                   {"mass", c.mass},
                   {"flight_time", c.flight_time},
                   {"wannier_width", c.wannier_width},
                   {"far_field", c.far_field},
                   {"lattice", to_json(c.lattice)}};
  if (c.mean_atom_number) j["mean_atom_number"] = *c.mean_atom_number;
  if (c.detector) {
    j["detector"] = {{"x_range", {c.detector->x_range.first, c.detector->x_range.second}},
                     {"y_range", {c.detector->y_range.first, c.detector->y_range.second}},
                     {"k_space", c.detector->k_space}};
  }
  return j;
}

double wannier_sq(const Vec3& k, const TofCalibration& calib) {
  const double s = calib.wannier_width;
  return wannier_norm(s) * std::exp(-s * s * dot(k, k));
}

double tof_envelope(double x, double y, const TofCalibration& calib) {
  const double kappa = calib.kappa();
  const double s = calib.wannier_width;
  const double kt2 = kappa * kappa * (x * x + y * y);
  // kappa^3 |w(k_perp)|^2 * sqrt(pi) / (sigma kappa)
  return kappa * kappa * wannier_norm(s) * std::exp(-s * s * kt2) * std::sqrt(kPi) / s;
}

std::complex<double> tof_kernel(std::size_t i, std::size_t j, double x, double y,
                                const Lattice& lattice, const TofCalibration& calib,
                                KernelMethod method) {
  if (i >= lattice.size() || j >= lattice.size()) {
    throw Error(ErrorCode::invalid_argument, "site index outside the lattice");
  }
  if (resolve(method, lattice) == KernelMethod::analytic) {
    return analytic_kernel(i, j, x, y, lattice, calib);
  }
  return quadrature_kernel(i, j, x, y, lattice, calib);
}

std::complex<double> tof_phase(std::size_t i, std::size_t j, double x, double y,
                               const Lattice& lattice, const TofCalibration& calib,
                               KernelMethod method) {
  if (i == j) return 1.0;
  if (resolve(method, lattice) == KernelMethod::analytic) {
    const auto& ri = lattice.position(i);
    const auto& rj = lattice.position(j);
    const double dz = ri[2] - rj[2];
    const double s = calib.wannier_width;
    const double phase = calib.kappa() * (x * (ri[0] - rj[0]) + y * (ri[1] - rj[1])) +
                         quadratic_phase(i, j, lattice, calib);
    return std::exp(-dz * dz / (4.0 * s * s)) * std::polar(1.0, phase);
  }
  const cplx fij = quadrature_kernel(i, j, x, y, lattice, calib);
  const double f = quadrature_kernel(i, i, x, y, lattice, calib).real();
  return fij / f;
}

TofDensityValue tof_density_point(const OneBodyDM& g, double x, double y, const Lattice& lattice,
                                  const TofCalibration& calib, KernelMethod method) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  if (g.g.rows() != m || g.g.cols() != m) {
    throw Error(ErrorCode::invalid_argument, "one-body density matrix does not match the lattice");
  }
  cplx ratio = 0.0;
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const cplx gij = g.g(i, j);
      if (gij == 0.0) continue;
      ratio += tof_phase(static_cast<std::size_t>(i), static_cast<std::size_t>(j), x, y, lattice,
                         calib, method) *
               gij;
      scale += std::abs(gij);
    }
  }
  TofDensityValue out;
  out.f = tof_envelope(x, y, calib);
  if (std::abs(ratio.imag()) > 1e-9 * std::max(scale, 1e-300)) {
    throw Error(ErrorCode::numeric, "time-of-flight density has an imaginary residue of " +
                                        std::to_string(ratio.imag() / scale) +
                                        " (relative); G is not Hermitian");
  }
  out.n_over_f = ratio.real();
  out.n = out.f * out.n_over_f;
  return out;
}

double tof_density(const OneBodyDM& g, double x, double y, const Lattice& lattice,
                   const TofCalibration& calib, KernelMethod method) {
  return tof_density_point(g, x, y, lattice, calib, method).n;
}

std::pair<double, double> position_from_k(double kx, double ky, const TofCalibration& calib) {
  const double kappa = calib.kappa();
  return {kx / kappa, ky / kappa};
}

double envelope_integral() {
  // int dx dy f = int d^3k |w|^2
  return 8.0 * kPi * kPi * kPi;
}

DetectorGrid default_detector(const TofCalibration& calib) {
  const double edge = std::numbers::pi / calib.lattice.spacing;
  DetectorGrid grid;
  grid.x_range = {-edge, edge};
  grid.y_range = {-edge, edge};
  grid.k_space = true;
  return grid;
}

TofImage simulate_tof_image(const OneBodyDM& g, const Lattice& lattice,
                            const TofCalibration& calib, const DetectorGrid& grid,
                            std::size_t nx, std::size_t ny, KernelMethod method) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::invalid_argument, "detector needs at least one pixel");
  TofImage image;
  image.nx = nx;
  image.ny = ny;
  image.k_space = grid.k_space;
  image.xs = linspace(grid.x_range.first, grid.x_range.second, static_cast<int>(nx));
  image.ys = linspace(grid.y_range.first, grid.y_range.second, static_cast<int>(ny));
  image.values.assign(nx * ny, 0.0);
  image.mean_atom_number = g.mean_number;
  parallel_for(nx * ny, [&](std::size_t k) {
    double x = image.xs[k % nx];
    double y = image.ys[k / nx];
    if (grid.k_space) std::tie(x, y) = position_from_k(x, y, calib);
    image.values[k] = tof_density_point(g, x, y, lattice, calib, method).n;
  });
  return image;
}

}  // namespace entbound
