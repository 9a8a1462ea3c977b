#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>

#include <Eigen/Dense>
#include <json.hpp>

#include "entbound/datasets.hpp"
#include "entbound/lattice.hpp"

namespace entbound {

struct OneBodyDM;

enum class UnitMode { si, natural };

inline constexpr double kHbarSI = 1.054571817e-34;  // J s

/// Optional detector geometry, needed for images that carry no coordinates
/// (binary grids).
struct DetectorGrid {
  std::pair<double, double> x_range{0.0, 0.0};
  std::pair<double, double> y_range{0.0, 0.0};
  bool k_space = false;
};

struct TofCalibration {
  UnitMode units = UnitMode::natural;
  double mass = 1.0;
  double flight_time = 1.0;
  double wannier_width = 0.2;  // real-space Gaussian width sigma_w
  bool far_field = false;
  std::optional<double> mean_atom_number;
  LatticeSpec lattice;
  std::optional<DetectorGrid> detector;

  double hbar() const { return units == UnitMode::si ? kHbarSI : 1.0; }
  /// m / (hbar t): converts detector position to momentum, k = kappa * r.
  double kappa() const { return mass / (hbar() * flight_time); }
  void validate() const;
};

TofCalibration calibration_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TofCalibration& calib);

enum class KernelMethod {
  automatic,   // analytic for planar lattices, quadrature otherwise
  analytic,
  quadrature,
};

/// |w(k)|^2 = 8 pi^{3/2} sigma^3 exp(-sigma^2 |k|^2), so that
/// integral d^3k |w(k)|^2 / (2 pi)^3 = 1.
double wannier_sq(const Vec3& k, const TofCalibration& calib);

/// f(x, y) = f_ii(x, y), identical for all sites.
double tof_envelope(double x, double y, const TofCalibration& calib);

/// f_ij(x, y): z-integrated time-of-flight kernel.
std::complex<double> tof_kernel(std::size_t i, std::size_t j, double x, double y,
                                const Lattice& lattice, const TofCalibration& calib,
                                KernelMethod method = KernelMethod::automatic);

/// f_ij(x, y) / f(x, y); exactly 1 for i == j.
std::complex<double> tof_phase(std::size_t i, std::size_t j, double x, double y,
                               const Lattice& lattice, const TofCalibration& calib,
                               KernelMethod method = KernelMethod::automatic);

struct TofDensityValue {
  double n = 0.0;          // sum_ij f_ij G_ij
  double f = 0.0;          // envelope f(x, y)
  double n_over_f = 0.0;   // sum_ij (f_ij / f) G_ij, free of the division
};

/// Column density at a detector position. Throws Error(numeric) when the
/// imaginary residue exceeds 1e-9 of the scale f * sum|G_ij|.
TofDensityValue tof_density_point(const OneBodyDM& g, double x, double y, const Lattice& lattice,
                                  const TofCalibration& calib,
                                  KernelMethod method = KernelMethod::automatic);

double tof_density(const OneBodyDM& g, double x, double y, const Lattice& lattice,
                   const TofCalibration& calib, KernelMethod method = KernelMethod::automatic);

/// Transverse momentum (kx, ky) to detector position (x, y).
std::pair<double, double> position_from_k(double kx, double ky, const TofCalibration& calib);

/// Integral of f(x, y) over the detector plane; (2 pi)^3 in every unit mode.
double envelope_integral();

/// Detector used when the calibration names none: k in [-pi/a, pi/a] on both axes.
DetectorGrid default_detector(const TofCalibration& calib);

/// Renders n on an nx-by-ny detector grid. Pixel coordinates follow
/// grid.k_space; mean_atom_number is set to tr G.
TofImage simulate_tof_image(const OneBodyDM& g, const Lattice& lattice,
                            const TofCalibration& calib, const DetectorGrid& grid,
                            std::size_t nx, std::size_t ny,
                            KernelMethod method = KernelMethod::automatic);

}  // namespace entbound
