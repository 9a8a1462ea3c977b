#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "entbound/eigensolver.hpp"
#include "entbound/lattice.hpp"

namespace entbound {

/// Size limits for spin exact diagonalisation.
struct SpinCaps {
  std::size_t sparse_max_sites = 20;
  std::size_t dense_max_sites = 12;
};

/// H = J sum_alpha sum_<i,j> sigma_i^alpha sigma_j^alpha in the real z-basis.
/// Basis index bit (M-1-i) holds site i; a zero bit is spin up.
struct SpinHamiltonian {
  SparseMatrix matrix;
  double coupling = 0.0;
  Lattice lattice;

  std::size_t sites() const { return lattice.size(); }
};

SpinHamiltonian build_heisenberg(const Lattice& lattice, double coupling,
                                 const SpinCaps& caps = {});

/// Either a pure state vector or a density matrix on 2^M amplitudes.
class SpinState {
 public:
  static SpinState pure(Eigen::VectorXcd amplitudes);
  static SpinState mixed(Eigen::MatrixXcd density);

  std::size_t sites() const { return sites_; }
  Eigen::Index dimension() const;
  bool is_pure() const { return std::holds_alternative<Eigen::VectorXcd>(data_); }
  const Eigen::VectorXcd& amplitudes() const { return std::get<Eigen::VectorXcd>(data_); }
  const Eigen::MatrixXcd& density() const { return std::get<Eigen::MatrixXcd>(data_); }
  /// Materialised density matrix (copies for pure states).
  Eigen::MatrixXcd density_matrix() const;

  double trace() const;
  double purity() const;
  /// Checks unit trace, positivity, and normalisation to `tolerance`.
  void validate(double tolerance = 1e-10) const;

  std::optional<double> beta;

 private:
  explicit SpinState(std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data);

  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data_;
  std::size_t sites_ = 0;
};

/// rho = exp(-beta H) / Z from the full spectrum.
SpinState thermal_state(const SpinHamiltonian& h, double beta, const SpinCaps& caps = {});

struct SpinGroundState {
  SpinState state;
  double energy = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

SpinGroundState ground_state(const SpinHamiltonian& h, const GroundStateOptions& options = {},
                             const SpinCaps& caps = {});

enum class Axis { x = 0, y = 1, z = 2 };
inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};
char axis_name(Axis a);

/// <sigma_i^a sigma_j^a> and <sigma_i^a> for a in {x, y, z}.
struct CorrelatorSet {
  std::array<Eigen::MatrixXd, 3> pair;   // pair[a](i, j)
  std::array<Eigen::VectorXd, 3> bloch;  // bloch[a](i)

  std::size_t sites() const { return static_cast<std::size_t>(pair[0].rows()); }
  void validate(double tolerance = 1e-10) const;
};

CorrelatorSet correlators(const SpinState& state);

struct StructureFactorValue {
  double total = 0.0;
  std::array<double, 3> components{};
};

/// S(q) = (1/M) sum_{i,j,a} exp(i q.(r_i - r_j)) C_a(i, j). Throws
/// Error(numeric) when the imaginary part exceeds the residue tolerance.
StructureFactorValue structure_factor(const CorrelatorSet& corr, const Lattice& lattice,
                                      const Vec3& q);

struct StructureFactorGrid {
  int dimension = 1;
  std::vector<Vec3> q;
  std::vector<double> s;
  /// Per-axis components; empty when unavailable (e.g. measured data).
  std::vector<std::array<double, 3>> components;
};

StructureFactorGrid structure_factor_grid(const CorrelatorSet& corr, const Lattice& lattice,
                                          const QGrid& grid);

/// <H> from nearest-neighbour correlators: J sum_<i,j> sum_a C_a(i, j).
double heisenberg_energy(const CorrelatorSet& corr, const Lattice& lattice, double coupling);

}  // namespace entbound
