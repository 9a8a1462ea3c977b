#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "entbound/boson_sim.hpp"
#include "entbound/lattice.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/tof_model.hpp"

namespace entbound {

/// Outcome of a brute-force inequality check. `margin` is the most negative
/// value of the checked quantity; the suite fails iff margin < -tolerance or
/// an internal consistency check failed.
struct OracleReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Largest disagreement between two independent evaluation routes (0 when
  /// the suite has a single route). Not part of the JSON record.
  double consistency_error = 0.0;
  std::string note;
};

nlohmann::json to_json(const OracleReport& report);

enum class Purity { pure, mixed };

struct ProductSpinSample {
  SpinState state;
  std::vector<std::array<double, 3>> bloch;
};

/// Tensor product of independent qubits. Pure mode draws Haar-random vectors,
/// mixed mode draws Bloch vectors uniformly from the ball. Site 0 is the
/// leftmost tensor factor, matching the spin-sim basis convention.
ProductSpinSample sample_product_spin_state(std::size_t sites, Purity purity, std::uint64_t seed,
                                            std::uint64_t stream = 0);

/// Witness expectation <S(q)/2 - 1> on random product states, evaluated both
/// from the state's correlators and from the product decomposition. Even
/// sample indices are pure, odd ones mixed.
OracleReport check_spin_witness(const Lattice& lattice, const std::vector<Vec3>& q_list,
                                std::size_t samples, std::uint64_t seed);

/// sum_a (1 - <sigma^a>^2) >= 2 on random qubit states; even samples pure,
/// odd samples mixed. Pure samples must give 2 within 1e-10.
OracleReport check_uncertainty(std::size_t samples, std::uint64_t seed);

/// Mixture sum_k p_k |n^k><n^k| of Fock products with definite local numbers.
BosonState ssr_separable_state(std::shared_ptr<const FockBasis> basis,
                               const std::vector<std::vector<int>>& compositions,
                               const std::vector<double>& weights);

BosonState sample_ssr_separable(int sites, int particles, std::size_t terms, std::uint64_t seed,
                                std::uint64_t stream = 0);

struct SectorWitness {
  std::shared_ptr<const FockBasis> basis;
  Eigen::MatrixXcd matrix;  // P_N (n(x,y)/f(x,y) - N) P_N
  double x = 0.0;
  double y = 0.0;
};

SectorWitness build_sector_witness(const Lattice& lattice, int particles, double x, double y,
                                   const TofCalibration& calib,
                                   KernelMethod method = KernelMethod::automatic);

struct SectorCheckOptions {
  /// SSR-separable states per (M, N) sector and detector point; requires a seed.
  std::size_t separable_samples = 0;
  std::size_t terms = 4;
  std::uint64_t seed = 0;
};

/// For chains of M <= max_sites sites (spacing from the calibration lattice)
/// and N <= max_particles: min eig(MN +- W_N) >= -1e-9 at every detector
/// point, and optionally tr[rho W_N] >= -1e-9 with vanishing one-body
/// coherences for sampled separable states.
OracleReport check_sector_witness_eigs(int max_sites, int max_particles,
                                       const std::vector<std::pair<double, double>>& points,
                                       const TofCalibration& calib,
                                       const SectorCheckOptions& options = {});

/// Default detector points: a 4 x 4 grid over transverse momenta
/// [-pi/a, pi/a]^2, converted to positions.
std::vector<std::pair<double, double>> default_detector_points(const TofCalibration& calib);

struct BsaResult {
  double upper = 1.0;           // certified upper bound on the entangled weight
  double separable_weight = 0;  // s_best
  std::vector<Eigen::Vector4cd> product_vectors;
  std::vector<double> weights;
};

/// Certified upper bound 1 - s on the best-separable-approximation weight of
/// a two-qubit state, from a greedy search over product-vector decompositions
/// rho = s rho_sep + (1 - s) tau. Every accepted step keeps
/// min eig(rho - s rho_sep) >= -1e-10. Runs with larger effort extend the
/// same search, so the bound never increases with effort.
BsaResult bsa_feasible_upper(const Eigen::Matrix4cd& rho, int effort, std::uint64_t seed);

/// Smallest eigenvalue of the partial transpose on the second qubit.
double partial_transpose_min_eig(const Eigen::Matrix4cd& rho);

/// Random two-qubit density matrix; `kind` cycles through full-rank Ginibre,
/// pure, product, and Werner-like mixtures.
Eigen::Matrix4cd sample_two_qubit_state(std::uint64_t seed, std::uint64_t stream);

/// For every state: E(q) from the structure factor of a two-site chain never
/// exceeds the BSA upper bound (plus 1e-6) on the given q points.
OracleReport check_bsa_consistency(std::size_t samples, int effort, const std::vector<Vec3>& q_list,
                                   std::uint64_t seed);

}  // namespace entbound
