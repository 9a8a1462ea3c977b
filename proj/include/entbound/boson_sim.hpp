#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "entbound/eigensolver.hpp"
#include "entbound/lattice.hpp"

namespace entbound {

struct BosonCaps {
  std::size_t sector_dim = 50000;  // enumeration limit per sector
  std::size_t dense_dim = 4000;    // full diagonalisation limit per sector
};

/// binomial(N + M - 1, N), saturating at SIZE_MAX.
std::size_t sector_dimension(int sites, int particles);

/// Occupation vectors (n_1..n_M) with sum N, in lexicographically descending order.
class FockBasis {
 public:
  FockBasis(int sites, int particles, const BosonCaps& caps = {});

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  std::size_t size() const { return count_; }
  std::span<const int> occupation(std::size_t index) const {
    return {occupations_.data() + index * static_cast<std::size_t>(sites_),
            static_cast<std::size_t>(sites_)};
  }
  std::optional<std::size_t> index_of(std::span<const int> occupation) const;

 private:
  struct Hash {
    std::size_t operator()(const std::vector<int>& v) const noexcept;
  };

  int sites_;
  int particles_;
  std::size_t count_ = 0;
  std::vector<int> occupations_;
  std::unordered_map<std::vector<int>, std::size_t, Hash> index_;
};

FockBasis enumerate_sector(int sites, int particles, const BosonCaps& caps = {});

struct BoseHubbardParams {
  double hopping = 1.0;      // J
  double interaction = 1.0;  // U
  double chemical_potential = 0.0;
};

struct BosonSector {
  std::shared_ptr<const FockBasis> basis;
  SparseMatrix matrix;
  int particles() const { return basis->particles(); }
};

/// H = -J sum_<i,j>(b_i^+ b_j + h.c.) + U/2 sum_i n_i(n_i-1) - mu sum_i n_i as a
/// direct sum over particle-number sectors.
struct BoseHubbardH {
  Lattice lattice;
  BoseHubbardParams params;
  std::vector<BosonSector> sectors;

  const BosonSector& sector(int particles) const;
};

BoseHubbardH build_bose_hubbard(const Lattice& lattice, const BoseHubbardParams& params,
                                int min_particles, int max_particles, const BosonCaps& caps = {});
inline BoseHubbardH build_bose_hubbard(const Lattice& lattice, const BoseHubbardParams& params,
                                       int particles, const BosonCaps& caps = {}) {
  return build_bose_hubbard(lattice, params, particles, particles, caps);
}

/// One block rho_N of a superselection-respecting state, normalised to unit
/// trace within the sector; `weight` is its probability.
struct BosonSectorState {
  std::shared_ptr<const FockBasis> basis;
  double weight = 1.0;
  std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data;

  bool is_pure() const { return std::holds_alternative<Eigen::VectorXcd>(data); }
  Eigen::MatrixXcd density_matrix() const;
};

struct BosonState {
  int sites = 0;
  std::vector<BosonSectorState> sectors;
  std::optional<double> beta;

  double total_weight() const;
  double mean_number() const;
  void validate(double tolerance = 1e-10) const;
};

/// Canonical exp(-beta H_N)/Z_N for one sector, grand-canonical direct sum
/// weighted by Z_N when H spans several sectors.
BosonState thermal_state_sector(const BoseHubbardH& h, double beta, const BosonCaps& caps = {});

struct BosonGroundState {
  BosonState state;
  double energy = 0.0;
  bool degenerate = false;
};

BosonGroundState ground_state_sector(const BoseHubbardH& h, int particles,
                                     const GroundStateOptions& options = {});

BosonState pure_boson_state(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amplitudes);

struct OneBodyDM {
  Eigen::MatrixXcd g;  // g(i, j) = <b_i^+ b_j>
  double mean_number = 0.0;

  void validate(double tolerance = 1e-10) const;
};

OneBodyDM one_body_dm(const BosonState& state);

}  // namespace entbound
