#include "entbound/boson_sim.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "entbound/error.hpp"

namespace entbound {

namespace {

using Index = Eigen::Index;
using cplx = std::complex<double>;

void enumerate(int site, int remaining, std::vector<int>& current, std::vector<int>& out) {
  const int m = static_cast<int>(current.size());
  if (site == m - 1) {
    current[site] = remaining;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[site] = n;
    enumerate(site + 1, remaining - n, current, out);
  }
}

/// Calls visit(target_index, amplitude) for b_i^+ b_j acting on basis state `k`.
template <class Visit>
void hop(const FockBasis& basis, std::size_t k, int i, int j, Visit visit) {
  auto occ = basis.occupation(k);
  if (i == j) {
    if (occ[i] > 0) visit(k, static_cast<double>(occ[i]));
    return;
  }
  if (occ[j] == 0) return;
  std::vector<int> target(occ.begin(), occ.end());
  const double amp = std::sqrt(static_cast<double>(target[j])) *
                     std::sqrt(static_cast<double>(target[i] + 1));
  target[j] -= 1;
  target[i] += 1;
  visit(*basis.index_of(target), amp);
}

}  // namespace

std::size_t sector_dimension(int sites, int particles) {
  if (sites <= 0 || particles < 0) return 0;
  // binomial(N + M - 1, N) computed incrementally; exact while it fits
  std::size_t result = 1;
  const std::size_t n = static_cast<std::size_t>(particles);
  const std::size_t m = static_cast<std::size_t>(sites);
  const std::size_t k = std::min(n, m - 1);
  const std::size_t top = n + m - 1;
  for (std::size_t r = 1; r <= k; ++r) {
    const std::size_t factor = top - k + r;
    if (result > std::numeric_limits<std::size_t>::max() / factor) {
      return std::numeric_limits<std::size_t>::max();
    }
    result = result * factor / r;
  }
  return result;
}

std::size_t FockBasis::Hash::operator()(const std::vector<int>& v) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (int x : v) {
    h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

FockBasis::FockBasis(int sites, int particles, const BosonCaps& caps)
    : sites_(sites), particles_(particles) {
  if (sites <= 0 || particles < 0) {
    throw Error(ErrorCode::invalid_argument, "Fock sector needs M > 0 and N >= 0");
  }
  const auto dim = sector_dimension(sites, particles);
  if (dim > caps.sector_dim) {
    throw Error(ErrorCode::resource, "sector M=" + std::to_string(sites) + " N=" +
                                         std::to_string(particles) + " has dimension " +
                                         std::to_string(dim) + " above the cap " +
                                         std::to_string(caps.sector_dim));
  }
  occupations_.reserve(dim * static_cast<std::size_t>(sites));
  std::vector<int> current(static_cast<std::size_t>(sites), 0);
  enumerate(0, particles, current, occupations_);
  count_ = occupations_.size() / static_cast<std::size_t>(sites);
  index_.reserve(count_);
  for (std::size_t k = 0; k < count_; ++k) {
    auto occ = occupation(k);
    index_.emplace(std::vector<int>(occ.begin(), occ.end()), k);
  }
}

std::optional<std::size_t> FockBasis::index_of(std::span<const int> occupation) const {
  auto it = index_.find(std::vector<int>(occupation.begin(), occupation.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FockBasis enumerate_sector(int sites, int particles, const BosonCaps& caps) {
  return FockBasis(sites, particles, caps);
}

const BosonSector& BoseHubbardH::sector(int particles) const {
  for (const auto& s : sectors)
    if (s.particles() == particles) return s;
  throw Error(ErrorCode::invalid_argument,
              "Hamiltonian has no sector with N=" + std::to_string(particles));
}

BoseHubbardH build_bose_hubbard(const Lattice& lattice, const BoseHubbardParams& params,
                                int min_particles, int max_particles, const BosonCaps& caps) {
  if (min_particles < 0 || max_particles < min_particles) {
    throw Error(ErrorCode::invalid_argument, "invalid particle-number range");
  }
  const int m = static_cast<int>(lattice.size());
  BoseHubbardH h{lattice, params, {}};
  for (int n = min_particles; n <= max_particles; ++n) {
    auto basis = std::make_shared<const FockBasis>(m, n, caps);
    const Index dim = static_cast<Index>(basis->size());
    SparseMatrix mat(dim, dim);
    mat.reserve(Eigen::VectorXi::Constant(dim, 2 * static_cast<int>(lattice.neighbor_pairs().size()) + 1));
    for (std::size_t k = 0; k < basis->size(); ++k) {
      auto occ = basis->occupation(k);
      double diag = 0.0;
      for (int i = 0; i < m; ++i) {
        diag += 0.5 * params.interaction * occ[i] * (occ[i] - 1) - params.chemical_potential * occ[i];
      }
      mat.insert(static_cast<Index>(k), static_cast<Index>(k)) = diag;
      if (params.hopping == 0.0) continue;
      for (const auto& [a, b] : lattice.neighbor_pairs()) {
        const int i = static_cast<int>(a);
        const int j = static_cast<int>(b);
        // <target| b_i^+ b_j |k> lands in row `target`
        auto add = [&](std::size_t target, double amp) {
          mat.coeffRef(static_cast<Index>(target), static_cast<Index>(k)) += -params.hopping * amp;
        };
        hop(*basis, k, i, j, add);
        hop(*basis, k, j, i, add);
      }
    }
    mat.makeCompressed();
    h.sectors.push_back({std::move(basis), std::move(mat)});
  }
  return h;
}

Eigen::MatrixXcd BosonSectorState::density_matrix() const {
  if (is_pure()) {
    const auto& v = std::get<Eigen::VectorXcd>(data);
    return v * v.adjoint();
  }
  return std::get<Eigen::MatrixXcd>(data);
}

double BosonState::total_weight() const {
  double w = 0.0;
  for (const auto& s : sectors) w += s.weight;
  return w;
}

double BosonState::mean_number() const {
  double n = 0.0;
  for (const auto& s : sectors) n += s.weight * s.basis->particles();
  return n;
}

void BosonState::validate(double tolerance) const {
  if (std::abs(total_weight() - 1.0) > tolerance) {
    throw Error(ErrorCode::validation, "boson state weights do not sum to 1");
  }
  for (const auto& s : sectors) {
    if (s.weight < -tolerance) throw Error(ErrorCode::validation, "negative sector weight");
    const auto rho = s.density_matrix();
    if (std::abs(rho.trace().real() - 1.0) > tolerance) {
      throw Error(ErrorCode::validation, "sector block not normalised");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tolerance) {
      throw Error(ErrorCode::validation, "sector block not positive semidefinite");
    }
  }
}

BosonState thermal_state_sector(const BoseHubbardH& h, double beta, const BosonCaps& caps) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::invalid_argument, "beta must be finite and non-negative");
  }
  struct Spectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
  };
  std::vector<Spectrum> spectra;
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& sector : h.sectors) {
    if (sector.basis->size() > caps.dense_dim) {
      throw Error(ErrorCode::resource, "sector N=" + std::to_string(sector.particles()) +
                                           " too large for full diagonalisation");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(sector.matrix));
    spectra.push_back({es.eigenvalues(), es.eigenvectors()});
    e_min = std::min(e_min, es.eigenvalues()(0));
  }

  BosonState out;
  out.sites = static_cast<int>(h.lattice.size());
  out.beta = beta;
  double z_total = 0.0;
  for (std::size_t s = 0; s < h.sectors.size(); ++s) {
    const auto& sector = h.sectors[s];
    const Index dim = static_cast<Index>(sector.basis->size());
    if (beta == 0.0) {
      out.sectors.push_back({sector.basis, static_cast<double>(dim),
                             Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim))});
      z_total += static_cast<double>(dim);
      continue;
    }
    const auto& sp = spectra[s];
    const Eigen::VectorXd boltzmann = (-(beta * (sp.energies.array() - e_min))).exp().matrix();
    const double z = boltzmann.sum();
    const Eigen::MatrixXd scaled = sp.vectors * (boltzmann / z).cwiseSqrt().asDiagonal();
    const Eigen::MatrixXd rho = scaled * scaled.transpose();
    out.sectors.push_back({sector.basis, z, Eigen::MatrixXcd(rho.cast<cplx>())});
    z_total += z;
  }
  for (auto& s : out.sectors) s.weight /= z_total;
  return out;
}

BosonState pure_boson_state(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != basis->size()) {
    throw Error(ErrorCode::invalid_argument, "amplitude count does not match the sector");
  }
  BosonState out;
  out.sites = basis->sites();
  out.sectors.push_back({std::move(basis), 1.0, std::move(amplitudes)});
  return out;
}

BosonGroundState ground_state_sector(const BoseHubbardH& h, int particles,
                                     const GroundStateOptions& options) {
  const auto& sector = h.sector(particles);
  const auto gs = lowest_eigenpair(sector.matrix, options);
  return {pure_boson_state(sector.basis, gs.vector.cast<cplx>()), gs.energy, gs.degenerate};
}

OneBodyDM one_body_dm(const BosonState& state) {
  const int m = state.sites;
  OneBodyDM out{Eigen::MatrixXcd::Zero(m, m), 0.0};
  for (const auto& sector : state.sectors) {
    const auto& basis = *sector.basis;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) {
          // tr[rho A] = sum_k <k|rho A|k>, with A|k> = amp |t>
          hop(basis, k, i, j, [&](std::size_t t, double amp) {
            if (sector.is_pure()) {
              const auto& v = std::get<Eigen::VectorXcd>(sector.data);
              acc += amp * std::conj(v(static_cast<Index>(t))) * v(static_cast<Index>(k));
            } else {
              const auto& rho = std::get<Eigen::MatrixXcd>(sector.data);
              acc += amp * rho(static_cast<Index>(k), static_cast<Index>(t));
            }
          });
        }
        out.g(i, j) += sector.weight * acc;
      }
    }
  }
  out.mean_number = out.g.trace().real();
  return out;
}

void OneBodyDM::validate(double tolerance) const {
  if ((g - g.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
    throw Error(ErrorCode::validation, "one-body density matrix is not Hermitian");
  }
  for (Index i = 0; i < g.rows(); ++i) {
    if (g(i, i).real() < -tolerance) {
      throw Error(ErrorCode::validation, "negative occupation in one-body density matrix");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
  if (g.rows() > 0 && es.eigenvalues().minCoeff() < -tolerance) {
    throw Error(ErrorCode::validation, "one-body density matrix is not positive semidefinite");
  }
  if (std::abs(g.trace().real() - mean_number) > tolerance) {
    throw Error(ErrorCode::validation, "tr G differs from the mean particle number");
  }
}

}  // namespace entbound
