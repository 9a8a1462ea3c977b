#include "entbound/spin_sim.hpp"

#include <cmath>
#include <string>

#include "entbound/error.hpp"
#include "entbound/parallel.hpp"

namespace entbound {

namespace {

using Index = Eigen::Index;
using cplx = std::complex<double>;

std::size_t sites_for_dimension(Index dim) {
  std::size_t m = 0;
  while ((Index{1} << m) < dim) ++m;
  if ((Index{1} << m) != dim) {
    throw Error(ErrorCode::invalid_argument, "spin state dimension must be a power of two");
  }
  return m;
}

inline int bit(Index s, std::size_t site, std::size_t m) {
  return static_cast<int>((s >> (m - 1 - site)) & 1);
}
inline Index mask(std::size_t site, std::size_t m) { return Index{1} << (m - 1 - site); }

/// Matrix element c(s) of P|s> = c(s)|s'> for a single Pauli on `site`.
inline cplx single_coeff(Axis a, int b) {
  switch (a) {
    case Axis::x: return 1.0;
    case Axis::y: return b == 0 ? cplx(0, 1) : cplx(0, -1);
    case Axis::z: return b == 0 ? 1.0 : -1.0;
  }
  return 1.0;
}

inline double pair_coeff(Axis a, int bi, int bj) {
  switch (a) {
    case Axis::x: return 1.0;
    case Axis::y: return bi == bj ? -1.0 : 1.0;
    case Axis::z: return bi == bj ? 1.0 : -1.0;
  }
  return 1.0;
}

/// <P> for a Pauli string with flip mask `flip` and coefficient function coeff(s).
template <class Coeff>
double expectation(const SpinState& state, Index flip, Coeff coeff) {
  const Index dim = state.dimension();
  cplx acc = 0.0;
  if (state.is_pure()) {
    const auto& psi = state.amplitudes();
    for (Index s = 0; s < dim; ++s) acc += std::conj(psi(s ^ flip)) * coeff(s) * psi(s);
  } else {
    const auto& rho = state.density();
    for (Index s = 0; s < dim; ++s) acc += coeff(s) * rho(s, s ^ flip);
  }
  return acc.real();
}

}  // namespace

char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

SpinHamiltonian build_heisenberg(const Lattice& lattice, double coupling, const SpinCaps& caps) {
  const std::size_t m = lattice.size();
  if (m > caps.sparse_max_sites) {
    throw Error(ErrorCode::resource, "Heisenberg assembly limited to " +
                                         std::to_string(caps.sparse_max_sites) + " sites, got " +
                                         std::to_string(m));
  }
  const Index dim = Index{1} << m;
  const auto& pairs = lattice.neighbor_pairs();

  SpinHamiltonian h{SparseMatrix(dim, dim), coupling, lattice};
  h.matrix.reserve(Eigen::VectorXi::Constant(dim, static_cast<int>(pairs.size()) + 1));
  for (Index s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (const auto& [i, j] : pairs) {
      const int bi = bit(s, i, m);
      const int bj = bit(s, j, m);
      if (bi == bj) {
        diag += coupling;
      } else {
        diag -= coupling;
        // sigma^x sigma^x + sigma^y sigma^y flips an antiparallel pair with weight 2
        h.matrix.insert(s, s ^ mask(i, m) ^ mask(j, m)) = 2.0 * coupling;
      }
    }
    if (!pairs.empty()) h.matrix.insert(s, s) = diag;
  }
  h.matrix.makeCompressed();
  return h;
}

SpinState::SpinState(std::variant<Eigen::VectorXcd, Eigen::MatrixXcd> data)
    : data_(std::move(data)) {
  sites_ = sites_for_dimension(dimension());
}

SpinState SpinState::pure(Eigen::VectorXcd amplitudes) {
  return SpinState(std::move(amplitudes));
}

SpinState SpinState::mixed(Eigen::MatrixXcd density) {
  if (density.rows() != density.cols()) {
    throw Error(ErrorCode::invalid_argument, "density matrix must be square");
  }
  return SpinState(std::move(density));
}

Index SpinState::dimension() const {
  return is_pure() ? amplitudes().size() : density().rows();
}

Eigen::MatrixXcd SpinState::density_matrix() const {
  if (is_pure()) return amplitudes() * amplitudes().adjoint();
  return density();
}

double SpinState::trace() const {
  return is_pure() ? amplitudes().squaredNorm() : density().trace().real();
}

double SpinState::purity() const {
  if (is_pure()) return std::pow(amplitudes().squaredNorm(), 2);
  return (density() * density()).trace().real();
}

void SpinState::validate(double tolerance) const {
  if (std::abs(trace() - 1.0) > tolerance) {
    throw Error(ErrorCode::validation, "spin state trace deviates from 1");
  }
  if (!is_pure()) {
    const auto& rho = density();
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
      throw Error(ErrorCode::validation, "density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tolerance) {
      throw Error(ErrorCode::validation, "density matrix is not positive semidefinite");
    }
  }
}

SpinState thermal_state(const SpinHamiltonian& h, double beta, const SpinCaps& caps) {
  if (h.sites() > caps.dense_max_sites) {
    throw Error(ErrorCode::resource,
                "thermal states need full diagonalisation, limited to " +
                    std::to_string(caps.dense_max_sites) + " sites; use ground_state instead");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::invalid_argument, "beta must be finite and non-negative");
  }
  const Index dim = h.matrix.rows();
  SpinState out = SpinState::mixed(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
  out.beta = beta;
  if (beta == 0.0) return out;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(h.matrix));
  const Eigen::VectorXd& energies = es.eigenvalues();
  const double e0 = energies(0);
  Eigen::VectorXd weights = (-(beta * (energies.array() - e0))).exp().matrix();
  weights /= weights.sum();
  const Eigen::MatrixXd scaled = es.eigenvectors() * weights.cwiseSqrt().asDiagonal();
  Eigen::MatrixXd rho = scaled * scaled.transpose();
  out = SpinState::mixed(rho.cast<cplx>());
  out.beta = beta;
  return out;
}

SpinGroundState ground_state(const SpinHamiltonian& h, const GroundStateOptions& options,
                             const SpinCaps& caps) {
  if (h.sites() > caps.sparse_max_sites) {
    throw Error(ErrorCode::resource, "ground state limited to " +
                                         std::to_string(caps.sparse_max_sites) + " sites");
  }
  const auto gs = lowest_eigenpair(h.matrix, options);
  return SpinGroundState{SpinState::pure(gs.vector.cast<cplx>()), gs.energy, gs.residual,
                         gs.degenerate};
}

CorrelatorSet correlators(const SpinState& state) {
  const std::size_t m = state.sites();
  CorrelatorSet c;
  for (Axis a : kAxes) {
    const int ai = static_cast<int>(a);
    c.pair[ai] = Eigen::MatrixXd::Identity(static_cast<Index>(m), static_cast<Index>(m));
    c.bloch[ai] = Eigen::VectorXd::Zero(static_cast<Index>(m));
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);

  parallel_for(pairs.size() + m, [&](std::size_t task) {
    if (task < m) {
      const std::size_t i = task;
      for (Axis a : kAxes) {
        const Index flip = a == Axis::z ? 0 : mask(i, m);
        c.bloch[static_cast<int>(a)](static_cast<Index>(i)) =
            expectation(state, flip, [&](Index s) { return single_coeff(a, bit(s, i, m)); });
      }
      return;
    }
    const auto [i, j] = pairs[task - m];
    for (Axis a : kAxes) {
      const Index flip = a == Axis::z ? 0 : (mask(i, m) | mask(j, m));
      const double v = expectation(state, flip, [&](Index s) {
        return cplx(pair_coeff(a, bit(s, i, m), bit(s, j, m)));
      });
      auto& mat = c.pair[static_cast<int>(a)];
      mat(static_cast<Index>(i), static_cast<Index>(j)) = v;
      mat(static_cast<Index>(j), static_cast<Index>(i)) = v;
    }
  });
  return c;
}

void CorrelatorSet::validate(double tolerance) const {
  const Index m = static_cast<Index>(sites());
  for (int a = 0; a < 3; ++a) {
    if (pair[a].rows() != m || pair[a].cols() != m || bloch[a].size() != m) {
      throw Error(ErrorCode::validation, "correlator set has inconsistent sizes");
    }
    if ((pair[a] - pair[a].transpose()).cwiseAbs().maxCoeff() > tolerance) {
      throw Error(ErrorCode::validation, "correlators are not symmetric in i <-> j");
    }
    for (Index i = 0; i < m; ++i) {
      if (pair[a](i, i) != 1.0) throw Error(ErrorCode::validation, "C_a(i,i) must equal 1");
    }
    if (pair[a].cwiseAbs().maxCoeff() > 1.0 + tolerance ||
        (m > 0 && bloch[a].cwiseAbs().maxCoeff() > 1.0 + tolerance)) {
      throw Error(ErrorCode::validation, "correlator magnitude exceeds 1");
    }
  }
}

StructureFactorValue structure_factor(const CorrelatorSet& corr, const Lattice& lattice,
                                      const Vec3& q) {
  const std::size_t m = lattice.size();
  if (corr.sites() != m) {
    throw Error(ErrorCode::invalid_argument, "correlator and lattice sizes differ");
  }
  StructureFactorValue out;
  double imag = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto& ri = lattice.position(i);
      const auto& rj = lattice.position(j);
      const double phase = q[0] * (ri[0] - rj[0]) + q[1] * (ri[1] - rj[1]) + q[2] * (ri[2] - rj[2]);
      const double c = std::cos(phase);
      const double s = std::sin(phase);
      for (int a = 0; a < 3; ++a) {
        const double v = corr.pair[a](static_cast<Index>(i), static_cast<Index>(j));
        out.components[a] += c * v;
        imag += s * v;
        scale += std::abs(v);
      }
    }
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (auto& v : out.components) v *= inv_m;
  out.total = out.components[0] + out.components[1] + out.components[2];
  if (std::abs(imag) * inv_m > 1e-10 * std::max(1.0, scale * inv_m)) {
    throw Error(ErrorCode::numeric, "structure factor has an imaginary residue of " +
                                        std::to_string(imag * inv_m) +
                                        "; correlators are not symmetric");
  }
  return out;
}

StructureFactorGrid structure_factor_grid(const CorrelatorSet& corr, const Lattice& lattice,
                                          const QGrid& grid) {
  StructureFactorGrid out;
  out.dimension = grid.dimension;
  out.q = grid.points;
  out.s.resize(grid.points.size());
  out.components.resize(grid.points.size());
  parallel_for(grid.points.size(), [&](std::size_t k) {
    const auto v = structure_factor(corr, lattice, grid.points[k]);
    out.s[k] = v.total;
    out.components[k] = v.components;
  });
  return out;
}

double heisenberg_energy(const CorrelatorSet& corr, const Lattice& lattice, double coupling) {
  double e = 0.0;
  for (const auto& [i, j] : lattice.neighbor_pairs()) {
    for (int a = 0; a < 3; ++a) e += corr.pair[a](static_cast<Index>(i), static_cast<Index>(j));
  }
  return coupling * e;
}

}  // namespace entbound
