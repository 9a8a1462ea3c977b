#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace entbound {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct GroundStateOptions {
  int krylov_dim = 64;
  int max_restarts = 500;
  /// Convergence when ||Hv - E v|| <= tolerance * ||H||.
  double tolerance = 1e-10;
  /// Gap below degeneracy_tolerance * ||H|| sets the degenerate flag.
  double degeneracy_tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
};

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  double norm_estimate = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  bool degenerate = false;
  int restarts = 0;
};

/// Lowest eigenpair of a real symmetric matrix by restarted Lanczos with full
/// reorthogonalisation. A second deflated run measures the spectral gap.
/// Diagonal matrices are solved exactly.
GroundState lowest_eigenpair(const SparseMatrix& h, const GroundStateOptions& options = {});

/// Largest absolute row sum; an upper bound on the spectral norm.
double infinity_norm(const SparseMatrix& h);

bool is_symmetric(const SparseMatrix& h, double tolerance);

}  // namespace entbound
