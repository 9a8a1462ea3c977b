#include "entbound/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "entbound/error.hpp"
#include "entbound/rng.hpp"

namespace entbound {

namespace {

struct RitzResult {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  double norm_estimate = 0.0;
  int restarts = 0;
};

void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

RitzResult lanczos_lowest(const SparseMatrix& h, const std::vector<Eigen::VectorXd>& locked,
                          Eigen::VectorXd start, const GroundStateOptions& opt) {
  const Eigen::Index n = h.rows();
  const Eigen::Index free_dim = n - static_cast<Eigen::Index>(locked.size());
  const int m = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, free_dim));
  const double hnorm = std::max(infinity_norm(h), std::numeric_limits<double>::min());

  RitzResult out;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    project_out(start, locked);
    project_out(start, locked);
    start.normalize();

    std::vector<Eigen::VectorXd> basis;
    basis.reserve(m);
    std::vector<double> alpha, beta;
    basis.push_back(start);
    Eigen::VectorXd w(n);
    for (int k = 0; k < m; ++k) {
      w.noalias() = h * basis[k];
      const double a = basis[k].dot(w);
      alpha.push_back(a);
      // two passes of classical Gram-Schmidt against everything seen so far
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) w -= b.dot(w) * b;
        project_out(w, locked);
      }
      const double b = w.norm();
      if (k + 1 == m || b <= 1e-13 * hnorm) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }

    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(t);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < k; ++i) x += y(i) * basis[i];
    project_out(x, locked);
    x.normalize();

    const double theta = x.dot(h * x);
    const double residual = (h * x - theta * x).norm();
    const double spread = tri.eigenvalues().cwiseAbs().maxCoeff();

    out.value = theta;
    out.vector = x;
    out.residual = residual;
    out.norm_estimate = std::max(spread, std::abs(theta));
    out.restarts = restart;
    if (residual <= opt.tolerance * std::max(out.norm_estimate, 1e-300) || residual == 0.0) {
      return out;
    }
    start = x;
  }
  throw Error(ErrorCode::numeric, "Lanczos did not converge; residual " +
                                      std::to_string(out.residual));
}

Eigen::VectorXd random_start(Eigen::Index n, std::uint64_t seed, std::uint64_t stream) {
  SampleRng rng(seed, stream);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

bool is_diagonal(const SparseMatrix& h) {
  for (Eigen::Index r = 0; r < h.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(h, r); it; ++it)
      if (it.col() != r && it.value() != 0.0) return false;
  return true;
}

GroundState diagonal_ground_state(const SparseMatrix& h, const GroundStateOptions& opt) {
  const Eigen::VectorXd d = h.diagonal();
  Eigen::Index best = 0;
  d.minCoeff(&best);
  GroundState gs;
  gs.energy = d(best);
  gs.vector = Eigen::VectorXd::Unit(h.rows(), best);
  gs.norm_estimate = d.cwiseAbs().maxCoeff();
  std::vector<double> sorted(d.data(), d.data() + d.size());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() > 1) gs.gap = sorted[1] - sorted[0];
  gs.degenerate = gs.gap <= opt.degeneracy_tolerance * gs.norm_estimate;
  return gs;
}

}  // namespace

double infinity_norm(const SparseMatrix& h) {
  double best = 0.0;
  for (Eigen::Index r = 0; r < h.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(h, r); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

bool is_symmetric(const SparseMatrix& h, double tolerance) {
  if (h.rows() != h.cols()) return false;
  const SparseMatrix t = h.transpose();
  return (h - t).norm() <= tolerance * std::max(1.0, h.norm());
}

GroundState lowest_eigenpair(const SparseMatrix& h, const GroundStateOptions& options) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw Error(ErrorCode::invalid_argument, "eigensolver needs a non-empty square matrix");
  }
  if (is_diagonal(h)) return diagonal_ground_state(h, options);

  const Eigen::Index n = h.rows();
  auto first = lanczos_lowest(h, {}, random_start(n, options.seed, 0), options);

  GroundState gs;
  gs.energy = first.value;
  gs.vector = std::move(first.vector);
  gs.residual = first.residual;
  gs.norm_estimate = first.norm_estimate;
  gs.restarts = first.restarts;
  if (n > 1) {
    auto second = lanczos_lowest(h, {gs.vector}, random_start(n, options.seed, 1), options);
    gs.gap = second.value - gs.energy;
    gs.norm_estimate = std::max(gs.norm_estimate, second.norm_estimate);
  }
  gs.degenerate = gs.gap <= options.degeneracy_tolerance * gs.norm_estimate;
  return gs;
}

}  // namespace entbound
