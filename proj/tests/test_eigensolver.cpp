#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "entbound/eigensolver.hpp"

using namespace entbound;

namespace {

SparseMatrix random_symmetric(int n, double density, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (i == j || (u(gen) + 1.0) / 2.0 < density) a(i, j) = a(j, i) = u(gen);
  return a.sparseView();
}

}  // namespace

TEST_SUITE("eigensolver") {

TEST_CASE("Lanczos matches dense diagonalisation") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto h = random_symmetric(300, 0.05, seed);
    const auto gs = lowest_eigenpair(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
    CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
    CHECK((h * gs.vector - gs.energy * gs.vector).norm() < 1e-8);
    CHECK(gs.vector.norm() == doctest::Approx(1.0));
    CHECK(gs.gap == doctest::Approx(es.eigenvalues()(1) - es.eigenvalues()(0)).epsilon(1e-6));
  }
}

TEST_CASE("diagonal matrices are solved exactly") {
  Eigen::VectorXd d(5);
  d << 3.0, -1.5, 2.0, 0.25, 7.0;
  SparseMatrix h(5, 5);
  for (int i = 0; i < 5; ++i) h.insert(i, i) = d(i);
  const auto gs = lowest_eigenpair(h);
  CHECK(gs.energy == -1.5);
  CHECK(gs.vector(1) * gs.vector(1) == doctest::Approx(1.0));
  CHECK(gs.residual == 0.0);
  CHECK_FALSE(gs.degenerate);
}

TEST_CASE("degenerate ground state is flagged") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(40, 40);
  for (int i = 0; i < 40; ++i) a(i, i) = i;
  a(0, 0) = -2.0;
  a(1, 1) = -2.0;
  a(0, 5) = a(5, 0) = 1e-3;  // avoid the diagonal fast path
  a(1, 5) = a(5, 1) = 1e-3;
  const SparseMatrix h = a.sparseView();
  const auto gs = lowest_eigenpair(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)));
  CHECK(gs.degenerate == (es.eigenvalues()(1) - es.eigenvalues()(0) < 1e-10 * infinity_norm(h)));
}

TEST_CASE("norm helpers") {
  const auto h = random_symmetric(50, 0.2, 9);
  CHECK(is_symmetric(h, 0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
  CHECK(infinity_norm(h) >= es.eigenvalues().cwiseAbs().maxCoeff() - 1e-12);
}

}
