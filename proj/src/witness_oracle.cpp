#include "entbound/witness_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "entbound/bound_engine.hpp"
#include "entbound/error.hpp"
#include "entbound/parallel.hpp"
#include "entbound/rng.hpp"

namespace entbound {

namespace {

using cplx = std::complex<double>;
using Index = Eigen::Index;

constexpr double kInequalityTolerance = 1e-9;

Eigen::Vector2cd random_qubit_vector(SampleRng& rng) {
  Eigen::Vector2cd v(cplx(rng.normal(), rng.normal()), cplx(rng.normal(), rng.normal()));
  return v.normalized();
}

std::array<double, 3> bloch_of(const Eigen::Vector2cd& v) {
  const cplx c = std::conj(v(0)) * v(1);
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(v(0)) - std::norm(v(1))};
}

std::array<double, 3> random_ball_point(SampleRng& rng) {
  Eigen::Vector3d d(rng.normal(), rng.normal(), rng.normal());
  d.normalize();
  const double r = std::cbrt(rng.uniform());
  return {r * d(0), r * d(1), r * d(2)};
}

Eigen::Matrix2cd qubit_density(const std::array<double, 3>& b) {
  Eigen::Matrix2cd rho;
  rho << cplx(1.0 + b[2], 0.0), cplx(b[0], -b[1]), cplx(b[0], b[1]), cplx(1.0 - b[2], 0.0);
  return 0.5 * rho;
}

const std::array<Eigen::Matrix2cd, 3>& paulis() {
  static const std::array<Eigen::Matrix2cd, 3> p = [] {
    Eigen::Matrix2cd x, y, z;
    x << 0, 1, 1, 0;
    y << 0, cplx(0, -1), cplx(0, 1), 0;
    z << 1, 0, 0, -1;
    return std::array<Eigen::Matrix2cd, 3>{x, y, z};
  }();
  return p;
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

nlohmann::json to_json(const OracleReport& r) {
  return {{"suite", r.suite},   {"seed", r.seed},           {"samples", r.samples},
          {"margin", r.margin}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

ProductSpinSample sample_product_spin_state(std::size_t sites, Purity purity, std::uint64_t seed,
                                            std::uint64_t stream) {
  if (sites == 0 || sites > 10) {
    throw Error(ErrorCode::resource, "product-state sampler supports 1..10 sites");
  }
  SampleRng rng(seed, stream);
  std::vector<std::array<double, 3>> bloch;
  if (purity == Purity::pure) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
    for (std::size_t i = 0; i < sites; ++i) {
      const auto v = random_qubit_vector(rng);
      bloch.push_back(bloch_of(v));
      Eigen::VectorXcd next(psi.size() * 2);
      for (Index s = 0; s < psi.size(); ++s) {
        next(2 * s) = psi(s) * v(0);
        next(2 * s + 1) = psi(s) * v(1);
      }
      psi = std::move(next);
    }
    return {SpinState::pure(std::move(psi)), std::move(bloch)};
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t i = 0; i < sites; ++i) {
    const auto b = random_ball_point(rng);
    bloch.push_back(b);
    const Eigen::Matrix2cd site = qubit_density(b);
    const Index d = rho.rows();
    Eigen::MatrixXcd next(2 * d, 2 * d);
    for (Index s = 0; s < d; ++s)
      for (Index t = 0; t < d; ++t)
        for (int bi = 0; bi < 2; ++bi)
          for (int ci = 0; ci < 2; ++ci) next(2 * s + bi, 2 * t + ci) = rho(s, t) * site(bi, ci);
    rho = std::move(next);
  }
  return {SpinState::mixed(std::move(rho)), std::move(bloch)};
}

OracleReport check_spin_witness(const Lattice& lattice, const std::vector<Vec3>& q_list,
                                std::size_t samples, std::uint64_t seed) {
  std::vector<double> margins(samples, std::numeric_limits<double>::infinity());
  std::vector<double> disagreement(samples, 0.0);
  parallel_for(samples, [&](std::size_t k) {
    const auto sample = sample_product_spin_state(
        lattice.size(), k % 2 == 0 ? Purity::pure : Purity::mixed, seed, k);
    const auto corr = correlators(sample.state);
    for (const auto& q : q_list) {
      const double direct = 0.5 * structure_factor(corr, lattice, q).total - 1.0;
      const double decomposed = product_witness_expectation(q, sample.bloch, lattice);
      margins[k] = std::min(margins[k], direct);
      disagreement[k] = std::max(disagreement[k], std::abs(direct - decomposed));
    }
  });

  OracleReport r;
  r.suite = "spin-witness";
  r.seed = seed;
  r.samples = samples;
  r.tolerance = kInequalityTolerance;
  r.margin = samples ? *std::min_element(margins.begin(), margins.end()) : 0.0;
  r.consistency_error = samples ? *std::max_element(disagreement.begin(), disagreement.end()) : 0.0;
  r.pass = r.margin >= -r.tolerance && r.consistency_error <= kInequalityTolerance;
  if (r.consistency_error > kInequalityTolerance) {
    r.note = "internal consistency failure: direct and product-decomposition routes disagree";
  }
  return r;
}

OracleReport check_uncertainty(std::size_t samples, std::uint64_t seed) {
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t k) {
    SampleRng rng(seed, k);
    Eigen::Matrix2cd rho;
    if (k % 2 == 0) {
      const auto v = random_qubit_vector(rng);
      rho = v * v.adjoint();
    } else {
      Eigen::Matrix2cd a;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
      rho = a * a.adjoint();
      rho /= rho.trace().real();
    }
    double value = 0.0;
    for (const auto& p : paulis()) {
      const double e = (rho * p).trace().real();
      value += 1.0 - e * e;
    }
    values[k] = value;
  });

  OracleReport r;
  r.suite = "uncertainty";
  r.seed = seed;
  r.samples = samples;
  r.tolerance = 1e-12;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    r.margin = std::min(r.margin, values[k] - 2.0);
    if (k % 2 == 0) r.consistency_error = std::max(r.consistency_error, std::abs(values[k] - 2.0));
  }
  if (samples == 0) r.margin = 0.0;
  r.pass = r.margin >= -r.tolerance && r.consistency_error <= 1e-10;
  if (r.consistency_error > 1e-10) r.note = "pure states do not saturate the relation";
  return r;
}

BosonState ssr_separable_state(std::shared_ptr<const FockBasis> basis,
                               const std::vector<std::vector<int>>& compositions,
                               const std::vector<double>& weights) {
  if (compositions.size() != weights.size() || compositions.empty()) {
    throw Error(ErrorCode::invalid_argument, "one weight per composition required");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::invalid_argument, "weights must have positive sum");
  const Index dim = static_cast<Index>(basis->size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t k = 0; k < compositions.size(); ++k) {
    if (weights[k] < 0.0) throw Error(ErrorCode::invalid_argument, "negative mixture weight");
    const auto idx = basis->index_of(compositions[k]);
    if (!idx) {
      throw Error(ErrorCode::invalid_argument, "composition is not in the particle-number sector");
    }
    rho(static_cast<Index>(*idx), static_cast<Index>(*idx)) += weights[k] / total;
  }
  BosonState out;
  out.sites = basis->sites();
  out.sectors.push_back({std::move(basis), 1.0, std::move(rho)});
  return out;
}

BosonState sample_ssr_separable(int sites, int particles, std::size_t terms, std::uint64_t seed,
                                std::uint64_t stream) {
  auto basis = std::make_shared<const FockBasis>(sites, particles);
  SampleRng rng(seed, stream);
  std::vector<std::vector<int>> compositions;
  std::vector<double> weights;
  for (std::size_t k = 0; k < std::max<std::size_t>(terms, 1); ++k) {
    const auto occ = basis->occupation(rng.below(basis->size()));
    compositions.emplace_back(occ.begin(), occ.end());
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    weights.push_back(-std::log(u));
  }
  return ssr_separable_state(std::move(basis), compositions, weights);
}

SectorWitness build_sector_witness(const Lattice& lattice, int particles, double x, double y,
                                   const TofCalibration& calib, KernelMethod method) {
  const int m = static_cast<int>(lattice.size());
  auto basis = std::make_shared<const FockBasis>(m, particles);
  Eigen::MatrixXcd phase(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      phase(i, j) = tof_phase(static_cast<std::size_t>(i), static_cast<std::size_t>(j), x, y,
                              lattice, calib, method);

  const Index dim = static_cast<Index>(basis->size());
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<int> target(static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < basis->size(); ++k) {
    const auto occ = basis->occupation(k);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (occ[j] == 0) continue;
        std::copy(occ.begin(), occ.end(), target.begin());
        double amp;
        if (i == j) {
          amp = occ[i];
        } else {
          amp = std::sqrt(static_cast<double>(occ[j])) * std::sqrt(static_cast<double>(occ[i] + 1));
          target[j] -= 1;
          target[i] += 1;
        }
        const auto t = *basis->index_of(target);
        w(static_cast<Index>(t), static_cast<Index>(k)) += phase(i, j) * amp;
      }
    }
    w(static_cast<Index>(k), static_cast<Index>(k)) -= particles;
  }
  return {std::move(basis), std::move(w), x, y};
}

std::vector<std::pair<double, double>> default_detector_points(const TofCalibration& calib) {
  const double kmax = std::numbers::pi / calib.lattice.spacing;
  std::vector<std::pair<double, double>> points;
  for (double kx : linspace(-kmax, kmax, 4))
    for (double ky : linspace(-kmax, kmax, 4)) points.push_back(position_from_k(kx, ky, calib));
  return points;
}

OracleReport check_sector_witness_eigs(int max_sites, int max_particles,
                                       const std::vector<std::pair<double, double>>& points,
                                       const TofCalibration& calib,
                                       const SectorCheckOptions& options) {
  struct Task {
    int sites;
    int particles;
  };
  std::vector<Task> tasks;
  for (int m = 1; m <= max_sites; ++m)
    for (int n = 0; n <= max_particles; ++n) tasks.push_back({m, n});

  std::vector<double> margins(tasks.size(), std::numeric_limits<double>::infinity());
  std::vector<double> coherence(tasks.size(), 0.0);
  parallel_for(tasks.size(), [&](std::size_t t) {
    const auto [m, n] = tasks[t];
    LatticeSpec spec{LatticeKind::chain, {m}, calib.lattice.spacing, Boundary::open};
    const Lattice lattice = build_lattice(spec);
    const double bound = static_cast<double>(m) * n;

    std::vector<BosonState> separable;
    for (std::size_t s = 0; s < options.separable_samples; ++s) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(m) << 48) ^
                                   (static_cast<std::uint64_t>(n) << 32) ^ s;
      separable.push_back(sample_ssr_separable(m, n, options.terms, options.seed, stream));
      const auto g = one_body_dm(separable.back());
      for (Index i = 0; i < g.g.rows(); ++i)
        for (Index j = 0; j < g.g.cols(); ++j)
          if (i != j) coherence[t] = std::max(coherence[t], std::abs(g.g(i, j)));
    }

    for (const auto& [x, y] : points) {
      const auto w = build_sector_witness(lattice, n, x, y, calib);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w.matrix, Eigen::EigenvaluesOnly);
      const double largest = es.eigenvalues().cwiseAbs().maxCoeff();
      margins[t] = std::min(margins[t], bound - largest);
      for (const auto& state : separable) {
        const auto rho = state.sectors.front().density_matrix();
        margins[t] = std::min(margins[t], (rho * w.matrix).trace().real());
      }
    }
  });

  OracleReport r;
  r.suite = "sector-eigs";
  r.seed = options.seed;
  r.samples = options.separable_samples;
  r.tolerance = kInequalityTolerance;
  r.margin = margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
  r.consistency_error = coherence.empty() ? 0.0 : *std::max_element(coherence.begin(), coherence.end());
  r.pass = r.margin >= -r.tolerance && r.consistency_error <= 1e-12;
  if (r.consistency_error > 1e-12) r.note = "separable samples carry one-body coherence";
  return r;
}

double partial_transpose_min_eig(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd pt;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int ap = 0; ap < 2; ++ap)
        for (int bp = 0; bp < 2; ++bp) pt(2 * a + b, 2 * ap + bp) = rho(2 * a + bp, 2 * ap + b);
  return min_eigenvalue(pt);
}

namespace {

Eigen::Vector4cd kron(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) {
  return Eigen::Vector4cd(a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1));
}

/// Product vector a (x) b approximately minimising phi^+ K phi by alternating
/// minimisation over the two factors.
std::pair<Eigen::Vector4cd, double> best_product_vector(const Eigen::Matrix4cd& k, SampleRng& rng,
                                                        int restarts, int sweeps) {
  Eigen::Vector4cd best;
  double best_value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Eigen::Vector2cd a = random_qubit_vector(rng);
    Eigen::Vector2cd b = random_qubit_vector(rng);
    for (int s = 0; s < sweeps; ++s) {
      // reduced 2x2 forms: fix b, minimise over a; then fix a
      Eigen::Matrix2cd ka, kb;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          cplx v = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) v += std::conj(b(p)) * k(2 * i + p, 2 * j + q) * b(q);
          ka(i, j) = v;
        }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> ea(ka);
      a = ea.eigenvectors().col(0);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          cplx v = 0.0;
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) v += std::conj(a(p)) * k(2 * p + i, 2 * q + j) * a(q);
          kb(i, j) = v;
        }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eb(kb);
      b = eb.eigenvectors().col(0);
    }
    const Eigen::Vector4cd phi = kron(a, b);
    const double value = (phi.adjoint() * k * phi)(0, 0).real();
    if (value < best_value) {
      best_value = value;
      best = phi;
    }
  }
  return {best, best_value};
}

}  // namespace

BsaResult bsa_feasible_upper(const Eigen::Matrix4cd& rho_in, int effort, std::uint64_t seed) {
  const Eigen::Matrix4cd rho = 0.5 * (rho_in + rho_in.adjoint());
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || min_eigenvalue(rho) < -1e-10) {
    throw Error(ErrorCode::invalid_argument, "bsa_feasible_upper needs a valid density matrix");
  }
  constexpr double kFeasibility = -1e-10;
  constexpr double kRegularisation = 1e-13;

  BsaResult result;
  Eigen::Matrix4cd residual = rho;
  for (int it = 0; it < effort; ++it) {
    SampleRng rng(seed, static_cast<std::uint64_t>(it));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(residual);
    const Eigen::Vector4d inv =
        es.eigenvalues().unaryExpr([&](double l) { return 1.0 / std::max(l, kRegularisation); });
    const Eigen::Matrix4cd k = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
    const auto [phi, value] = best_product_vector(k, rng, 6, 25);
    if (!(value > 0.0) || !std::isfinite(value)) continue;
    const double t = 1.0 / value;
    const Eigen::Matrix4cd proj = phi * phi.adjoint();
    for (double fraction : {1.0, 0.9, 0.5, 0.25, 0.1}) {
      const double w = fraction * t;
      const Eigen::Matrix4cd next = residual - w * proj;
      if (min_eigenvalue(next) >= kFeasibility) {
        residual = next;
        result.separable_weight += w;
        result.product_vectors.push_back(phi);
        result.weights.push_back(w);
        break;
      }
    }
  }

  // independent re-certification of the accumulated decomposition
  Eigen::Matrix4cd separable = Eigen::Matrix4cd::Zero();
  for (std::size_t k = 0; k < result.weights.size(); ++k) {
    separable += result.weights[k] * result.product_vectors[k] * result.product_vectors[k].adjoint();
  }
  if (min_eigenvalue(rho - separable) < kFeasibility) {
    return BsaResult{};
  }
  result.separable_weight = std::min(result.separable_weight, 1.0);
  result.upper = 1.0 - result.separable_weight;
  return result;
}

Eigen::Matrix4cd sample_two_qubit_state(std::uint64_t seed, std::uint64_t stream) {
  SampleRng rng(seed, stream);
  auto random_vector4 = [&] {
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(rng.normal(), rng.normal());
    return Eigen::Vector4cd(v.normalized());
  };
  switch (stream % 4) {
    case 0: {
      Eigen::Matrix4cd a;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = cplx(rng.normal(), rng.normal());
      Eigen::Matrix4cd rho = a * a.adjoint();
      return rho / rho.trace().real();
    }
    case 1: {
      const auto v = random_vector4();
      return v * v.adjoint();
    }
    case 2: {
      const Eigen::Matrix2cd a = qubit_density(random_ball_point(rng));
      const Eigen::Matrix2cd b = qubit_density(random_ball_point(rng));
      Eigen::Matrix4cd rho;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) rho(2 * i + p, 2 * j + q) = a(i, j) * b(p, q);
      return rho;
    }
    default: {
      const auto v = random_vector4();
      const double p = rng.uniform();
      return p * v * v.adjoint() + (1.0 - p) * Eigen::Matrix4cd::Identity() / 4.0;
    }
  }
}

OracleReport check_bsa_consistency(std::size_t samples, int effort, const std::vector<Vec3>& q_list,
                                   std::uint64_t seed) {
  const Lattice lattice = build_lattice({LatticeKind::chain, {2}, 1.0, Boundary::open});
  std::vector<double> margins(samples, std::numeric_limits<double>::infinity());
  parallel_for(samples, [&](std::size_t k) {
    const Eigen::Matrix4cd rho = sample_two_qubit_state(seed, k);
    const auto corr = correlators(SpinState::mixed(rho));
    const double upper = bsa_feasible_upper(rho, effort, splitmix64(seed ^ (k + 1))).upper;
    for (const auto& q : q_list) {
      const double e = spin_bound(structure_factor(corr, lattice, q).total);
      margins[k] = std::min(margins[k], upper - e);
    }
  });
  OracleReport r;
  r.suite = "bsa";
  r.seed = seed;
  r.samples = samples;
  r.tolerance = 1e-6;
  r.margin = samples ? *std::min_element(margins.begin(), margins.end()) : 0.0;
  r.pass = r.margin >= -r.tolerance;
  return r;
}

}  // namespace entbound
