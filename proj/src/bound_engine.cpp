#include "entbound/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "entbound/error.hpp"
#include "entbound/parallel.hpp"

namespace entbound {

std::string_view to_string(MaskReason reason) {
  switch (reason) {
    case MaskReason::ok: return "ok";
    case MaskReason::f_floor: return "f-floor";
    case MaskReason::negative_s: return "negative-S";
    case MaskReason::negative_n: return "negative-n";
    case MaskReason::missing_data: return "missing-data";
  }
  return "ok";
}

std::optional<MaskReason> mask_reason_from_string(std::string_view text) {
  for (auto r : {MaskReason::ok, MaskReason::f_floor, MaskReason::negative_s,
                 MaskReason::negative_n, MaskReason::missing_data}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::size_t BoundMap::masked_count() const {
  return static_cast<std::size_t>(std::count_if(
      points.begin(), points.end(), [](const BoundPoint& p) { return p.mask != MaskReason::ok; }));
}

std::optional<std::size_t> BoundMap::argmax() const {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].value) continue;
    if (!best || *points[k].value > *points[*best].value) best = k;
  }
  return best;
}

double spin_bound_raw(double s) { return 1.0 - 0.5 * s; }

double spin_bound(double s) {
  if (!std::isfinite(s)) throw Error(ErrorCode::validation, "structure factor is not finite");
  if (s < -kNegativeSTolerance) {
    throw Error(ErrorCode::validation,
                "negative structure factor " + std::to_string(s) + " is not a valid datum");
  }
  return std::max(0.0, spin_bound_raw(s));
}

namespace {

BoundPoint spin_point(const Vec3& q, int dim, double s) {
  BoundPoint p;
  p.coords.assign(q.begin(), q.begin() + std::max(dim, 2));
  p.observable = s;
  p.f = std::nan("");
  if (!std::isfinite(s)) {
    p.mask = MaskReason::missing_data;
  } else if (s < -kNegativeSTolerance) {
    p.mask = MaskReason::negative_s;
  } else {
    p.raw = spin_bound_raw(s);
    p.value = std::max(0.0, *p.raw);
  }
  return p;
}

}  // namespace

BoundMap spin_bound_map(const StructureFactorGrid& grid) {
  BoundMap map;
  map.kind = BoundKind::spin;
  map.coord_dim = std::max(grid.dimension, 2);
  for (std::size_t k = 0; k < grid.q.size(); ++k) {
    map.points.push_back(spin_point(grid.q[k], grid.dimension, grid.s[k]));
  }
  return map;
}

BoundMap spin_bound_map(const SqDataset& data) {
  StructureFactorGrid grid;
  grid.dimension = data.dimension;
  grid.q = data.q;
  grid.s = data.s;
  return spin_bound_map(grid);
}

double product_witness_expectation(const Vec3& q, std::span<const std::array<double, 3>> bloch,
                                   const Lattice& lattice) {
  const std::size_t m = lattice.size();
  if (bloch.size() != m) {
    throw Error(ErrorCode::invalid_argument, "one Bloch vector per site required");
  }
  double local = 0.0;
  std::array<std::complex<double>, 3> fourier{};
  for (std::size_t i = 0; i < m; ++i) {
    const auto& b = bloch[i];
    const double norm2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
    if (norm2 > 1.0 + 1e-12) {
      throw Error(ErrorCode::validation, "Bloch vector longer than 1 at site " + std::to_string(i));
    }
    const auto phase = std::polar(1.0, dot(q, lattice.position(i)));
    for (int a = 0; a < 3; ++a) {
      local += 1.0 - b[a] * b[a];
      fourier[a] += phase * b[a];
    }
  }
  double coherent = 0.0;
  for (const auto& c : fourier) coherent += std::norm(c);
  const double inv = 1.0 / (2.0 * static_cast<double>(m));
  return inv * local - 1.0 + inv * coherent;
}

double boson_bound_raw(double n_val, double f_val, double mean_number) {
  return mean_number - n_val / f_val;
}

double boson_bound(double n_val, double f_val, double mean_number, double f_floor) {
  if (!(f_val > f_floor) || !(f_val > 0.0)) {
    throw Error(ErrorCode::validation, "envelope f at or below the floor; ratio n/f unreliable");
  }
  if (!(mean_number >= 0.0)) throw Error(ErrorCode::validation, "mean atom number must be >= 0");
  if (!std::isfinite(n_val) ||
      n_val < -kNegativeNTolerance * f_val * std::max(mean_number, 1.0)) {
    throw Error(ErrorCode::validation, "negative column density " + std::to_string(n_val));
  }
  return std::max(0.0, boson_bound_raw(n_val, f_val, mean_number));
}

double resolve_mean_number(const TofImage& image, const TofCalibration& calib,
                           const std::optional<double>& override_value) {
  if (override_value) return *override_value;
  if (image.mean_atom_number) return *image.mean_atom_number;
  if (calib.mean_atom_number) return *calib.mean_atom_number;
  throw Error(ErrorCode::missing_data,
              "mean atom number missing from both image metadata and calibration");
}

BoundMap boson_bound_map(const TofImage& image, const TofCalibration& calib,
                         const BosonBoundOptions& options) {
  if (image.xs.size() != image.nx || image.ys.size() != image.ny ||
      image.values.size() != image.nx * image.ny) {
    throw Error(ErrorCode::grid_mismatch, "image grid is inconsistent");
  }
  const double mean = resolve_mean_number(image, calib, options.mean_number);

  BoundMap map;
  map.kind = BoundKind::boson;
  map.coord_dim = 2;
  map.points.resize(image.values.size());
  double f_max = 0.0;
  for (std::size_t iy = 0; iy < image.ny; ++iy) {
    for (std::size_t ix = 0; ix < image.nx; ++ix) {
      auto& p = map.points[iy * image.nx + ix];
      double x = image.xs[ix];
      double y = image.ys[iy];
      if (image.k_space) std::tie(x, y) = position_from_k(x, y, calib);
      p.coords = {image.xs[ix], image.ys[iy]};
      p.observable = image.at(ix, iy);
      p.f = tof_envelope(x, y, calib);
      f_max = std::max(f_max, p.f);
    }
  }
  const double floor = options.f_floor_relative * f_max;
  for (auto& p : map.points) {
    if (!std::isfinite(p.observable)) {
      p.mask = MaskReason::missing_data;
    } else if (!(p.f > floor) || !(p.f > 0.0)) {
      p.mask = MaskReason::f_floor;
    } else if (p.observable < -kNegativeNTolerance * p.f * std::max(mean, 1.0)) {
      p.mask = MaskReason::negative_n;
    } else {
      p.raw = boson_bound_raw(p.observable, p.f, mean);
      p.value = std::max(0.0, *p.raw);
    }
  }
  return map;
}

}  // namespace entbound
