#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entbound/datasets.hpp"
#include "entbound/lattice.hpp"
#include "entbound/spin_sim.hpp"
#include "entbound/tof_model.hpp"

namespace entbound {

/// Structure-factor values below this are invalid data.
inline constexpr double kNegativeSTolerance = 1e-9;

enum class MaskReason { ok, f_floor, negative_s, negative_n, missing_data };

std::string_view to_string(MaskReason reason);
std::optional<MaskReason> mask_reason_from_string(std::string_view text);

enum class BoundKind { spin, boson };

struct BoundPoint {
  std::vector<double> coords;  // (qx, qy[, qz]) or (x, y)
  double observable = 0.0;     // S(q) or n(x, y)
  double f = 0.0;              // envelope; boson maps only
  std::optional<double> raw;   // pre-clamp witness margin
  std::optional<double> value; // E = max(0, raw); absent when masked
  MaskReason mask = MaskReason::ok;
};

struct BoundMap {
  BoundKind kind = BoundKind::spin;
  int coord_dim = 2;
  std::vector<BoundPoint> points;
  /// Header comment lines (without the leading "# "), preserved on round-trip.
  std::vector<std::string> comments;

  std::size_t masked_count() const;
  bool all_masked() const { return !points.empty() && masked_count() == points.size(); }
  /// Index of the largest E among unmasked points.
  std::optional<std::size_t> argmax() const;
};

/// 1 - S/2, the negated witness expectation <S(q)/2 - 1>.
double spin_bound_raw(double s);
/// E = max{0, 1 - S/2}. Throws Error(validation) for S < -1e-9 or non-finite S.
double spin_bound(double s);

BoundMap spin_bound_map(const StructureFactorGrid& grid);
BoundMap spin_bound_map(const SqDataset& data);

/// Witness expectation evaluated on a product state from its Bloch vectors:
/// (1/2M) sum_{i,a} (1 - b_ia^2) - 1 + (1/2M) sum_a |sum_i e^{i q.r_i} b_ia|^2.
double product_witness_expectation(const Vec3& q, std::span<const std::array<double, 3>> bloch,
                                   const Lattice& lattice);

/// n_val may dip below zero by rounding; beyond this fraction of f * max(N, 1) it is rejected.
inline constexpr double kNegativeNTolerance = 1e-9;

/// N_mean - n/f before clamping.
double boson_bound_raw(double n_val, double f_val, double mean_number);
/// E = max{0, N_mean - n/f}. Throws Error(validation) when f <= f_floor,
/// n is negative beyond rounding, or N_mean < 0.
double boson_bound(double n_val, double f_val, double mean_number, double f_floor = 0.0);

struct BosonBoundOptions {
  /// Mask pixels with f <= f_floor_relative * max f on the grid.
  double f_floor_relative = 1e-6;
  /// Overrides the image and calibration values when set.
  std::optional<double> mean_number;
};

/// Resolves <N>: explicit override, then image metadata, then calibration.
double resolve_mean_number(const TofImage& image, const TofCalibration& calib,
                           const std::optional<double>& override_value = std::nullopt);

BoundMap boson_bound_map(const TofImage& image, const TofCalibration& calib,
                         const BosonBoundOptions& options = {});

}  // namespace entbound
