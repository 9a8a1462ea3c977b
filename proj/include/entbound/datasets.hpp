#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "entbound/lattice.hpp"

namespace entbound {

/// Measured or simulated structure factor samples.
struct SqDataset {
  int dimension = 1;
  std::vector<Vec3> q;
  std::vector<double> s;
  std::vector<double> sigma;  // empty when the source had no uncertainty column
  std::vector<std::size_t> lines;
  std::vector<std::string> comments;

  std::size_t size() const { return q.size(); }
};

/// Column-integrated density on a rectangular detector grid. Values are
/// row-major with x fastest: values[iy * nx + ix].
struct TofImage {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> values;
  /// Coordinates are transverse momenta (kx, ky) rather than positions.
  bool k_space = false;
  std::optional<double> mean_atom_number;
  std::vector<std::string> comments;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

}  // namespace entbound
