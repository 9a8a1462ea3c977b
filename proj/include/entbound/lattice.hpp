#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace entbound {

enum class LatticeKind { chain, square, cubic };
enum class Boundary { open, periodic };

/// Real-space vector; unused trailing components are zero.
using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

struct LatticeSpec {
  LatticeKind kind = LatticeKind::chain;
  std::vector<int> dims;
  double spacing = 1.0;
  Boundary boundary = Boundary::open;

  /// Throws Error(invalid_argument) when the invariants do not hold.
  void validate() const;
};

int dimension_of(LatticeKind kind);

/// Immutable lattice geometry. Sites are ordered row-major over their
/// integer coordinates (last axis fastest).
class Lattice {
 public:
  const LatticeSpec& spec() const { return spec_; }
  int dimension() const { return dimension_of(spec_.kind); }
  std::size_t size() const { return coords_.size(); }
  double spacing() const { return spec_.spacing; }

  const std::vector<std::array<int, 3>>& coordinates() const { return coords_; }
  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  /// Unordered nearest-neighbour bonds, each stored once with first < second.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbor_pairs() const {
    return pairs_;
  }
  std::vector<int> coordination_numbers() const;

  /// True when every site has z = 0.
  bool planar() const;

 private:
  friend Lattice build_lattice(const LatticeSpec& spec);

  LatticeSpec spec_;
  std::vector<std::array<int, 3>> coords_;
  std::vector<Vec3> positions_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

Lattice build_lattice(const LatticeSpec& spec);

struct QGrid {
  std::vector<Vec3> points;
  std::vector<int> shape;  // points per axis, row-major like the lattice
  int dimension = 1;
};

/// Tensor grid of `resolution[k]` evenly spaced points per axis covering
/// [-pi/a, pi/a] with both endpoints. q = 0 is on the grid for odd resolutions.
QGrid q_grid(const Lattice& lattice, const std::vector<int>& resolution);

/// Evenly spaced values including both endpoints.
std::vector<double> linspace(double lo, double hi, int count);

LatticeSpec lattice_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LatticeSpec& spec);

std::string to_string(LatticeKind kind);
std::string to_string(Boundary boundary);

}  // namespace entbound
