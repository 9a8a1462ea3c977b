#include "entbound/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "entbound/error.hpp"

namespace entbound {

int dimension_of(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::chain: return 1;
    case LatticeKind::square: return 2;
    case LatticeKind::cubic: return 3;
  }
  return 1;
}

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::chain: return "chain";
    case LatticeKind::square: return "square";
    case LatticeKind::cubic: return "cubic";
  }
  return "chain";
}

std::string to_string(Boundary boundary) {
  return boundary == Boundary::open ? "open" : "periodic";
}

void LatticeSpec::validate() const {
  const int d = dimension_of(kind);
  if (static_cast<int>(dims.size()) != d) {
    throw Error(ErrorCode::invalid_argument,
                "lattice '" + to_string(kind) + "' needs " + std::to_string(d) +
                    " dims, got " + std::to_string(dims.size()));
  }
  for (int n : dims) {
    if (n <= 0) throw Error(ErrorCode::invalid_argument, "lattice dims must be positive");
    if (boundary == Boundary::periodic && n < 3) {
      throw Error(ErrorCode::invalid_argument,
                  "periodic boundary needs every dim >= 3 (got " + std::to_string(n) + ")");
    }
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw Error(ErrorCode::invalid_argument, "lattice spacing must be positive and finite");
  }
}

Lattice build_lattice(const LatticeSpec& spec) {
  spec.validate();
  Lattice lat;
  lat.spec_ = spec;
  const int d = dimension_of(spec.kind);

  std::array<int, 3> extent{1, 1, 1};
  for (int k = 0; k < d; ++k) extent[k] = spec.dims[k];

  auto index_of = [&](const std::array<int, 3>& c) {
    return static_cast<std::size_t>((c[0] * extent[1] + c[1]) * extent[2] + c[2]);
  };

  for (int x = 0; x < extent[0]; ++x)
    for (int y = 0; y < extent[1]; ++y)
      for (int z = 0; z < extent[2]; ++z) {
        lat.coords_.push_back({x, y, z});
        lat.positions_.push_back({spec.spacing * x, spec.spacing * y, spec.spacing * z});
      }

  std::set<std::pair<std::size_t, std::size_t>> bonds;
  for (const auto& c : lat.coords_) {
    for (int k = 0; k < d; ++k) {
      auto n = c;
      n[k] += 1;
      if (n[k] >= extent[k]) {
        if (spec.boundary == Boundary::open) continue;
        n[k] = 0;
      }
      const auto a = index_of(c);
      const auto b = index_of(n);
      bonds.insert({std::min(a, b), std::max(a, b)});
    }
  }
  lat.pairs_.assign(bonds.begin(), bonds.end());
  return lat;
}

std::vector<int> Lattice::coordination_numbers() const {
  std::vector<int> z(size(), 0);
  for (const auto& [i, j] : pairs_) {
    ++z[i];
    ++z[j];
  }
  return z;
}

bool Lattice::planar() const {
  return std::all_of(positions_.begin(), positions_.end(),
                     [](const Vec3& r) { return r[2] == 0.0; });
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int k = 0; k < count; ++k) {
    // symmetric evaluation so that the midpoint of a symmetric range is exactly 0
    const double t = static_cast<double>(k) / (count - 1);
    out[k] = lo * (1.0 - t) + hi * t;
  }
  if (lo == -hi && count % 2 == 1) out[count / 2] = 0.0;
  return out;
}

QGrid q_grid(const Lattice& lattice, const std::vector<int>& resolution) {
  const int d = lattice.dimension();
  if (static_cast<int>(resolution.size()) != d) {
    throw Error(ErrorCode::invalid_argument, "q-grid resolution must have one entry per axis");
  }
  for (int r : resolution) {
    if (r < 2) throw Error(ErrorCode::invalid_argument, "q-grid resolution must be >= 2");
  }
  const double qmax = std::numbers::pi / lattice.spacing();
  std::array<std::vector<double>, 3> axes{std::vector<double>{0.0}, std::vector<double>{0.0},
                                          std::vector<double>{0.0}};
  for (int k = 0; k < d; ++k) axes[k] = linspace(-qmax, qmax, resolution[k]);

  QGrid grid;
  grid.dimension = d;
  grid.shape = resolution;
  for (double qx : axes[0])
    for (double qy : axes[1])
      for (double qz : axes[2]) grid.points.push_back({qx, qy, qz});
  return grid;
}

LatticeSpec lattice_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::format, "lattice JSON must be an object");
  static const std::set<std::string> known{"kind", "dims", "spacing", "boundary"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw Error(ErrorCode::format, "unknown lattice field '" + key + "'");
  }
  for (const auto& key : known) {
    if (!j.contains(key)) throw Error(ErrorCode::format, "lattice JSON missing '" + key + "'");
  }

  LatticeSpec spec;
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "chain") spec.kind = LatticeKind::chain;
    else if (kind == "square") spec.kind = LatticeKind::square;
    else if (kind == "cubic") spec.kind = LatticeKind::cubic;
    else throw Error(ErrorCode::format, "unknown lattice kind '" + kind + "'");

    spec.dims = j.at("dims").get<std::vector<int>>();
    spec.spacing = j.at("spacing").get<double>();

    const auto boundary = j.at("boundary").get<std::string>();
    if (boundary == "open") spec.boundary = Boundary::open;
    else if (boundary == "periodic") spec.boundary = Boundary::periodic;
    else throw Error(ErrorCode::format, "unknown boundary '" + boundary + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, std::string("lattice JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json to_json(const LatticeSpec& spec) {
  return {{"kind", to_string(spec.kind)},
          {"dims", spec.dims},
          {"spacing", spec.spacing},
          {"boundary", to_string(spec.boundary)}};
}

}  // namespace entbound
