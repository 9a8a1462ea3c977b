#pragma once

#include <array>
#include <filesystem>
#include <string>

// Values produced by dense_oracle.hpp and frozen here. The 8-site thermal
// numbers take ~30 s to regenerate, so only the small cases are recomputed
// in the unit tests.

namespace fixtures {

// 4-site open Heisenberg chain, J = 1, ground state.
inline constexpr double kChain4GroundEnergy = -6.4641016151377588;  // -(3 + 2 sqrt 3)
inline constexpr double kChain4SPi = 7.4641016151377579;            // 4 + 2 sqrt 3
inline constexpr double kChain4RawPi = -2.732050807568879;

// 8-site open Heisenberg chain, J = 1, thermal.
inline constexpr std::array<double, 4> kChain8Betas{2.0, 1.0, 0.5, 0.25};
inline constexpr std::array<double, 4> kChain8SPi{9.0337748518373182, 8.2647652244864442,
                                                  6.5780286637449068, 4.7853602132730035};
inline constexpr std::array<double, 4> kChain8SZero{0.11717585805523809, 0.44870306626974166,
                                                    1.0024602551816566, 1.765089185763643};

inline std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path dir = ENTBOUND_TEST_TMP;
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace fixtures
