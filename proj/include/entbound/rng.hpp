#pragma once

#include <cstdint>
#include <random>

namespace entbound {

std::uint64_t splitmix64(std::uint64_t x);

/// Per-sample random stream derived from (suite seed, sample index). Streams
/// are independent of evaluation order, so parallel sampling is reproducible.
/// Distributions are implemented here rather than taken from <random> so the
/// draws are identical across standard libraries.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace entbound
