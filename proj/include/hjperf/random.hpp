#pragma once

#include <cstdint>
#include <random>

namespace hjperf {

/// Seeded uniform sampler on [0,1). Built on mt19937_64 with an explicit
/// 53-bit conversion so the stream is identical across standard libraries.
class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hjperf
