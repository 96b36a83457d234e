#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace crnlab {

/// mt19937_64 seeded from (master seed, stream). Replica r of a run uses
/// stream r, so any replica can be reproduced on its own.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6372'6e6cu};
    engine_.seed(seq);
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace crnlab
