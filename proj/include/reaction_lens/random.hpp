#pragma once

#include <cstdint>
#include <random>

namespace reaction_lens {

// mt19937_64 plus bounded draws that do not depend on the standard library's
// distribution implementations, so splits are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless method with rejection.
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
      const std::uint64_t x = engine_();
      const auto m = static_cast<unsigned __int128>(x) * n;
      if (static_cast<std::uint64_t>(m) >= threshold) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace reaction_lens
