#pragma once

#include <cstdint>
#include <random>

namespace legtherm {

std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream seed for item `index` under `master`; a pure function of both,
/// so results never depend on which worker runs the item.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace legtherm
