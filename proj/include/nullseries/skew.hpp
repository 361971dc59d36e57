#pragma once

#include <cstdint>

#include "nullseries/common.hpp"

namespace nullseries {

/// Reproducible skew samples s(n,k) in [0,1), one per interval of the
/// skeleton.  Counter-based: the value is a pure function of
/// (seed, rank, index), so no state is stored and lookups are safe from
/// any thread.  The same seed reproduces the same skeleton bit for bit.
class SkewSample {
 public:
  explicit SkewSample(uint64_t seed) : seed_(seed) {}

  /// Degenerate sample with s(n,k) = s everywhere (symmetry tests and the
  /// centered-children geometry use s = 0).
  static SkewSample constant(double s) {
    SkewSample sk(0);
    sk.constant_ = true;
    sk.cval_ = s;
    return sk;
  }

  double value(int rank, uint64_t index) const {
    if (constant_) return cval_;
    uint64_t h = splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(rank)));
    h = splitmix64(h ^ (0xC2B2AE3D27D4EB4FULL * (index + 1)));
    return u64_to_unit(h);
  }

  uint64_t seed() const { return seed_; }
  bool is_constant() const { return constant_; }

 private:
  uint64_t seed_;
  bool constant_ = false;
  double cval_ = 0.0;
};

}  // namespace nullseries
