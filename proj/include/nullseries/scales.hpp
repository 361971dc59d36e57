#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nullseries/common.hpp"

namespace nullseries {

/// Interval length scales of the construction.
///
/// sigma[0] = 1, sigma[n] = 1/(2^n log(n+2)) for n >= 1, and
/// tau[n] = (sigma[n-1] - 2 sigma[n]) / 12.  All logs are natural.
/// Each refinement of a rank-n interval carves two windows of lengths
/// (3+s) tau[n+1] and (3-s) tau[n+1] out of each half, which leaves a
/// middle interval of length sigma[n]/2 - 6 tau[n+1] = sigma[n+1].
struct ScaleSequence {
  int max_rank = 0;
  std::vector<double> sigma;  // sigma[n], n = 0..max_rank
  std::vector<double> tau;    // tau[n],   n = 1..max_rank (tau[0] = 0, unused)

  static ScaleSequence build(int max_rank) {
    if (max_rank < 2)
      throw std::invalid_argument("ScaleSequence: max_rank must be >= 2");
    if (max_rank > 60)
      throw std::invalid_argument("ScaleSequence: max_rank too large for binary64");
    ScaleSequence sc;
    sc.max_rank = max_rank;
    sc.sigma.resize(max_rank + 1);
    sc.tau.resize(max_rank + 1, 0.0);
    sc.sigma[0] = 1.0;
    for (int n = 1; n <= max_rank; ++n)
      sc.sigma[n] = 1.0 / (std::ldexp(1.0, n) * std::log(static_cast<double>(n) + 2.0));
    for (int n = 1; n <= max_rank; ++n) {
      sc.tau[n] = (sc.sigma[n - 1] - 2.0 * sc.sigma[n]) / 12.0;
      if (!(sc.tau[n] > 0.0))
        throw std::runtime_error("ScaleSequence: tau must be positive");
    }
    return sc;
  }

  // Gap identity residual sigma[n]/2 - 6 tau[n+1] - sigma[n+1]; algebraically
  // zero, and within a few ulps of zero in binary64.
  double gap_residual(int n) const {
    return sigma[n] / 2.0 - 6.0 * tau[n + 1] - sigma[n + 1];
  }

  // Total measure of K_n = 2^n sigma[n]; equals 1/log(n+2) for n >= 1.
  double measure(int n) const { return std::ldexp(1.0, n) * sigma[n]; }
};

/// Amplitude of the carve pieces created when refining rank n to n+1.
/// The factor n sqrt(log n) degenerates at n <= 1, where the guard value 1
/// applies; from n = 2 on the plain factor already exceeds 1.
inline double carve_amplitude(int n) {
  if (n <= 1) return 1.0;
  double v = static_cast<double>(n) * std::sqrt(std::log(static_cast<double>(n)));
  return v < 1.0 ? 1.0 : v;
}

}  // namespace nullseries
