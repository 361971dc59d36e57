#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nullseries/common.hpp"
#include "nullseries/scales.hpp"
#include "nullseries/skew.hpp"

namespace nullseries {

/// The nested family of rank-n intervals I(n,k), 0 <= k < 2^n, on the circle
/// [0,1).  Refining I(n,k) splits it into two halves; inside each half a
/// left window of length (3+s) tau[n+1] and a right window of length
/// (3-s) tau[n+1] are carved off, and the remaining middle of length
/// sigma[n+1] is the child interval.  The skew s = s(n+1, 2k+half) shifts
/// the child inside its half without changing its length.
///
/// Immutable after build; all queries are const and thread-safe.
class IntervalSkeleton {
 public:
  static constexpr int MAX_BUILD_RANK = 23;

  static IntervalSkeleton build(uint64_t seed, int max_rank) {
    return build_with(SkewSample(seed), max_rank);
  }

  static IntervalSkeleton build_constant_skew(double s, int max_rank) {
    return build_with(SkewSample::constant(s), max_rank);
  }

  static IntervalSkeleton build_with(SkewSample skew, int max_rank) {
    if (max_rank < 2) throw std::invalid_argument("IntervalSkeleton: max_rank must be >= 2");
    if (max_rank > MAX_BUILD_RANK)
      throw std::invalid_argument("IntervalSkeleton: max_rank exceeds build cap");
    IntervalSkeleton sk(skew, max_rank);
    sk.materialize();
    return sk;
  }

  int rank() const { return rank_; }
  uint64_t seed() const { return skew_.seed(); }
  const ScaleSequence& scales() const { return scales_; }
  const SkewSample& skew() const { return skew_; }

  double sigma(int n) const { return scales_.sigma[n]; }
  double tau(int n) const { return scales_.tau[n]; }

  double left(int n, uint64_t k) const { return lefts_[n][k]; }
  double right(int n, uint64_t k) const { return lefts_[n][k] + scales_.sigma[n]; }
  double mid(int n, uint64_t k) const { return lefts_[n][k] + 0.5 * scales_.sigma[n]; }
  uint64_t count(int n) const { return uint64_t(1) << n; }

  /// Geometry of the refinement of one half of I(n,k); valid for n < rank().
  struct HalfWindows {
    double s = 0.0;
    double base = 0.0;      // left end of the half
    double half_hi = 0.0;   // right end of the half
    double wl_lo = 0.0, wl_hi = 0.0;        // left carve window
    double child_lo = 0.0, child_hi = 0.0;  // I(n+1, 2k+half)
    double wr_lo = 0.0, wr_hi = 0.0;        // right carve window
    uint64_t child_index = 0;
  };

  HalfWindows half_windows(int n, uint64_t k, int half) const {
    HalfWindows w;
    uint64_t ck = 2 * k + half;
    w.child_index = ck;
    w.s = skew_.value(n + 1, ck);
    double l = lefts_[n][k];
    w.base = half == 0 ? l : l + 0.5 * scales_.sigma[n];
    w.half_hi = half == 0 ? l + 0.5 * scales_.sigma[n] : l + scales_.sigma[n];
    w.child_lo = lefts_[n + 1][ck];
    w.child_hi = w.child_lo + scales_.sigma[n + 1];
    w.wl_lo = w.base;
    w.wl_hi = w.child_lo;
    w.wr_lo = w.child_hi;
    w.wr_hi = w.half_hi;
    return w;
  }

  /// Index of the rank-n interval containing x, or -1 if x lies in a gap.
  long long locate(int n, double x) const {
    const auto& L = lefts_[n];
    auto it = std::upper_bound(L.begin(), L.end(), x);
    if (it == L.begin()) return -1;
    size_t k = static_cast<size_t>(it - L.begin()) - 1;
    return (x <= L[k] + scales_.sigma[n]) ? static_cast<long long>(k) : -1;
  }

  /// Euclidean distance from a point of the closed disk to the arc union K_n.
  double distance_to_Kn(cplx z, int n) const {
    double r = std::abs(z);
    if (r == 0.0) return 1.0;
    double th = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
    const auto& L = lefts_[n];
    double sg = scales_.sigma[n];
    auto it = std::upper_bound(L.begin(), L.end(), th);
    size_t k_lo = (it == L.begin()) ? L.size() - 1 : static_cast<size_t>(it - L.begin()) - 1;
    size_t k_hi = (it == L.end()) ? 0 : static_cast<size_t>(it - L.begin());
    // inside the predecessor's angular span: closest arc point shares the angle
    if (it != L.begin() && th <= L[k_lo] + sg) return std::fabs(r - 1.0);
    double d = std::min(chord_dist(z, L[k_lo] + sg), chord_dist(z, L[k_hi]));
    return d;
  }

  /// Distance to the countable singular set Q (endpoints and midpoints of
  /// every interval of rank <= rank()).
  double distance_to_Q(cplx z) const {
    double r = std::abs(z);
    if (r == 0.0) return 1.0;
    double th = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= rank_; ++n) {
      const auto& L = lefts_[n];
      auto it = std::upper_bound(L.begin(), L.end(), th);
      size_t k = (it == L.begin()) ? L.size() - 1 : static_cast<size_t>(it - L.begin()) - 1;
      for (size_t kk : {k == 0 ? L.size() - 1 : k - 1, k, (k + 1) % L.size()}) {
        double l = L[kk];
        for (double p : {l, l + 0.5 * scales_.sigma[n], l + scales_.sigma[n]})
          best = std::min(best, chord_dist(z, p));
      }
      if (it == L.end() && !L.empty())
        for (double p : {L[0], L[0] + 0.5 * scales_.sigma[n], L[0] + scales_.sigma[n]})
          best = std::min(best, chord_dist(z, p));
    }
    return best;
  }

  /// Distance to K' = K \cup Q, with K represented by K_{rank()}.
  double distance_to_Kprime(cplx z) const {
    return std::min(distance_to_Kn(z, rank_), distance_to_Q(z));
  }

  /// True if x is exactly one of the singular points introduced at ranks
  /// <= n (interval endpoints and midpoints).
  bool is_singular(double x, int n) const {
    for (int j = 0; j <= std::min(n, rank_); ++j) {
      long long k = locate(j, x);
      if (k < 0) return false;  // already in a gap; deeper ranks add nothing at x
      double l = lefts_[j][k];
      if (x == l || x == l + scales_.sigma[j] || x == l + 0.5 * scales_.sigma[j])
        return true;
    }
    return false;
  }

 private:
  IntervalSkeleton(SkewSample skew, int max_rank)
      : scales_(ScaleSequence::build(max_rank)), skew_(skew), rank_(max_rank) {}

  void materialize() {
    lefts_.resize(rank_ + 1);
    std::vector<double> hi{0.0}, lo{0.0};
    lefts_[0] = {0.0};
    for (int n = 0; n < rank_; ++n) {
      size_t cnt = hi.size();
      std::vector<double> nhi(2 * cnt), nlo(2 * cnt);
      double half = 0.5 * scales_.sigma[n];
      double t = scales_.tau[n + 1];
      for (size_t k = 0; k < cnt; ++k) {
        for (int h = 0; h < 2; ++h) {
          uint64_t ck = 2 * k + h;
          double off = (h == 0 ? 0.0 : half) + (3.0 + skew_.value(n + 1, ck)) * t;
          // compensated accumulation of the endpoint chain
          double a = hi[k], b = off;
          double s = a + b, bv = s - a, err = (a - (s - bv)) + (b - bv);
          nhi[ck] = s;
          nlo[ck] = lo[k] + err;
        }
      }
      lefts_[n + 1].resize(2 * cnt);
      for (size_t i = 0; i < 2 * cnt; ++i) lefts_[n + 1][i] = nhi[i] + nlo[i];
      hi.swap(nhi);
      lo.swap(nlo);
    }
  }

  ScaleSequence scales_;
  SkewSample skew_;
  int rank_;
  std::vector<std::vector<double>> lefts_;
};

}  // namespace nullseries
