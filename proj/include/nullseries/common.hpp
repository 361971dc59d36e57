#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nullseries {

using cplx = std::complex<double>;

inline constexpr double TWO_PI = 6.283185307179586476925286766559;

// e(x) = exp(2*pi*i*x); the circle is parametrized by [0,1).
inline cplx unit_circle(double x) {
  return {std::cos(TWO_PI * x), std::sin(TWO_PI * x)};
}

inline double frac(double x) {
  double f = x - std::floor(x);
  return (f >= 1.0) ? 0.0 : f;
}

// Circular distance on [0,1).
inline double circ_dist(double a, double b) {
  double d = std::fabs(frac(a) - frac(b));
  return std::min(d, 1.0 - d);
}

// Euclidean (chord) distance from z to the boundary point e(x).
inline double chord_dist(cplx z, double x) { return std::abs(z - unit_circle(x)); }

// Compensated (Neumaier) summation.
struct NeumaierSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    double t = s + v;
    if (std::fabs(s) >= std::fabs(v))
      c += (s - t) + v;
    else
      c += (v - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

struct NeumaierSumC {
  NeumaierSum re, im;
  void add(cplx v) {
    re.add(v.real());
    im.add(v.imag());
  }
  cplx value() const { return {re.value(), im.value()}; }
};

// SplitMix64; used both as a stream generator and as the (n,k) -> [0,1)
// counter-based hash behind the skew samples.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline double u64_to_unit(uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next() { return splitmix64(state_++); }
  double next_unit() { return u64_to_unit(next()); }

 private:
  uint64_t state_;
};

// FNV-1a, used for config and output-file hashes in run manifests.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xCBF29CE484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

inline std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Exact hex-float round trip for serialized endpoints.
inline std::string to_hexfloat(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline double from_hexfloat(const std::string& s) {
  return std::strtod(s.c_str(), nullptr);
}

// Deterministic parallel map: fn(i) writes only to slot i of its output.
// Results are independent of the worker count.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min<int>(jobs, hw ? static_cast<int>(hw) : 2);
  workers = std::min<int>(workers, static_cast<int>(n));
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) break;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) err = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && err) std::rethrow_exception(err);
}

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

}  // namespace nullseries
