#pragma once

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "nullseries/quadrature.hpp"

namespace nullseries {

// ---------------------------------------------------------------------------
// The carve profile l on (0,1]:
//
//   l(x) = -log^2 x            for x < 1/3
//   l(x) = -1                  for x >= 1/e
//   bridge on [1/3, 1/e]:      l(x) = -1 - w(x) (log^2 x - 1)
//
// with w = 1 - h(t), t the affine map of [1/3, 1/e] onto [0,1] and
// h(t) = phi(t)/(phi(t)+phi(1-t)), phi(t) = exp(-1/t).  The blend weight dies
// flat at both junctions, so l is C-infinity; on the bridge log^2 x - 1 > 0,
// which keeps l <= -1 everywhere.  The bridge window ends at 1/e, the point
// where -log^2 x itself reaches -1: a blend on any wider window would
// necessarily cross above -1.
// ---------------------------------------------------------------------------

namespace carve_detail {

inline constexpr double BRIDGE_LO = 1.0 / 3.0;
inline const double BRIDGE_HI = std::exp(-1.0);

inline double phi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
inline double phi1(double t) {
  return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}
inline double phi2(double t) {
  if (t <= 0.0) return 0.0;
  double it = 1.0 / t;
  return std::exp(-it) * (it * it * it * it - 2.0 * it * it * it);
}

inline double blend_h(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = phi(t), b = phi(1.0 - t);
  return a / (a + b);
}

inline double blend_h1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = phi(t), b = phi(1.0 - t);
  double n = phi1(t) * b + a * phi1(1.0 - t);
  double d = a + b;
  return n / (d * d);
}

inline double blend_h2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  double a = phi(t), b = phi(1.0 - t);
  double N = phi1(t) * b + a * phi1(1.0 - t);
  double Np = phi2(t) * b - a * phi2(1.0 - t);
  double D = (a + b) * (a + b);
  double Dp = 2.0 * (a + b) * (phi1(t) - phi1(1.0 - t));
  return (Np * D - N * Dp) / (D * D);
}

}  // namespace carve_detail

inline double carve_l_unchecked(double x) {
  using namespace carve_detail;
  if (x < BRIDGE_LO) {
    double lg = std::log(x);
    return -lg * lg;
  }
  if (x >= BRIDGE_HI) return -1.0;
  double t = (x - BRIDGE_LO) / (BRIDGE_HI - BRIDGE_LO);
  double w = 1.0 - blend_h(t);
  double lg = std::log(x);
  return -1.0 - w * (lg * lg - 1.0);
}

/// The op-level profile evaluator; domain (0, 1].
inline double carve_l(double x) {
  if (!(x > 0.0) || x > 1.0) throw std::domain_error("carve_l: x outside (0,1]");
  return carve_l_unchecked(x);
}

inline double carve_l_d1(double x) {
  using namespace carve_detail;
  if (x < BRIDGE_LO) return -2.0 * std::log(x) / x;
  if (x >= BRIDGE_HI) return 0.0;
  double lam = 1.0 / (BRIDGE_HI - BRIDGE_LO);
  double t = (x - BRIDGE_LO) * lam;
  double w = 1.0 - blend_h(t);
  double wp = -blend_h1(t) * lam;
  double lg = std::log(x);
  return -wp * (lg * lg - 1.0) - w * (2.0 * lg / x);
}

inline double carve_l_d2(double x) {
  using namespace carve_detail;
  if (x < BRIDGE_LO) return -2.0 * (1.0 - std::log(x)) / (x * x);
  if (x >= BRIDGE_HI) return 0.0;
  double lam = 1.0 / (BRIDGE_HI - BRIDGE_LO);
  double t = (x - BRIDGE_LO) * lam;
  double w = 1.0 - blend_h(t);
  double wp = -blend_h1(t) * lam;
  double wpp = -blend_h2(t) * lam * lam;
  double lg = std::log(x);
  double g = lg * lg - 1.0, gp = 2.0 * lg / x, gpp = 2.0 * (1.0 - lg) / (x * x);
  return -wpp * g - 2.0 * wp * gp - w * gpp;
}

/// D-th derivative of l; analytic for D <= 2, Richardson differences of
/// l'' above that (only band-style audits consume D = 3, 4).
inline double carve_l_dn(double x, int D) {
  switch (D) {
    case 0: return carve_l_unchecked(x);
    case 1: return carve_l_d1(x);
    case 2: return carve_l_d2(x);
    default: break;
  }
  if (D > 4) throw std::invalid_argument("carve_l_dn: D > 4 unsupported");
  double h = 1e-4 * std::max(x, 0.05);
  h = std::min(h, 0.45 * x);
  auto d1 = [&](double step) {
    if (D == 3) return (carve_l_d2(x + step) - carve_l_d2(x - step)) / (2.0 * step);
    return (carve_l_d2(x + step) - 2.0 * carve_l_d2(x) + carve_l_d2(x - step)) /
           (step * step);
  };
  double c1 = d1(h), c2 = d1(h / 2.0);
  return (4.0 * c2 - c1) / 3.0;
}

// ---------------------------------------------------------------------------
// l^{+-}(x; s): the full carve window profile on (0, 3+-s], with log^2
// singularities at both ends and a -1 flat in the middle.
// ---------------------------------------------------------------------------
inline double carve_l_pm(double x, double s, int sign) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("carve_l_pm: s outside [0,1]");
  if (sign != 1 && sign != -1) throw std::invalid_argument("carve_l_pm: sign");
  double c = 3.0 + sign * s;
  if (x <= 0.0 || x > c) return 0.0;
  if (x <= 1.0) return carve_l_unchecked(x);
  if (x <= c - 1.0) return -1.0;
  return carve_l_unchecked(c - x);
}

inline double carve_l_pm_dn(double x, double s, int sign, int D) {
  double c = 3.0 + sign * s;
  if (x <= 0.0 || x >= c) return 0.0;
  if (x <= 1.0) return carve_l_dn(x, D);
  if (x <= c - 1.0) return D == 0 ? -1.0 : 0.0;
  double v = carve_l_dn(c - x, D);
  return (D % 2 == 0) ? v : -v;
}

// ---------------------------------------------------------------------------
// Cached scalar tables: monomial moments of l and the principal-value
// Hilbert transform H1(xi) = pv Int_0^1 l(u)/(xi-u) du.
// ---------------------------------------------------------------------------

inline constexpr int CARVE_MOMENT_MAX = 12;

namespace carve_detail {

struct MomentTable {
  std::array<double, CARVE_MOMENT_MAX + 1> m{};
  MomentTable() {
    QuadOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-14;
    for (int q = 0; q <= CARVE_MOMENT_MAX; ++q) {
      auto head = integrate_log_end(
          [q](double v) { return std::pow(v, q) * carve_l_unchecked(v); }, BRIDGE_LO,
          opt);
      auto tail = integrate([q](double v) { return std::pow(v, q) * carve_l_unchecked(v); },
                            BRIDGE_LO, 1.0, opt, std::array<double, 1>{BRIDGE_HI});
      m[q] = head.value + tail.value;
    }
  }
};

inline const MomentTable& moment_table() {
  static MomentTable t;
  return t;
}

}  // namespace carve_detail

/// m_q = Int_0^1 u^q l(u) du.
inline double carve_moment(int q) {
  if (q < 0 || q > CARVE_MOMENT_MAX) throw std::invalid_argument("carve_moment: q");
  return carve_detail::moment_table().m[q];
}

/// L = Int_0^1 l.
inline double carve_integral() { return carve_moment(0); }

/// Int_0^{3+-s} u^q l^{+-}(u; s) du, assembled from the l moments and the
/// closed forms of the flat and mirrored branches.
inline double carve_pm_moment(int q, double s, int sign) {
  double c = 3.0 + sign * s;
  double flat = -(std::pow(c - 1.0, q + 1) - 1.0) / (q + 1);
  double mirror = 0.0;
  for (int i = 0; i <= q; ++i) {
    double term = binomial(q, i) * std::pow(c, q - i) * carve_moment(i);
    mirror += (i % 2 == 0) ? term : -term;
  }
  return carve_moment(q) + flat + mirror;
}

/// Int l^{+-}(u; s) du by singularity-aware quadrature (the route the
/// plateau solver takes; analytically this equals 2L - (1 -+ ... ) with the
/// skew canceling in the +/- pair).
inline double carve_pm_integral_quad(double s, int sign, double tol = 1e-12) {
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = tol;
  double c = 3.0 + sign * s;
  auto head = integrate_log_end([](double v) { return carve_l_unchecked(v); },
                                carve_detail::BRIDGE_LO, opt);
  auto bridge = integrate([](double v) { return carve_l_unchecked(v); },
                          carve_detail::BRIDGE_LO, 1.0, opt,
                          std::array<double, 1>{carve_detail::BRIDGE_HI});
  double one_l = head.value + bridge.value;
  double flat = -((c - 1.0) - 1.0);
  return 2.0 * one_l + flat;
}

// ---------------------------------------------------------------------------
// Tabulated Hilbert transform of the carve profile,
//   H1(xi) = pv Int_0^1 l(u)/(xi-u) du.
//
// Split by branch so every table covers an analytic stretch:
//   - the flat branch integrates in closed form,
//   - H_A(xi) = pv Int_0^{1/e} (-log^2 u)/(xi-u) du is tabulated on Chebyshev
//     panels in log-distance from its support ends {0, 1/e},
//   - the bridge correction h(t(u)) (log^2 u - 1) on [1/3, 1/e] gets its own
//     small table (it vanishes flat at 1/3, so only mild structure remains).
// Beyond |xi| >= 4 the moment series in 1/xi takes over.
// ---------------------------------------------------------------------------

class HilbertCarveTable {
 public:
  static const HilbertCarveTable& get() {
    static HilbertCarveTable t;
    return t;
  }

  // pv Int_0^1 l(u)/(xi-u) du
  double eval(double xi) const {
    if (xi >= 4.0 || xi <= -4.0) return series(xi);
    using carve_detail::BRIDGE_HI;
    double flat = std::log(std::fabs(xi - 1.0)) - std::log(std::fabs(xi - BRIDGE_HI));
    return eval_A(xi) + flat + eval_corr(xi);
  }

 private:
  static constexpr int NN = 16;  // Chebyshev nodes per panel
  static constexpr double EDGE = 1e-15;
  struct Panel {
    double lo = 0.0, hi = 0.0;
    std::array<double, NN> v{};
  };
  using Region = std::vector<Panel>;

  // H_A regions keyed by log-distance from 0 (outside/inside) and from 1/e
  Region a_left_, a_in_lo_, a_in_hi_, a_right_;
  // correction regions around the bridge [1/3, 1/e]
  Region c_left_, c_in_lo_, c_in_hi_, c_right_;
  std::array<double, CARVE_MOMENT_MAX + 1> corr_mom_{};  // about the bridge center

  static double cheb_node(double lo, double hi, int j) {
    double t = std::cos(M_PI * j / (NN - 1));  // 1 .. -1
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }

  static double interp(const Region& r, double th) {
    const Panel* p;
    if (th <= r.front().lo)
      p = &r.front();
    else if (th >= r.back().hi)
      p = &r.back();
    else {
      size_t a = 0, b = r.size() - 1;
      while (a < b) {
        size_t m = (a + b) / 2;
        if (th <= r[m].hi)
          b = m;
        else
          a = m + 1;
      }
      p = &r[a];
    }
    double num = 0.0, den = 0.0;
    for (int j = 0; j < NN; ++j) {
      double xj = cheb_node(p->lo, p->hi, j);
      double d = th - xj;
      if (std::fabs(d) < 1e-14) return p->v[j];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == NN - 1) w *= 0.5;
      num += w / d * p->v[j];
      den += w / d;
    }
    return num / den;
  }

  double eval_A(double xi) const {
    using carve_detail::BRIDGE_HI;
    if (xi < 0.0) return interp(a_left_, std::log(std::max(-xi, EDGE)));
    if (xi > BRIDGE_HI) return interp(a_right_, std::log(std::max(xi - BRIDGE_HI, EDGE)));
    if (xi <= 0.5 * BRIDGE_HI) return interp(a_in_lo_, std::log(std::max(xi, EDGE)));
    return interp(a_in_hi_, std::log(std::max(BRIDGE_HI - xi, EDGE)));
  }

  double eval_corr(double xi) const {
    using carve_detail::BRIDGE_HI;
    using carve_detail::BRIDGE_LO;
    const double cb = 0.5 * (BRIDGE_LO + BRIDGE_HI);
    if (std::fabs(xi - cb) >= 0.75) {
      // moment series about the bridge center
      double acc = 0.0, pw = 1.0 / (xi - cb);
      for (int q = 0; q <= CARVE_MOMENT_MAX; ++q) {
        acc += corr_mom_[q] * pw;
        pw /= (xi - cb);
      }
      return acc;
    }
    if (xi < BRIDGE_LO) return interp(c_left_, std::log(std::max(BRIDGE_LO - xi, EDGE)));
    if (xi > BRIDGE_HI) return interp(c_right_, std::log(std::max(xi - BRIDGE_HI, EDGE)));
    if (xi <= cb) return interp(c_in_lo_, std::log(std::max(xi - BRIDGE_LO, EDGE)));
    return interp(c_in_hi_, std::log(std::max(BRIDGE_HI - xi, EDGE)));
  }

  static double series(double xi) {
    // 1/(xi-u) = sum u^q / xi^{q+1}
    double acc = 0.0, pw = 1.0 / xi;
    for (int q = 0; q <= CARVE_MOMENT_MAX; ++q) {
      acc += carve_moment(q) * pw;
      pw /= xi;
    }
    return acc;
  }

  // bridge correction integrand: l(u) - (-log^2 u) on [1/3, 1/e], flat-zero
  // at 1/3
  static double corr_fn(double u) {
    double lg = std::log(u);
    return carve_l_unchecked(u) + lg * lg;
  }

  // pv Int_a^b f(u)/(xi-u) du for smooth f, with optional interior breaks
  template <class F>
  static double pv_piece(F&& f, double a, double b, double xi,
                         std::vector<double> br) {
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.max_panels = 8000;
    if (xi > a && xi < b) {
      double fxi = f(xi);
      br.push_back(xi);
      auto r = integrate([&](double u) { return (f(u) - fxi) / (xi - u); }, a, b, opt, br);
      return r.value + fxi * (std::log(xi - a) - std::log(b - xi));
    }
    // pole outside: refine toward the nearest endpoint
    double close = xi <= a ? a - xi : xi - b;
    for (double w = std::max(close, 1e-14); w < (b - a); w *= 4.0)
      br.push_back(xi <= a ? a + w : b - w);
    auto r = integrate([&](double u) { return f(u) / (xi - u); }, a, b, opt, br);
    return r.value;
  }

  static double h_a_point(double xi) {
    using carve_detail::BRIDGE_HI;
    QuadOptions opt;
    opt.abs_tol = 1e-13;
    opt.rel_tol = 1e-13;
    opt.max_panels = 8000;
    auto f = [](double u) {
      double lg = std::log(u);
      return -lg * lg;
    };
    if (xi > 0.0 && xi < BRIDGE_HI) {
      double split = std::min(0.5 * xi, 0.25 * BRIDGE_HI);
      double fxi = f(xi);
      auto head = integrate_log_end([&](double v) { return (f(v) - fxi) / (xi - v); },
                                    split, opt);
      std::vector<double> br{xi};
      auto rest = integrate([&](double u) { return (f(u) - fxi) / (xi - u); }, split,
                            BRIDGE_HI, opt, br);
      return head.value + rest.value + fxi * (std::log(xi) - std::log(BRIDGE_HI - xi));
    }
    auto head = integrate_log_end([&](double v) { return f(v) / (xi - v); },
                                  0.25 * BRIDGE_HI, opt);
    std::vector<double> br;
    double close = xi <= 0.0 ? -xi : xi - BRIDGE_HI;
    for (double w = std::max(close, 1e-14); w < 0.7 * BRIDGE_HI; w *= 4.0)
      br.push_back(xi <= 0.0 ? 0.25 * BRIDGE_HI + (w - close) * 0 + w : BRIDGE_HI - w);
    auto rest = integrate([&](double u) { return f(u) / (xi - u); }, 0.25 * BRIDGE_HI,
                          BRIDGE_HI, opt, br);
    return head.value + rest.value;
  }

  static double h_corr_point(double xi) {
    using carve_detail::BRIDGE_HI;
    using carve_detail::BRIDGE_LO;
    double mid = 0.5 * (BRIDGE_LO + BRIDGE_HI);
    return pv_piece([](double u) { return corr_fn(u); }, BRIDGE_LO, BRIDGE_HI, xi,
                    {mid});
  }

  static Region build_region(double th_lo, double th_hi, double width,
                             const std::function<double(double)>& point) {
    Region r;
    int np = static_cast<int>(std::ceil((th_hi - th_lo) / width));
    for (int i = 0; i < np; ++i) {
      Panel p;
      p.lo = th_lo + (th_hi - th_lo) * i / np;
      p.hi = th_lo + (th_hi - th_lo) * (i + 1) / np;
      for (int j = 0; j < NN; ++j) p.v[j] = point(cheb_node(p.lo, p.hi, j));
      r.push_back(p);
    }
    return r;
  }

  HilbertCarveTable() {
    using carve_detail::BRIDGE_HI;
    using carve_detail::BRIDGE_LO;
    const double lo = std::log(EDGE);
    a_left_ = build_region(lo, std::log(4.0), 1.2,
                           [](double th) { return h_a_point(-std::exp(th)); });
    a_in_lo_ = build_region(lo, std::log(0.5 * BRIDGE_HI), 1.2,
                            [](double th) { return h_a_point(std::exp(th)); });
    a_in_hi_ = build_region(lo, std::log(0.5 * BRIDGE_HI), 1.2, [](double th) {
      return h_a_point(BRIDGE_HI - std::exp(th));
    });
    a_right_ = build_region(lo, std::log(4.0 - BRIDGE_HI), 1.2, [](double th) {
      return h_a_point(BRIDGE_HI + std::exp(th));
    });
    double wb = BRIDGE_HI - BRIDGE_LO;
    c_left_ = build_region(lo, std::log(0.8), 1.0,
                           [](double th) { return h_corr_point(BRIDGE_LO - std::exp(th)); });
    c_in_lo_ = build_region(lo, std::log(0.5 * wb), 1.0, [](double th) {
      return h_corr_point(BRIDGE_LO + std::exp(th));
    });
    c_in_hi_ = build_region(lo, std::log(0.5 * wb), 1.0, [](double th) {
      return h_corr_point(BRIDGE_HI - std::exp(th));
    });
    c_right_ = build_region(lo, std::log(0.8), 1.0, [](double th) {
      return h_corr_point(BRIDGE_HI + std::exp(th));
    });
    // correction moments about the bridge center for the far series
    const double cb = 0.5 * (BRIDGE_LO + BRIDGE_HI);
    QuadOptions opt;
    opt.abs_tol = 1e-15;
    for (int q = 0; q <= CARVE_MOMENT_MAX; ++q) {
      auto r = integrate(
          [&](double u) { return corr_fn(u) * std::pow(u - cb, q); }, BRIDGE_LO,
          BRIDGE_HI, opt);
      corr_mom_[q] = r.value;
    }
  }
};

}  // namespace nullseries
