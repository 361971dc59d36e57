#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "nullseries/carve.hpp"
#include "nullseries/kernels.hpp"
#include "nullseries/profile.hpp"

namespace nullseries {

struct FieldOptions {
  double tol = 1e-10;      // absolute evaluation tolerance target
  double open_node = 3.0;  // pooled-node criterion, units of sigma_j
  double piece_far = 6.0;  // per-piece criterion, units of piece width
};

struct FieldResult {
  cplx value{};
  double err = 0.0;
};

namespace field_detail {

inline constexpr int POOL_P = 8;    // stored moments per node
inline constexpr int PIECE_P = 8;   // far expansion order per piece

// cot(y) - 1/y = -(y/3 + y^3/45 + 2 y^5/945 + y^7/4725 + 2 y^9/93555 + ...)
inline constexpr double COT_RES[5] = {1.0 / 3.0, 1.0 / 45.0, 2.0 / 945.0,
                                      1.0 / 4725.0, 2.0 / 93555.0};

inline double arc_dist_to(double x, double lo, double hi) {
  if (x >= lo && x <= hi) return 0.0;
  return std::min(circ_dist(x, lo), circ_dist(x, hi));
}

inline double chord_dist_to_arc(cplx z, double lo, double hi) {
  double r = std::abs(z);
  if (r == 0.0) return 1.0;
  double th = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
  for (double t : {th - 1.0, th, th + 1.0})
    if (t >= lo && t <= hi) return std::fabs(r - 1.0);
  return std::min(chord_dist(z, lo), chord_dist(z, hi));
}

inline std::vector<double> angle_breaks(cplx z, double lo, double hi) {
  std::vector<double> br;
  double th = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
  for (double t : {th - 1.0, th, th + 1.0})
    if (t > lo && t < hi) br.push_back(t);
  return br;
}

}  // namespace field_detail

/// Harmonic-extension evaluator for f_n at a fixed rank n: the content is
/// the increment pieces g_j, 0 <= j < n, organized in the skeleton's dyadic
/// tree with pooled monomial moments per node.  Far nodes interact through
/// exact kernel-derivative expansions; near pieces fall back to
/// singularity-aware quadrature (interior points) or to closed forms built
/// from the tabulated Hilbert transform of the carve profile (boundary
/// points).  All queries are const and thread-safe.
class HarmonicField {
 public:
  HarmonicField(std::shared_ptr<const BoundaryProfile> profile, int rank,
                FieldOptions opt = {})
      : profile_(std::move(profile)), rank_(rank), opt_(opt) {
    if (rank < 2 || rank > profile_->rank())
      throw std::invalid_argument("HarmonicField: rank out of range");
    build_pools();
  }

  int rank() const { return rank_; }
  const BoundaryProfile& profile() const { return *profile_; }
  const IntervalSkeleton& skeleton() const { return profile_->skeleton(); }

  /// (f_n + i conj)^{(D)} at an interior point, D-th tangential derivative.
  FieldResult eval_disk(cplx z, int D, double tol = 0.0) const {
    if (std::abs(z) >= 1.0)
      throw std::domain_error("eval_disk: |z| must be < 1");
    if (D < 0 || D > KERNEL_D_MAX) throw std::invalid_argument("eval_disk: D");
    Acc acc;
    acc.tol = tol > 0.0 ? tol : opt_.tol;
    walk_disk(0, 0, z, D, acc);
    return {acc.val, acc.err};
  }

  struct BoundaryValue {
    double f = 0.0;
    double conj = 0.0;
    double err = 0.0;
  };

  /// Boundary values (f_n(x), conj f_n(x)); the conjugate is the
  /// principal-value convolution, evaluated through the moment tree.
  BoundaryValue eval_boundary(double x, double tol = 0.0) const {
    BoundaryValue r;
    r.f = profile_->eval(x, rank_);
    AccR acc;
    acc.tol = tol > 0.0 ? tol : opt_.tol;
    walk_boundary(0, 0, x, acc);
    r.conj = acc.val.value();
    r.err = acc.err;
    return r;
  }

  double conj_boundary(double x, double tol = 0.0) const {
    return eval_boundary(x, tol).conj;
  }

 private:
  struct Acc {
    cplx val{};
    double err = 0.0;
    double tol = 1e-10;
  };
  struct AccR {
    NeumaierSum val;
    double err = 0.0;
    double tol = 1e-10;
  };

  void build_pools() {
    const auto& sk = skeleton();
    pools_.resize(rank_);
    std::vector<ProfilePiece> pieces;
    for (int j = rank_ - 1; j >= 0; --j) {
      size_t cnt = size_t(1) << j;
      pools_[j].assign(cnt * (field_detail::POOL_P + 1), 0.0);
      for (size_t k = 0; k < cnt; ++k) {
        double c0 = sk.mid(j, k);
        double* pool = &pools_[j][k * (field_detail::POOL_P + 1)];
        pieces.clear();
        profile_->increment_pieces(j, k, pieces);
        double mu[field_detail::POOL_P + 1];
        for (const auto& p : pieces) {
          double origin = piece_origin_moments(p, mu);
          shift_into(pool, mu, origin - c0);
        }
        if (j + 1 < rank_) {
          for (int h = 0; h < 2; ++h) {
            size_t ck = 2 * k + h;
            const double* cp = &pools_[j + 1][ck * (field_detail::POOL_P + 1)];
            shift_into(pool, cp, sk.mid(j + 1, ck) - c0);
          }
        }
      }
    }
  }

  // moments about the piece origin; returns the origin
  static double piece_origin_moments(const ProfilePiece& p, double* mu) {
    const int P = field_detail::PIECE_P;
    if (p.kind == ProfilePiece::CONST) {
      // central rectangle moments
      double h = 0.5 * p.width();
      for (int q = 0; q <= P; ++q)
        mu[q] = (q % 2 == 0) ? p.value * 2.0 * std::pow(h, q + 1) / (q + 1) : 0.0;
      return p.center();
    }
    double c = 3.0 + p.side * p.s;
    double tp = p.tau;
    double sgn = 1.0;
    for (int q = 0; q <= P; ++q) {
      double body = p.amp * carve_pm_moment(q, p.s, p.side) +
                    p.add_const * std::pow(c, q + 1) / (q + 1);
      mu[q] = sgn * tp * body;
      tp *= p.tau;
      if (p.side < 0) sgn = -sgn;
    }
    return p.side > 0 ? p.lo : p.hi;
  }

  static void shift_into(double* dst, const double* src, double off) {
    // dst_p += sum_i C(p,i) off^{p-i} src_i
    const int P = field_detail::POOL_P;
    double offpow[field_detail::POOL_P + 1];
    offpow[0] = 1.0;
    for (int i = 1; i <= P; ++i) offpow[i] = offpow[i - 1] * off;
    for (int p = P; p >= 0; --p) {
      double acc = 0.0;
      for (int i = 0; i <= p; ++i) acc += binomial(p, i) * offpow[p - i] * src[i];
      dst[p] += acc;
    }
  }

  // ------------------------------------------------------------------
  // interior walk
  // ------------------------------------------------------------------
  void walk_disk(int j, size_t k, cplx z, int D, Acc& acc) const {
    const auto& sk = skeleton();
    double lo = sk.left(j, k), hi = lo + sk.sigma(j);
    double d = field_detail::chord_dist_to_arc(z, lo, hi);
    if (d >= opt_.open_node * sk.sigma(j)) {
      if (pool_dot_disk(j, k, z, D, acc)) return;
    }
    std::vector<ProfilePiece> pieces;
    profile_->increment_pieces(j, k, pieces);
    for (const auto& p : pieces) piece_disk(p, z, D, acc);
    if (j + 1 < rank_) {
      walk_disk(j + 1, 2 * k, z, D, acc);
      walk_disk(j + 1, 2 * k + 1, z, D, acc);
    }
  }

  bool pool_dot_disk(int j, size_t k, cplx z, int D, Acc& acc) const {
    const int P = field_detail::POOL_P;
    const double* pool = &pools_[j][k * (P + 1)];
    double c0 = skeleton().mid(j, k);
    cplx A[P + 1];
    KernelTable::get().eval_all(D, P, unit_circle(c0), z, A);
    cplx dot = 0.0;
    double last = 0.0, prev = 0.0;
    for (int p = 0; p <= P; ++p) {
      cplx term = pool[p] * A[p];
      dot += term;
      prev = last;
      last = std::abs(term);
    }
    double est = last + 0.5 * prev;
    if (est > std::max(acc.tol * 0.02, 1e-16 * std::abs(dot)))
      return false;  // handle pieces directly instead
    acc.val += dot;
    acc.err += est;
    return true;
  }

  void piece_disk(const ProfilePiece& p, cplx z, int D, Acc& acc) const {
    double d = field_detail::chord_dist_to_arc(z, p.lo, p.hi);
    if (d >= opt_.piece_far * p.width()) {
      if (piece_dot(p, unit_circle_origin(p), z, D, acc.tol, acc)) return;
    }
    piece_quad_disk(p, z, D, acc);
  }

  static double origin_of(const ProfilePiece& p) {
    return p.kind == ProfilePiece::CONST ? p.center()
                                         : (p.side > 0 ? p.lo : p.hi);
  }
  static cplx unit_circle_origin(const ProfilePiece& p) {
    return unit_circle(origin_of(p));
  }

  template <class AccT>
  bool piece_dot(const ProfilePiece& p, cplx zeta0, cplx z, int D, double tol,
                 AccT& acc) const {
    const int P = field_detail::PIECE_P;
    double mu[P + 1];
    piece_origin_moments(p, mu);
    cplx A[P + 1];
    KernelTable::get().eval_all(D, P, zeta0, z, A);
    cplx dot = 0.0;
    double last = 0.0, prev = 0.0;
    for (int q = 0; q <= P; ++q) {
      cplx term = mu[q] * A[q];
      dot += term;
      prev = last;
      last = std::abs(term);
    }
    double est = last + 0.5 * prev;
    if (est > std::max(tol * 0.01, 1e-16 * std::abs(dot))) return false;
    add_to(acc, dot, est);
    return true;
  }

  static void add_to(Acc& acc, cplx v, double e) {
    acc.val += v;
    acc.err += e;
  }
  static void add_to(AccR& acc, cplx v, double e) {
    acc.val.add(v.imag());
    acc.err += e;
  }

  void piece_quad_disk(const ProfilePiece& p, cplx z, int D, Acc& acc) const {
    QuadOptions q;
    q.abs_tol = acc.tol * 0.02;
    q.rel_tol = 1e-12;
    q.max_panels = 400;
    const TermList& K = KernelTable::get().list(D, 0);
    auto kern = [&](double t) { return eval_terms(K, unit_circle(t), z); };
    if (p.kind == ProfilePiece::CONST) {
      auto r = integrate_c([&](double t) { return p.value * kern(t); }, p.lo, p.hi, q,
                           field_detail::angle_breaks(z, p.lo, p.hi));
      acc.val += r.value;
      acc.err += r.error;
      return;
    }
    // both window ends carry the log^2 singularity of the carve profile
    double tau = p.tau;
    auto rl = integrate_log_end_c(
        [&](double v) {
          return (p.amp * carve_l_unchecked(v / tau) + p.add_const) * kern(p.lo + v);
        },
        tau, q);
    auto rr = integrate_log_end_c(
        [&](double v) {
          return (p.amp * carve_l_unchecked(v / tau) + p.add_const) * kern(p.hi - v);
        },
        tau, q);
    auto rm = integrate_c([&](double t) { return (-p.amp + p.add_const) * kern(t); },
                          p.lo + tau, p.hi - tau, q, field_detail::angle_breaks(z, p.lo + tau, p.hi - tau));
    acc.val += rl.value + rr.value + rm.value;
    acc.err += rl.error + rr.error + rm.error;
  }

  // ------------------------------------------------------------------
  // boundary walk (conjugate function, D = 0)
  // ------------------------------------------------------------------
  void walk_boundary(int j, size_t k, double x, AccR& acc) const {
    const auto& sk = skeleton();
    double lo = sk.left(j, k), hi = lo + sk.sigma(j);
    double d = field_detail::arc_dist_to(x, lo, hi);
    if (d >= opt_.open_node * sk.sigma(j)) {
      if (pool_dot_boundary(j, k, x, acc)) return;
    }
    std::vector<ProfilePiece> pieces;
    profile_->increment_pieces(j, k, pieces);
    for (const auto& p : pieces) piece_boundary(p, x, acc);
    if (j + 1 < rank_) {
      walk_boundary(j + 1, 2 * k, x, acc);
      walk_boundary(j + 1, 2 * k + 1, x, acc);
    }
  }

  bool pool_dot_boundary(int j, size_t k, double x, AccR& acc) const {
    const int P = field_detail::POOL_P;
    const double* pool = &pools_[j][k * (P + 1)];
    double c0 = skeleton().mid(j, k);
    cplx A[P + 1];
    KernelTable::get().eval_all(0, P, unit_circle(c0), unit_circle(x), A);
    cplx dot = 0.0;
    double last = 0.0, prev = 0.0;
    for (int p = 0; p <= P; ++p) {
      cplx term = pool[p] * A[p];
      dot += term;
      prev = last;
      last = std::abs(term);
    }
    double est = last + 0.5 * prev;
    if (est > std::max(acc.tol * 0.02, 1e-16 * std::abs(dot)))
      return false;
    acc.val.add(dot.imag());
    acc.err += est;
    return true;
  }

  void piece_boundary(const ProfilePiece& p, double x, AccR& acc) const {
    if (p.kind == ProfilePiece::CONST) {
      // exact principal-value integral of a constant against the cot kernel
      acc.val.add(p.value * pv_flat_cot(p.lo, p.hi, x));
      return;
    }
    double d = field_detail::arc_dist_to(x, p.lo, p.hi);
    if (d >= opt_.piece_far * p.width()) {
      if (piece_dot(p, unit_circle_origin(p), unit_circle(x), 0, acc.tol, acc)) return;
    }
    acc.val.add(carve_near_boundary(p, x));
    acc.err += 1e-13 * std::max(1.0, p.amp);
  }

  /// Near-field carve window against the cot kernel at a boundary point:
  /// leading 1/(pi tau (xi-u)) term through the tabulated Hilbert transform
  /// of l, plus the analytic cot remainder handled by window moments.
  double carve_near_boundary(const ProfilePiece& p, double x) const {
    const auto& H = HilbertCarveTable::get();
    double c = 3.0 + p.side * p.s;
    double xi = p.side > 0 ? (x - p.lo) / p.tau : (p.hi - x) / p.tau;
    double sign = p.side > 0 ? 1.0 : -1.0;
    double hpm = H.eval(xi) + std::log(std::fabs(xi - (c - 1.0))) -
                 std::log(std::fabs(xi - 1.0)) - H.eval(c - xi);
    double flat_pv = std::log(std::fabs(xi)) - std::log(std::fabs(xi - c));
    double lead = (p.amp * hpm + p.add_const * flat_pv) / M_PI;
    // cot remainder: -(sum_i beta_i y^{2i-1}), y = pi tau (xi - u)
    double corr = 0.0;
    double pt = M_PI * p.tau;
    for (int i = 1; i <= 5; ++i) {
      int q = 2 * i - 1;
      double Wq = 0.0;
      for (int r = 0; r <= q; ++r) {
        double body = p.amp * carve_pm_moment(r, p.s, p.side) +
                      p.add_const * std::pow(c, r + 1) / (r + 1);
        double t = binomial(q, r) * std::pow(xi, q - r) * body;
        Wq += (r % 2 == 0) ? t : -t;
      }
      corr -= field_detail::COT_RES[i - 1] * std::pow(pt, q) * Wq;
    }
    return sign * (lead + p.tau * corr);
  }

  std::shared_ptr<const BoundaryProfile> profile_;
  int rank_;
  FieldOptions opt_;
  std::vector<std::vector<double>> pools_;
};

// ---------------------------------------------------------------------------
// Reference evaluators (quadrature-only, no moment shortcuts).  Slow; used
// by tests as the independent route, and by the synthetic-data oracles.
// ---------------------------------------------------------------------------

/// Schwarz integral of arbitrary smooth boundary data against T_D.
template <class DataFn>
FieldResult schwarz_synthetic(DataFn&& data, cplx z, int D, double tol = 1e-11) {
  QuadOptions q;
  q.abs_tol = tol;
  q.rel_tol = tol;
  q.max_panels = 8000;
  const TermList& K = KernelTable::get().list(D, 0);
  double th = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
  std::vector<double> br{th, frac(th + 0.25), frac(th + 0.5), frac(th + 0.75)};
  auto r = integrate_c(
      [&](double t) { return data(t) * eval_terms(K, unit_circle(t), z); }, 0.0, 1.0,
      q, br);
  return {r.value, r.error};
}

/// Conjugate of smooth boundary data at a boundary point (principal value).
template <class DataFn>
double conjugate_synthetic(DataFn&& data, double x, double tol = 1e-11) {
  QuadOptions q;
  q.abs_tol = tol;
  q.rel_tol = tol;
  q.max_panels = 8000;
  double fx = data(x);
  auto g = [&](double t) {
    double dt = data(t) - fx;
    double y = std::sin(M_PI * (x - t));
    double cs = std::cos(M_PI * (x - t));
    // (data(t)-data(x)) cot(pi(x-t)), finite at t = x
    return std::fabs(y) < 1e-300 ? 0.0 : dt * cs / y;
  };
  std::vector<double> br{x};
  auto r = integrate(g, x - 0.5, x + 0.5, q, br);
  return r.value;  // pv of the constant part over a full period is zero
}

/// Direct piecewise evaluation of (f_n + i conj)^{(D)}(z); cost grows like
/// 2^n, intended for cross-checks at small rank.
inline FieldResult schwarz_reference(const BoundaryProfile& prof, int rank, cplx z,
                                     int D, double tol = 1e-11) {
  QuadOptions q;
  q.abs_tol = tol;
  q.rel_tol = 1e-12;
  q.max_panels = 2000;
  const TermList& K = KernelTable::get().list(D, 0);
  auto kern = [&](double t) { return eval_terms(K, unit_circle(t), z); };
  NeumaierSumC acc;
  double err = 0.0;
  std::vector<ProfilePiece> pieces;
  for (int j = 0; j < rank; ++j)
    for (uint64_t k = 0; k < prof.skeleton().count(j); ++k)
      prof.increment_pieces(j, k, pieces);
  for (const auto& p : pieces) {
    if (p.kind == ProfilePiece::CONST) {
      auto r = integrate_c([&](double t) { return p.value * kern(t); }, p.lo, p.hi, q,
                           field_detail::angle_breaks(z, p.lo, p.hi));
      acc.add(r.value);
      err += r.error;
      continue;
    }
    auto rl = integrate_log_end_c(
        [&](double v) {
          return (p.amp * carve_l_unchecked(v / p.tau) + p.add_const) * kern(p.lo + v);
        },
        p.tau, q);
    auto rr = integrate_log_end_c(
        [&](double v) {
          return (p.amp * carve_l_unchecked(v / p.tau) + p.add_const) * kern(p.hi - v);
        },
        p.tau, q);
    auto rm = integrate_c([&](double t) { return (-p.amp + p.add_const) * kern(t); },
                          p.lo + p.tau, p.hi - p.tau, q,
                          field_detail::angle_breaks(z, p.lo + p.tau, p.hi - p.tau));
    acc.add(rl.value + rr.value + rm.value);
    err += rl.error + rr.error + rm.error;
  }
  return {acc.value(), err};
}

/// Reference boundary conjugate by direct principal-value quadrature.
/// Handles each window zone in its local coordinate so the log^2 ends are
/// never reconstructed from rounded absolute positions.
inline double conjugate_reference(const BoundaryProfile& prof, int rank, double x,
                                  double tol = 1e-11) {
  QuadOptions q;
  q.abs_tol = tol;
  q.rel_tol = 1e-12;
  q.max_panels = 4000;
  NeumaierSum acc;
  std::vector<ProfilePiece> pieces;
  for (int j = 0; j < rank; ++j)
    for (uint64_t k = 0; k < prof.skeleton().count(j); ++k)
      prof.increment_pieces(j, k, pieces);
  auto cot = [](double u) { return std::cos(M_PI * u) / std::sin(M_PI * u); };
  for (const auto& p : pieces) {
    if (p.kind == ProfilePiece::CONST) {
      acc.add(p.value * pv_flat_cot(p.lo, p.hi, x));
      continue;
    }
    double tau = p.tau;
    // log^2 end zone anchored at `base`, oriented by `dir` (+1 from lo, -1
    // from hi), covering v in (0, tau]
    auto end_zone = [&](double base, double dir) {
      double vx = dir * (x - base);  // x in zone coordinates
      auto val = [&](double v) { return p.amp * carve_l_unchecked(v / tau) + p.add_const; };
      if (vx > 0.0 && vx < tau) {
        double fx = val(vx);
        auto head = integrate_log_end(
            [&](double v) { return (val(v) - fx) * dir * cot(M_PI * (vx - v)); },
            0.5 * vx, q);
        std::vector<double> br{vx};
        auto rest = integrate(
            [&](double v) { return (val(v) - fx) * dir * cot(M_PI * (vx - v)); },
            0.5 * vx, tau, q, br);
        double a = dir > 0 ? base : base - tau;
        double b = dir > 0 ? base + tau : base;
        return head.value + rest.value + fx * pv_flat_cot(a, b, x);
      }
      auto r = integrate_log_end(
          [&](double v) { return val(v) * dir * cot(M_PI * (vx - v)); }, tau, q);
      return r.value;
    };
    acc.add(end_zone(p.lo, +1.0));
    acc.add(end_zone(p.hi, -1.0));
    acc.add((-p.amp + p.add_const) * pv_flat_cot(p.lo + tau, p.hi - tau, x));
  }
  return acc.value();
}

}  // namespace nullseries
