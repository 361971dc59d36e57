#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "nullseries/carve.hpp"
#include "nullseries/skeleton.hpp"

namespace nullseries {

/// One piece of the increment g_n = f_{n+1} - f_n restricted to a half of a
/// rank-n interval: two carve windows (value a l^{+-} - M(n)) flanking the
/// child interval (value M(n+1) - M(n)).  Pieces are also reused to describe
/// f_n itself, with add_const = 0 on carve windows.
struct ProfilePiece {
  enum Kind { CARVE, CONST } kind = CONST;
  int level = 0;       // created while refining rank `level`
  double lo = 0.0, hi = 0.0;
  // carve fields
  double amp = 0.0, tau = 0.0, s = 0.0;
  int side = +1;       // +1: u=(x-lo)/tau against l^+; -1: u=(hi-x)/tau against l^-
  double add_const = 0.0;  // added to the carve value (e.g. -M(n) for increments)
  // const fields
  double value = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }

  double eval(double x) const {
    if (kind == CONST) return value;
    double u = side > 0 ? (x - lo) / tau : (hi - x) / tau;
    return amp * carve_l_pm(u, s, side) + add_const;
  }

  double eval_dn(double x, int D) const {
    if (D == 0) return eval(x);
    if (kind == CONST) return 0.0;
    double u = side > 0 ? (x - lo) / tau : (hi - x) / tau;
    double v = amp * carve_l_pm_dn(u, s, side, D) / std::pow(tau, D);
    return (side > 0 || D % 2 == 0) ? v : -v;
  }
};

/// Integral of a piece against 1 (singularity-aware: both log^2 window ends
/// go through the exponential substitution, the flat midsection is exact).
inline double integrate_piece(const ProfilePiece& p, double tol = 1e-13) {
  if (p.kind == ProfilePiece::CONST) return p.value * p.width();
  QuadOptions opt;
  opt.abs_tol = tol * std::max(1.0, p.amp) * p.width();
  opt.rel_tol = tol;
  double c = 3.0 + p.side * p.s;
  // u in (0,1]: a l(u) + add; flat u in (1, c-1]: -a + add; mirrored head.
  auto head = integrate_log_end(
      [&](double u) { return p.amp * carve_l_unchecked(u) + p.add_const; }, 1.0, opt);
  double flat = (-p.amp + p.add_const) * (c - 2.0);
  return p.tau * (2.0 * head.value + flat);
}

/// The boundary functions f_n: plateau levels M(n) on K_n plus all carve
/// pieces of earlier refinement steps.  f_0 = 0 on the whole circle and
/// Int_{I'} (f_{n+1} - f_n) = 0 on every half-interval I', which pins M(n+1).
class BoundaryProfile {
 public:
  static BoundaryProfile build(std::shared_ptr<const IntervalSkeleton> skel, int rank,
                               double quad_tol = 1e-12) {
    if (rank < 2 || rank > skel->rank())
      throw std::invalid_argument("BoundaryProfile: rank out of range");
    BoundaryProfile p;
    p.skel_ = std::move(skel);
    p.rank_ = rank;
    const auto& sk = *p.skel_;
    p.M_ = plateau_sequence(sk.scales(), rank,
                            [&](int n) { return sk.skew().value(n + 1, 0); }, quad_tol);
    return p;
  }

  /// M(n+1) from the mean-preservation condition on a half-interval:
  /// M(n+1) sigma_{n+1} + a_n tau_{n+1} (J+ + J-) = M(n) sigma_n / 2,
  /// with both window integrals J computed by quadrature.  The skew enters
  /// J+ and J- with opposite signs, so the result is skew-independent.
  static double solve_plateau_step(const ScaleSequence& sc, double Mn, int n, double s,
                                   double quad_tol = 1e-12) {
    double jp = carve_pm_integral_quad(s, +1, quad_tol);
    double jm = carve_pm_integral_quad(s, -1, quad_tol);
    double a = carve_amplitude(n);
    return (Mn * sc.sigma[n] / 2.0 - a * sc.tau[n + 1] * (jp + jm)) / sc.sigma[n + 1];
  }

  template <class SkewFn>
  static std::vector<double> plateau_sequence(const ScaleSequence& sc, int rank,
                                              SkewFn&& skew_of, double quad_tol = 1e-12) {
    std::vector<double> M(rank + 1, 0.0);
    for (int n = 0; n < rank; ++n)
      M[n + 1] = solve_plateau_step(sc, M[n], n, skew_of(n), quad_tol);
    return M;
  }

  int rank() const { return rank_; }
  const IntervalSkeleton& skeleton() const { return *skel_; }
  std::shared_ptr<const IntervalSkeleton> skeleton_ptr() const { return skel_; }
  double plateau(int n) const { return M_.at(n); }
  const std::vector<double>& plateaus() const { return M_; }

  /// Pointwise f_n(x) by descending the skeleton.  Exactly singular points
  /// report -infinity.
  double eval(double x, int n) const {
    check_rank(n);
    double v;
    int cr;
    if (descend(x, n, v, cr)) return v;
    return M_[n];
  }

  struct FinalValue {
    double value = 0.0;
    int carve_level = -1;  // refinement step that carved x; -1 if uncarved
    bool carved = false;
  };

  /// The limit boundary value f(x) where it is already decided at this
  /// rank (f = f_{j+1} on the carved part); uncarved points report the
  /// current plateau and carved = false.
  FinalValue eval_final(double x) const {
    FinalValue r;
    double v;
    int cr;
    if (descend(x, rank_, v, cr)) {
      r.value = v;
      r.carve_level = cr;
      r.carved = true;
    } else {
      r.value = M_[rank_];
      r.carved = false;
    }
    return r;
  }

  /// Tangential derivative of the boundary function at a carved point
  /// (local: the carve piece is analytic off the singular set).
  double eval_final_dn(double x, int D) const {
    ProfilePiece p;
    if (!carve_piece_at(x, p)) return 0.0;  // plateau: constant
    return p.eval_dn(x, D);
  }

  /// Locates the carve piece containing x (no add_const); false on plateau.
  bool carve_piece_at(double x, ProfilePiece& out) const {
    const auto& sk = *skel_;
    uint64_t k = 0;
    for (int j = 0; j < rank_; ++j) {
      double l = sk.left(j, k);
      double m = l + 0.5 * sk.sigma(j);
      int half = x < m ? 0 : 1;
      auto w = sk.half_windows(j, k, half);
      if (x > w.child_lo && x < w.child_hi) {
        k = w.child_index;
        continue;
      }
      out = piece_carve(j, w, x < w.child_lo ? 0 : 1, 0.0);
      return true;
    }
    return false;
  }

  /// The six pieces of g_n = f_{n+1} - f_n inside I(n,k).
  void increment_pieces(int n, uint64_t k, std::vector<ProfilePiece>& out) const {
    check_rank(n + 1);
    const auto& sk = *skel_;
    for (int half = 0; half < 2; ++half) {
      auto w = sk.half_windows(n, k, half);
      out.push_back(piece_carve(n, w, 0, -M_[n]));
      ProfilePiece child;
      child.kind = ProfilePiece::CONST;
      child.level = n;
      child.lo = w.child_lo;
      child.hi = w.child_hi;
      child.value = M_[n + 1] - M_[n];
      out.push_back(child);
      out.push_back(piece_carve(n, w, 1, -M_[n]));
    }
  }

  /// Quadrature residual of the defining condition Int_{I'}(f_{n+1}-f_n)=0.
  double conservation_residual(int n, uint64_t k, int half, double tol = 1e-13) const {
    const auto& sk = *skel_;
    auto w = sk.half_windows(n, k, half);
    double acc = 0.0;
    acc += integrate_piece(piece_carve(n, w, 0, -M_[n]), tol);
    acc += (M_[n + 1] - M_[n]) * (w.child_hi - w.child_lo);
    acc += integrate_piece(piece_carve(n, w, 1, -M_[n]), tol);
    return acc;
  }

  /// Int over I(n-1,k) of |f_n - f_{n-1}|; the sign is constant on each
  /// piece, so this is an exact piecewise decomposition.
  double abs_increment_integral(int n, uint64_t k, double tol = 1e-13) const {
    std::vector<ProfilePiece> ps;
    increment_pieces(n - 1, k, ps);
    double acc = 0.0;
    for (const auto& p : ps) {
      double v = integrate_piece(p, tol);
      acc += std::fabs(v);
    }
    return acc;
  }

  ProfilePiece piece_carve(int level, const IntervalSkeleton::HalfWindows& w, int which,
                           double add_const) const {
    ProfilePiece p;
    p.kind = ProfilePiece::CARVE;
    p.level = level;
    p.amp = carve_amplitude(level);
    p.tau = skel_->tau(level + 1);
    p.s = w.s;
    p.add_const = add_const;
    if (which == 0) {
      p.lo = w.wl_lo;
      p.hi = w.wl_hi;
      p.side = +1;
    } else {
      p.lo = w.wr_lo;
      p.hi = w.wr_hi;
      p.side = -1;
    }
    return p;
  }

 private:
  BoundaryProfile() = default;

  void check_rank(int n) const {
    if (n < 0 || n > rank_) throw std::invalid_argument("BoundaryProfile: rank");
  }

  // Walks x down the skeleton.  Returns true with the carve value if x falls
  // in a window at some step < n; v = -inf at exactly singular points.
  bool descend(double x, int n, double& v, int& carve_level) const {
    const auto& sk = *skel_;
    uint64_t k = 0;
    if (x == 0.0 || x == 1.0) {  // endpoint of I(0,0): in Q
      v = -std::numeric_limits<double>::infinity();
      carve_level = 0;
      return true;
    }
    for (int j = 0; j < n; ++j) {
      double l = sk.left(j, k);
      double m = l + 0.5 * sk.sigma(j);
      int half = x < m ? 0 : 1;
      auto w = sk.half_windows(j, k, half);
      if (x == w.base || x == w.half_hi || x == w.child_lo || x == w.child_hi) {
        v = -std::numeric_limits<double>::infinity();
        carve_level = j;
        return true;
      }
      if (x > w.child_lo && x < w.child_hi) {
        k = w.child_index;
        continue;
      }
      ProfilePiece p = piece_carve(j, w, x < w.child_lo ? 0 : 1, 0.0);
      v = p.eval(x);
      carve_level = j;
      return true;
    }
    return false;
  }

  std::shared_ptr<const IntervalSkeleton> skel_;
  int rank_ = 0;
  std::vector<double> M_;
};

}  // namespace nullseries
