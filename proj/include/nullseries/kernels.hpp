#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "nullseries/common.hpp"

namespace nullseries {

// ---------------------------------------------------------------------------
// The Schwarz integral  (f + i f~)(z) = Int_0^1 f(t) T(e(t), z) dt  with the
// Herglotz kernel T(zeta, z) = (zeta+z)/(zeta-z) recovers the harmonic
// extension (real part) and its conjugate normalized to vanish at z = 0
// (imaginary part).  Tangential derivatives d/dtheta with z = r e^{2 pi i
// theta} correspond to the operator 2 pi i z d/dz; derivatives in the
// boundary variable t to 2 pi i zeta d/dzeta.  Both operators keep kernels
// inside the algebra spanned by  c zeta^a z^b (zeta-z)^{-e}, so all kernel
// derivatives used by the far-field moment expansions are exact term lists.
//
// On the circle itself T(e(t), e(x)) = -i cot(pi (t - x)), which is the
// principal-value conjugation kernel.
// ---------------------------------------------------------------------------

struct KTerm {
  cplx c;
  int a = 0, b = 0, e = 0;  // c * zeta^a * z^b * (zeta-z)^{-e}
};

using TermList = std::vector<KTerm>;

namespace kernel_detail {

inline void push(std::map<std::array<int, 3>, cplx>& m, cplx c, int a, int b, int e) {
  if (c == cplx(0.0, 0.0)) return;
  m[{a, b, e}] += c;
}

inline TermList from_map(const std::map<std::array<int, 3>, cplx>& m) {
  TermList out;
  for (auto& [k, c] : m)
    if (std::abs(c) > 0.0) out.push_back({c, k[0], k[1], k[2]});
  return out;
}

}  // namespace kernel_detail

inline TermList herglotz_kernel() {
  // (zeta+z)/(zeta-z) = 1 + 2 z (zeta-z)^{-1}
  return {{cplx(1.0, 0.0), 0, 0, 0}, {cplx(2.0, 0.0), 0, 1, 1}};
}

/// 2 pi i z d/dz applied to a term list.
inline TermList tangential_derivative(const TermList& in) {
  std::map<std::array<int, 3>, cplx> m;
  const cplx f(0.0, TWO_PI);
  for (const auto& t : in) {
    kernel_detail::push(m, f * t.c * static_cast<double>(t.b), t.a, t.b, t.e);
    kernel_detail::push(m, f * t.c * static_cast<double>(t.e), t.a, t.b + 1, t.e + 1);
  }
  return kernel_detail::from_map(m);
}

/// 2 pi i zeta d/dzeta applied to a term list.
inline TermList boundary_derivative(const TermList& in) {
  std::map<std::array<int, 3>, cplx> m;
  const cplx f(0.0, TWO_PI);
  for (const auto& t : in) {
    kernel_detail::push(m, f * t.c * static_cast<double>(t.a), t.a, t.b, t.e);
    kernel_detail::push(m, -f * t.c * static_cast<double>(t.e), t.a + 1, t.b, t.e + 1);
  }
  return kernel_detail::from_map(m);
}

inline constexpr int KERNEL_D_MAX = 4;
inline constexpr int KERNEL_P_MAX = 10;

/// lists[D][p] = (1/p!) * (d/dt)^p applied to the D-th tangential derivative
/// of the Herglotz kernel.
class KernelTable {
 public:
  static const KernelTable& get() {
    static KernelTable t;
    return t;
  }

  const TermList& list(int D, int p) const { return lists_[D][p]; }

  /// Evaluates A_p for p = 0..P at fixed (zeta_c, z); out must hold P+1.
  void eval_all(int D, int P, cplx zeta, cplx z, cplx* out) const {
    cplx w = 1.0 / (zeta - z);
    cplx zp[KERNEL_P_MAX + KERNEL_D_MAX + 3], bp[KERNEL_P_MAX + KERNEL_D_MAX + 3],
        wp[KERNEL_P_MAX + KERNEL_D_MAX + 4];
    int na = max_a_[D], nb = max_b_[D], ne = max_e_[D];
    zp[0] = bp[0] = wp[0] = 1.0;
    for (int i = 1; i <= na; ++i) zp[i] = zp[i - 1] * zeta;
    for (int i = 1; i <= nb; ++i) bp[i] = bp[i - 1] * z;
    for (int i = 1; i <= ne; ++i) wp[i] = wp[i - 1] * w;
    for (int p = 0; p <= P; ++p) {
      cplx acc = 0.0;
      for (const auto& t : lists_[D][p]) acc += t.c * zp[t.a] * bp[t.b] * wp[t.e];
      out[p] = acc;
    }
  }

 private:
  KernelTable() {
    TermList td = herglotz_kernel();
    for (int D = 0; D <= KERNEL_D_MAX; ++D) {
      if (D > 0) td = tangential_derivative(td);
      TermList cur = td;
      double fact = 1.0;
      for (int p = 0; p <= KERNEL_P_MAX; ++p) {
        if (p > 0) {
          cur = boundary_derivative(cur);
          fact *= p;
        }
        TermList scaled = cur;
        for (auto& t : scaled) t.c /= fact;
        lists_[D][p] = scaled;
        for (const auto& t : scaled) {
          max_a_[D] = std::max(max_a_[D], t.a);
          max_b_[D] = std::max(max_b_[D], t.b);
          max_e_[D] = std::max(max_e_[D], t.e);
        }
      }
    }
  }

  TermList lists_[KERNEL_D_MAX + 1][KERNEL_P_MAX + 1];
  int max_a_[KERNEL_D_MAX + 1] = {0, 0, 0, 0, 0};
  int max_b_[KERNEL_D_MAX + 1] = {0, 0, 0, 0, 0};
  int max_e_[KERNEL_D_MAX + 1] = {0, 0, 0, 0, 0};
};

inline cplx eval_terms(const TermList& terms, cplx zeta, cplx z) {
  cplx w = 1.0 / (zeta - z);
  cplx acc = 0.0;
  for (const auto& t : terms) {
    cplx v = t.c;
    for (int i = 0; i < t.a; ++i) v *= zeta;
    for (int i = 0; i < t.b; ++i) v *= z;
    for (int i = 0; i < t.e; ++i) v *= w;
    acc += v;
  }
  return acc;
}

/// Kernel value T_D(e(t), z).
inline cplx herglotz_eval(double t, cplx z, int D) {
  return eval_terms(KernelTable::get().list(D, 0), unit_circle(t), z);
}

/// pv Int_alpha^beta cot(pi (x-t)) dt; valid whether or not x crosses the
/// panel (the antiderivative absorbs the principal value).
inline double pv_flat_cot(double alpha, double beta, double x) {
  double sa = std::fabs(std::sin(M_PI * (x - alpha)));
  double sb = std::fabs(std::sin(M_PI * (x - beta)));
  return (std::log(sa) - std::log(sb)) / M_PI;
}

}  // namespace nullseries
