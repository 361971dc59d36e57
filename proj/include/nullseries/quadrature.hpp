#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "nullseries/common.hpp"

namespace nullseries {

// Gauss(7)/Kronrod(15) pair on [-1,1].
namespace gk {
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_panels = 4000;
};

template <class T>
struct QuadOutcome {
  T value{};
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

using QuadResult = QuadOutcome<double>;
using QuadResultC = QuadOutcome<cplx>;

namespace detail {

template <class T, class F>
void gk15_panel(F&& f, double a, double b, T& k15, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T g7{};
  T k{};
  {
    T fc = f(c);
    k = gk::wgk[7] * fc;
    g7 = gk::wg[3] * fc;
  }
  for (int i = 0; i < 7; ++i) {
    double dx = h * gk::xgk[i];
    T s = f(c + dx) + f(c - dx);
    k += gk::wgk[i] * s;
    if (i % 2 == 1) g7 += gk::wg[i / 2] * s;
  }
  k15 = h * k;
  err = std::abs(h * (k - g7));
}

template <class T, class F>
QuadOutcome<T> integrate_impl(F&& f, double a, double b, const QuadOptions& opt,
                              std::span<const double> breaks) {
  struct Panel {
    double a, b, err;
    T val;
  };
  std::vector<Panel> panels;
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel p{edges[i], edges[i + 1], 0.0, T{}};
    gk15_panel<T>(f, p.a, p.b, p.val, p.err);
    panels.push_back(p);
  }

  auto totals = [&panels]() {
    NeumaierSum es;
    T vs{};
    for (auto& p : panels) {
      vs += p.val;
      es.add(p.err);
    }
    return std::pair<T, double>(vs, es.value());
  };

  for (;;) {
    auto [vsum, esum] = totals();
    double goal = std::max(opt.abs_tol, opt.rel_tol * std::abs(vsum));
    if (esum <= goal || static_cast<int>(panels.size()) >= opt.max_panels) {
      QuadOutcome<T> r;
      r.value = vsum;
      r.error = esum;
      r.panels = static_cast<int>(panels.size());
      r.converged = esum <= goal;
      return r;
    }
    // split the worst panel
    size_t worst = 0;
    for (size_t i = 1; i < panels.size(); ++i)
      if (panels[i].err > panels[worst].err) worst = i;
    Panel p = panels[worst];
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      // panel at rounding resolution; freeze its estimate
      panels[worst].err = 0.0;
      continue;
    }
    Panel l{p.a, mid, 0.0, T{}}, r2{mid, p.b, 0.0, T{}};
    gk15_panel<T>(f, l.a, l.b, l.val, l.err);
    gk15_panel<T>(f, r2.a, r2.b, r2.val, r2.err);
    panels[worst] = l;
    panels.push_back(r2);
  }
}

}  // namespace detail

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     std::span<const double> breaks = {}) {
  return detail::integrate_impl<double>(std::forward<F>(f), a, b, opt, breaks);
}

template <class F>
QuadResultC integrate_c(F&& f, double a, double b, const QuadOptions& opt = {},
                        std::span<const double> breaks = {}) {
  return detail::integrate_impl<cplx>(std::forward<F>(f), a, b, opt, breaks);
}

/// Integral over (0, w] of an integrand with a log^2-type endpoint
/// singularity at 0: substitutes v = w e^{-u}, which turns -log^2 v pieces
/// into polynomials in u against e^{-u}.  The remaining (0, w e^{-U}]
/// sliver is dropped; with U = 45 it is far below double rounding for the
/// integrands used here.
template <class F>
QuadResult integrate_log_end(F&& f, double w, const QuadOptions& opt = {}) {
  const double U = 45.0;
  auto g = [&](double u) {
    double v = w * std::exp(-u);
    return f(v) * v;
  };
  static const double br[] = {1.0, 3.0, 8.0, 16.0, 30.0};
  return integrate(g, 0.0, U, opt, std::span<const double>(br, 5));
}

template <class F>
QuadResultC integrate_log_end_c(F&& f, double w, const QuadOptions& opt = {}) {
  const double U = 45.0;
  auto g = [&](double u) {
    double v = w * std::exp(-u);
    return f(v) * v;
  };
  static const double br[] = {1.0, 3.0, 8.0, 16.0, 30.0};
  return integrate_c(g, 0.0, U, opt, std::span<const double>(br, 5));
}

}  // namespace nullseries
