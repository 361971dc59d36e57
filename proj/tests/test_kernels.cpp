#include <catch2/catch_amalgamated.hpp>

#include "nullseries/field.hpp"
#include "nullseries/kernels.hpp"

using namespace nullseries;

TEST_CASE("herglotz term list reproduces (zeta+z)/(zeta-z)") {
  auto K = herglotz_kernel();
  cplx zeta = unit_circle(0.237), z = 0.43 * unit_circle(0.81);
  CHECK(std::abs(eval_terms(K, zeta, z) - (zeta + z) / (zeta - z)) < 1e-14);
}

TEST_CASE("derivative operators match finite differences") {
  cplx z = 0.55 * unit_circle(0.13);
  double t = 0.41;
  auto T0 = herglotz_kernel();
  auto T1 = tangential_derivative(T0);
  auto Dt = boundary_derivative(T0);
  double h = 1e-6;
  // tangential: rotate z
  cplx zp = z * unit_circle(h), zm = z * unit_circle(-h);
  cplx fd = (eval_terms(T0, unit_circle(t), zp) - eval_terms(T0, unit_circle(t), zm)) /
            (2.0 * h);
  CHECK(std::abs(eval_terms(T1, unit_circle(t), z) - fd) < 1e-6);
  // boundary variable
  cplx fdt = (eval_terms(T0, unit_circle(t + h), z) - eval_terms(T0, unit_circle(t - h), z)) /
             (2.0 * h);
  CHECK(std::abs(eval_terms(Dt, unit_circle(t), z) - fdt) < 1e-6);
}

TEST_CASE("kernel table is a Taylor expansion in the boundary variable") {
  const auto& KT = KernelTable::get();
  cplx z = 0.4 * unit_circle(0.77);
  double c = 0.2, dt = 0.013;
  for (int D = 0; D <= 2; ++D) {
    cplx A[KERNEL_P_MAX + 1];
    KT.eval_all(D, KERNEL_P_MAX, unit_circle(c), z, A);
    cplx series = 0.0;
    double p = 1.0;
    for (int q = 0; q <= KERNEL_P_MAX; ++q) {
      series += A[q] * p;
      p *= dt;
    }
    cplx direct = eval_terms(KT.list(D, 0), unit_circle(c + dt), z);
    CHECK(std::abs(series - direct) < 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("boundary kernel is -i cot(pi (t-x))") {
  auto K = herglotz_kernel();
  double x = 0.3, t = 0.55;
  cplx v = eval_terms(K, unit_circle(t), unit_circle(x));
  cplx expect = cplx(0.0, -1.0) / std::tan(M_PI * (t - x));
  CHECK(std::abs(v - expect) < 1e-12);
}

TEST_CASE("pv closed form for constants") {
  double x = 0.37, a = 0.2, b = 0.6;
  // numeric symmetric principal value
  QuadOptions q;
  q.abs_tol = 1e-13;
  auto left = integrate([&](double t) { return std::cos(M_PI * (x - t)) / std::sin(M_PI * (x - t)); },
                        a, x - 1e-7, q);
  auto right = integrate([&](double t) { return std::cos(M_PI * (x - t)) / std::sin(M_PI * (x - t)); },
                         x + 1e-7, b, q);
  // the +-1e-7 collar around x cancels to O(collar^2) by oddness
  CHECK(pv_flat_cot(a, b, x) == Catch::Approx(left.value + right.value).margin(1e-9));
}

TEST_CASE("Schwarz integral on trigonometric data") {
  // cos(2 pi k t) completes to z^k; sin completes to -i z^k
  for (int k : {1, 3, 8}) {
    cplx z = 0.72 * unit_circle(0.29);
    auto rc = schwarz_synthetic([k](double t) { return std::cos(TWO_PI * k * t); }, z, 0);
    CHECK(std::abs(rc.value - std::pow(z, k)) < 1e-10);
    auto rs = schwarz_synthetic([k](double t) { return std::sin(TWO_PI * k * t); }, z, 0);
    CHECK(std::abs(rs.value - cplx(0.0, -1.0) * std::pow(z, k)) < 1e-10);
  }
  // constants reproduce themselves with zero conjugate
  auto rconst = schwarz_synthetic([](double) { return 2.5; }, 0.6 * unit_circle(0.1), 0);
  CHECK(std::abs(rconst.value - 2.5) < 1e-11);
  // tangential derivative: d/dtheta z^k = 2 pi i k z^k
  int k = 4;
  cplx z = 0.6 * unit_circle(0.15);
  auto rd = schwarz_synthetic([k](double t) { return std::cos(TWO_PI * k * t); }, z, 1);
  CHECK(std::abs(rd.value - cplx(0.0, TWO_PI * k) * std::pow(z, k)) < 1e-8);
  auto rd2 = schwarz_synthetic([k](double t) { return std::cos(TWO_PI * k * t); }, z, 2);
  CHECK(std::abs(rd2.value - std::pow(cplx(0.0, TWO_PI * k), 2) * std::pow(z, k)) < 1e-7);
}

TEST_CASE("boundary conjugate of trigonometric data") {
  for (int k : {1, 2, 5}) {
    double x = 0.417;
    double v = conjugate_synthetic([k](double t) { return std::cos(TWO_PI * k * t); }, x);
    CHECK(v == Catch::Approx(std::sin(TWO_PI * k * x)).margin(1e-9));
  }
}
