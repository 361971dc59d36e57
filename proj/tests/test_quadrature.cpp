#include <catch2/catch_amalgamated.hpp>

#include "nullseries/quadrature.hpp"

using namespace nullseries;

TEST_CASE("polynomials and oscillations") {
  auto r = integrate([](double x) { return x * x * x * x * x; }, 0.0, 1.0);
  CHECK(r.value == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
  auto o = integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 1.0);
  CHECK(o.value == Catch::Approx(std::sin(40.0) / 40.0).margin(1e-12));
  CHECK(o.converged);
}

TEST_CASE("log^2 endpoint via exponential substitution") {
  // Int_0^1 log^2 v dv = 2
  auto r = integrate_log_end([](double v) { double l = std::log(v); return l * l; }, 1.0);
  CHECK(r.value == Catch::Approx(2.0).epsilon(1e-12));
  // Int_0^w log^2 v dv = w (log^2 w - 2 log w + 2)
  double w = 0.037;
  double lw = std::log(w);
  auto r2 = integrate_log_end([](double v) { double l = std::log(v); return l * l; }, w);
  CHECK(r2.value == Catch::Approx(w * (lw * lw - 2 * lw + 2)).epsilon(1e-12));
}

TEST_CASE("complex integrand") {
  auto r = integrate_c([](double x) { return unit_circle(7.0 * x); }, 0.0, 1.0);
  CHECK(std::abs(r.value) < 1e-12);
  auto s = integrate_c([](double x) { return unit_circle(3.0 * x) * unit_circle(-3.0 * x); },
                       0.0, 1.0);
  CHECK(s.value.real() == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("breakpoints let kinks converge") {
  auto f = [](double x) { return std::fabs(x - 0.3717); };
  std::vector<double> br{0.3717};
  auto r = integrate(f, 0.0, 1.0, {}, br);
  double a = 0.3717;
  double exact = a * a / 2 + (1 - a) * (1 - a) / 2;
  CHECK(r.value == Catch::Approx(exact).epsilon(1e-13));
}
