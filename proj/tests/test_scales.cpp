#include <catch2/catch_amalgamated.hpp>

#include "nullseries/scales.hpp"

using namespace nullseries;

TEST_CASE("sigma values") {
  auto sc = ScaleSequence::build(30);
  CHECK(sc.sigma[0] == 1.0);
  // 1/(2 log 3), natural log
  CHECK(sc.sigma[1] == Catch::Approx(0.45511961331341866).epsilon(1e-15));
  for (int n = 1; n <= 30; ++n) {
    CHECK(sc.sigma[n] > 0.0);
    CHECK(sc.tau[n] > 0.0);
  }
}

TEST_CASE("gap identity to 8 ulps") {
  auto sc = ScaleSequence::build(30);
  for (int n = 0; n < 30; ++n) {
    double res = sc.gap_residual(n);
    double ulp = std::nextafter(sc.sigma[n + 1], 2.0) - sc.sigma[n + 1];
    CHECK(std::fabs(res) <= 8.0 * ulp);
  }
}

TEST_CASE("K_n measure equals 1/log(n+2) exactly") {
  auto sc = ScaleSequence::build(30);
  for (int n = 1; n <= 30; ++n)
    CHECK(sc.measure(n) == 1.0 / std::log(static_cast<double>(n) + 2.0));
}

TEST_CASE("rejects degenerate ranks") {
  CHECK_THROWS_AS(ScaleSequence::build(1), std::invalid_argument);
  CHECK_THROWS_AS(ScaleSequence::build(0), std::invalid_argument);
}

TEST_CASE("carve amplitude guard") {
  CHECK(carve_amplitude(0) == 1.0);
  CHECK(carve_amplitude(1) == 1.0);
  CHECK(carve_amplitude(2) == Catch::Approx(1.6651092223153954).epsilon(1e-15));
  for (int n = 2; n < 25; ++n) CHECK(carve_amplitude(n + 1) > carve_amplitude(n));
}
