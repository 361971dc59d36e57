#include <catch2/catch_amalgamated.hpp>
#include <memory>

#include "nullseries/profile.hpp"

using namespace nullseries;

namespace {
std::shared_ptr<const IntervalSkeleton> make_skel(uint64_t seed, int rank) {
  return std::make_shared<IntervalSkeleton>(IntervalSkeleton::build(seed, rank));
}
}  // namespace

TEST_CASE("plateau solve: skew independence and first level") {
  auto sc = ScaleSequence::build(12);
  double m1a = BoundaryProfile::solve_plateau_step(sc, 0.0, 0, 0.1);
  double m1b = BoundaryProfile::solve_plateau_step(sc, 0.0, 0, 0.9);
  CHECK(std::fabs(m1a - m1b) <= 1e-9);
  // M(1) = tau_1 (2 - 4L) / sigma_1
  double L = carve_integral();
  CHECK(m1a == Catch::Approx(sc.tau[1] * (2.0 - 4.0 * L) / sc.sigma[1]).epsilon(1e-10));
  for (int n : {3, 7}) {
    double a = BoundaryProfile::solve_plateau_step(sc, 5.0, n, 0.12);
    double b = BoundaryProfile::solve_plateau_step(sc, 5.0, n, 0.93);
    CHECK(std::fabs(a - b) <= 1e-9);
  }
}

TEST_CASE("plateau growth band (desk proxy of M ~ n/sqrt(log n))") {
  auto sc = ScaleSequence::build(21);
  auto M = BoundaryProfile::plateau_sequence(sc, 20, [](int) { return 0.5; });
  double lo = 1e300, hi = 0.0;
  for (int n = 5; n <= 20; ++n) {
    double v = M[n] * std::sqrt(std::log(static_cast<double>(n))) / n;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi / lo <= 3.0);
  for (int n = 1; n <= 20; ++n) CHECK(M[n] > M[n - 1]);
}

TEST_CASE("conservation law on half-intervals") {
  auto prof = BoundaryProfile::build(make_skel(0, 9), 9);
  for (int n : {2, 5, 8}) {
    uint64_t cnt = prof.skeleton().count(n);
    for (uint64_t k : {uint64_t(0), cnt / 3, cnt - 1}) {
      for (int h = 0; h < 2; ++h) {
        double res = prof.conservation_residual(n - 1, k % (cnt / 2), h);
        CHECK(std::fabs(res) <= 1e-9 * prof.skeleton().sigma(n - 1));
      }
    }
  }
}

TEST_CASE("pointwise evaluation") {
  auto prof = BoundaryProfile::build(make_skel(5, 8), 8);
  const auto& sk = prof.skeleton();
  // plateau value on K_n
  double x = sk.mid(8, 37);
  CHECK(prof.eval(x, 8) == prof.plateau(8));
  // earlier rank sees the earlier plateau
  CHECK(prof.eval(x, 5) == prof.plateau(5));
  // a point in a rank-3 carve at scaled distance 0.5 from its singular end:
  // value = amplitude(2) * l(0.5) = -amplitude(2)
  auto w = sk.half_windows(2, 1, 0);
  double xp = w.wl_lo + 0.5 * sk.tau(3);
  CHECK(prof.eval(xp, 3) == Catch::Approx(-carve_amplitude(2)).epsilon(1e-13));
  // carve values persist at deeper ranks (boundary locality)
  CHECK(prof.eval(xp, 8) == prof.eval(xp, 3));
  auto fin = prof.eval_final(xp);
  CHECK(fin.carved);
  CHECK(fin.carve_level == 2);
  CHECK(fin.value == prof.eval(xp, 3));
  // singular marker
  CHECK(std::isinf(prof.eval(sk.left(3, 2), 8)));
  CHECK(prof.eval(sk.left(3, 2), 8) < 0.0);
  // f <= M(n) everywhere (sampled)
  for (int i = 1; i < 400; ++i) {
    double t = i / 400.0;
    double v = prof.eval(t, 8);
    if (std::isfinite(v)) CHECK(v <= prof.plateau(8) + 1e-12);
  }
}

TEST_CASE("increment integral band (Eq-10 style desk check)") {
  auto prof = BoundaryProfile::build(make_skel(0, 13), 13);
  for (int n = 5; n <= 12; ++n) {
    uint64_t k = prof.skeleton().count(n - 1) / 2;
    double v = prof.abs_increment_integral(n, k);
    double target = std::ldexp(2.0, -n) / std::pow(std::log(static_cast<double>(n)), 1.5);
    double ratio = v / target;
    CHECK(ratio >= 1.0 / 8.0);
    CHECK(ratio <= 8.0);
  }
}

TEST_CASE("increment pieces partition the half-intervals of K_n") {
  auto prof = BoundaryProfile::build(make_skel(9, 6), 6);
  std::vector<ProfilePiece> ps;
  prof.increment_pieces(3, 5, ps);
  REQUIRE(ps.size() == 6);
  const auto& sk = prof.skeleton();
  CHECK(ps[0].lo == sk.left(3, 5));
  CHECK(ps[2].hi == sk.mid(3, 5));
  CHECK(ps[3].lo == sk.mid(3, 5));
  CHECK(ps[5].hi == sk.right(3, 5));
  for (size_t i = 0; i + 1 < ps.size(); ++i) CHECK(ps[i].hi == ps[i + 1].lo);
  // increment vanishes in the mean over each half (piecewise route)
  double acc0 = integrate_piece(ps[0]) + (ps[1].value * ps[1].width()) + integrate_piece(ps[2]);
  CHECK(std::fabs(acc0) <= 1e-10 * sk.sigma(3));
}
