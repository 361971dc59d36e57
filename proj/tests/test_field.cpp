#include <catch2/catch_amalgamated.hpp>
#include <memory>

#include "nullseries/harmonic.hpp"

using namespace nullseries;

namespace {
std::shared_ptr<const BoundaryProfile> make_profile(uint64_t seed, int rank) {
  auto sk = std::make_shared<IntervalSkeleton>(IntervalSkeleton::build(seed, rank));
  return std::make_shared<BoundaryProfile>(BoundaryProfile::build(sk, rank));
}
}  // namespace

TEST_CASE("mean-value conservation: field vanishes at the origin") {
  auto prof = make_profile(0, 7);
  for (int n : {2, 4, 7}) {
    HarmonicField f(prof, n);
    auto r = f.eval_disk(cplx(0.0, 0.0), 0);
    CHECK(std::abs(r.value) <= 1e-9);
  }
}

TEST_CASE("tree evaluation matches the direct quadrature route") {
  auto prof = make_profile(3, 5);
  HarmonicField f(prof, 5);
  const auto& sk = prof->skeleton();
  std::vector<cplx> pts;
  pts.push_back(0.5 * unit_circle(0.23));
  pts.push_back(0.95 * unit_circle(sk.mid(4, 7)));
  pts.push_back(0.999 * unit_circle(sk.mid(5, 12)));
  auto w = sk.half_windows(3, 2, 1);
  pts.push_back(0.98 * unit_circle(0.5 * (w.wl_lo + w.wl_hi)));
  for (cplx z : pts) {
    auto ref = schwarz_reference(*prof, 5, z, 0, 1e-11);
    auto got = f.eval_disk(z, 0, 1e-10);
    CHECK(std::abs(got.value - ref.value) < 2e-8 * (1.0 + std::abs(ref.value)));
  }
  // first derivative as well
  cplx z1 = 0.9 * unit_circle(0.41);
  auto refd = schwarz_reference(*prof, 5, z1, 1, 1e-11);
  auto gotd = f.eval_disk(z1, 1, 1e-10);
  CHECK(std::abs(gotd.value - refd.value) < 1e-7 * (1.0 + std::abs(refd.value)));
}

TEST_CASE("boundary conjugate matches the direct principal value route") {
  auto prof = make_profile(11, 5);
  HarmonicField f(prof, 5);
  const auto& sk = prof->skeleton();
  std::vector<double> xs;
  xs.push_back(sk.mid(5, 9));                       // plateau point
  auto w = sk.half_windows(2, 0, 0);
  xs.push_back(0.5 * (w.wl_lo + w.wl_hi));          // inside an early carve
  xs.push_back(w.wl_lo + 0.05 * (w.wl_hi - w.wl_lo));
  auto w4 = sk.half_windows(4, 5, 1);
  xs.push_back(0.5 * (w4.wr_lo + w4.wr_hi));        // inside a late carve
  for (double x : xs) {
    double ref = conjugate_reference(*prof, 5, x, 1e-11);
    double got = f.conj_boundary(x, 1e-10);
    CHECK(got == Catch::Approx(ref).margin(5e-8).epsilon(5e-8));
  }
}

TEST_CASE("interior evaluation approaches the boundary conjugate") {
  auto prof = make_profile(4, 6);
  HarmonicField f(prof, 6);
  double x = prof->skeleton().mid(6, 20);
  double fb = f.conj_boundary(x);
  auto near = f.eval_disk((1.0 - 1e-9) * unit_circle(x), 0);
  CHECK(near.value.imag() == Catch::Approx(fb).margin(2e-5));
  CHECK(near.value.real() == Catch::Approx(prof->plateau(6)).margin(2e-5));
}

TEST_CASE("symmetry at zero skew: f even, conjugate odd under reflection") {
  auto sk = std::make_shared<IntervalSkeleton>(IntervalSkeleton::build_constant_skew(0.0, 6));
  auto prof = std::make_shared<BoundaryProfile>(BoundaryProfile::build(sk, 6));
  HarmonicField f(prof, 6);
  for (double x : {0.21, 0.4401, 0.0317}) {
    double a = prof->eval(x, 6);
    double b = prof->eval(1.0 - x, 6);
    if (std::isfinite(a) && std::isfinite(b)) CHECK(a == Catch::Approx(b).margin(1e-8));
    double ca = f.conj_boundary(x);
    double cb = f.conj_boundary(1.0 - x);
    CHECK(ca == Catch::Approx(-cb).margin(1e-8));
  }
}

TEST_CASE("poisson and conjugate ops: oracles and errors") {
  auto prof = make_profile(0, 6);
  FieldBank bank(prof);
  // mean value across ranks agrees (all zero by construction)
  auto a2 = poisson_eval(bank, 2, cplx(0, 0), 0);
  auto a5 = poisson_eval(bank, 5, cplx(0, 0), 0);
  CHECK(std::fabs(a2.value - a5.value) <= 1e-9);
  // conjugate vanishes at the origin
  CHECK(std::fabs(conjugate_eval(bank, 5, cplx(0, 0), 0).value) <= 1e-9);
  // boundary evaluation at a singular point is a domain error
  double q = prof->skeleton().left(3, 1);
  CHECK_THROWS_AS(poisson_eval(bank, 6, unit_circle(q), 0), std::domain_error);
  // boundary conjugate derivatives are out of contract
  CHECK_THROWS_AS(conjugate_eval(bank, 6, unit_circle(0.317), 1), std::domain_error);
}

TEST_CASE("limit evaluation reports certified tails") {
  auto prof = make_profile(0, 10);
  FieldBank bank(prof);
  TruncationPolicy pol;
  pol.max_rank = 10;
  cplx z = 0.9 * unit_circle(0.37);
  auto le = limit_eval(bank, pol, z, 0, 1e-4);
  CHECK(le.rank_used <= 10);
  CHECK(le.tail_bound >= 0.0);
  if (le.achieved) CHECK(le.tail_bound <= 1e-4);
  // monotone truncation: tighter tolerance never uses a smaller rank
  auto le2 = limit_eval(bank, pol, z, 0, 1e-6);
  CHECK(le2.rank_used >= le.rank_used);
  // refusal is explicit when the cap is too low
  cplx zc = (1.0 - 1e-6) * unit_circle(prof->skeleton().mid(10, 1));
  auto le3 = limit_eval(bank, pol, zc, 2, 1e-12);
  CHECK(!le3.achieved);
  CHECK(le3.required_rank > 10);
}

TEST_CASE("boundary audit bands and envelope") {
  auto prof = make_profile(0, 9);
  std::vector<double> xs;
  const auto& sk = prof->skeleton();
  for (int j = 3; j <= 8; ++j) {
    auto w = sk.half_windows(j, 1, 0);
    xs.push_back(0.5 * (w.wl_lo + w.wl_hi));
    xs.push_back(w.wl_lo + 0.03 * (w.wl_hi - w.wl_lo));
  }
  auto rep0 = boundary_bounds_audit(*prof, xs, 0);
  CHECK(rep0.rows.size() == xs.size());
  CHECK(rep0.band_max >= rep0.band_min);
  CHECK(rep0.envelope_c > 0.0);
  auto rep1 = boundary_bounds_audit(*prof, xs, 1);
  CHECK(rep1.band_max > 0.0);
}
