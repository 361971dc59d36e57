#pragma once

#include <algorithm>
#include <map>
#include <mutex>

#include "nullseries/field.hpp"

namespace nullseries {

// Frozen tail-band constants for the successive-difference estimate
// |f_{n+1}^{(D)} - f_n^{(D)}|(z) <= TAIL_C[D] 2^{-n} / d(z,K_n)^{D+1}.
// Calibrated on a seed-0 run over ranks 4..16, ladder d in [2^-14, 2^-3],
// then frozen; all tail certificates use these values.
inline constexpr double TAIL_C[KERNEL_D_MAX + 1] = {6.0, 40.0, 500.0, 9000.0, 2.0e5};

inline double tail_bound_value(int rank, double dist, int D) {
  return TAIL_C[D] * std::ldexp(1.0, -rank) / std::pow(dist, D + 1);
}

/// Rank-selection rules: the contour rule N(m) = floor(c_trunc log m)
/// (natural log) and a pointwise (tolerance, distance) -> rank table from
/// the frozen tail constants.
struct TruncationPolicy {
  double c_trunc = 2.0;
  int max_rank = 16;

  int contour_rank(double m) const {
    int n = static_cast<int>(std::floor(c_trunc * std::log(std::max(m, 3.0))));
    return std::clamp(n, 3, max_rank);
  }

  int pointwise_rank(double tol, double dist, int D) const {
    for (int n = 3; n <= max_rank; ++n)
      if (tail_bound_value(n, dist, D) <= tol) return n;
    return max_rank;
  }

  int required_rank(double tol, double dist, int D) const {
    double v = TAIL_C[D] / (tol * std::pow(dist, D + 1));
    return v <= 1.0 ? 3 : static_cast<int>(std::ceil(std::log2(v)));
  }
};

/// Lazily built per-rank evaluators over one shared profile.
class FieldBank {
 public:
  explicit FieldBank(std::shared_ptr<const BoundaryProfile> prof, FieldOptions opt = {})
      : prof_(std::move(prof)), opt_(opt) {}

  const HarmonicField& at(int rank) const {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(rank);
    if (it == cache_.end())
      it = cache_.emplace(rank, std::make_unique<HarmonicField>(prof_, rank, opt_)).first;
    return *it->second;
  }

  const BoundaryProfile& profile() const { return *prof_; }
  std::shared_ptr<const BoundaryProfile> profile_ptr() const { return prof_; }
  int max_rank() const { return prof_->rank(); }

 private:
  std::shared_ptr<const BoundaryProfile> prof_;
  FieldOptions opt_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<HarmonicField>> cache_;
};

struct EvalReport {
  double value = 0.0;
  double err = 0.0;
};

inline bool on_circle(cplx z) { return std::fabs(std::abs(z) - 1.0) < 1e-13; }

/// D-th tangential derivative of the Poisson extension of f_n at z.
/// On the circle itself the extension derivative reduces to the local
/// derivative of the boundary profile.
inline EvalReport poisson_eval(const FieldBank& bank, int rank, cplx z, int D,
                               double tol = 1e-10) {
  if (D < 0 || D > KERNEL_D_MAX) throw std::invalid_argument("poisson_eval: D");
  if (on_circle(z)) {
    double x = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
    if (bank.profile().skeleton().is_singular(x, rank))
      throw std::domain_error("poisson_eval: boundary point is singular");
    double v = D == 0 ? bank.profile().eval(x, rank) : bank.profile().eval_final_dn(x, D);
    return {v, 0.0};
  }
  auto r = bank.at(rank).eval_disk(z, D, tol);
  return {r.value.real(), r.err};
}

/// D-th tangential derivative of the conjugate extension, normalized to
/// vanish at the origin.  On the circle only D = 0 is provided (the
/// principal-value route); evaluate derivatives at interior points.
inline EvalReport conjugate_eval(const FieldBank& bank, int rank, cplx z, int D,
                                 double tol = 1e-10) {
  if (D < 0 || D > KERNEL_D_MAX) throw std::invalid_argument("conjugate_eval: D");
  if (on_circle(z)) {
    if (D != 0)
      throw std::domain_error("conjugate_eval: boundary derivatives unsupported; use |z|<1");
    double x = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
    if (bank.profile().skeleton().is_singular(x, rank))
      throw std::domain_error("conjugate_eval: boundary point is singular");
    auto b = bank.at(rank).eval_boundary(x, tol);
    return {b.conj, b.err};
  }
  auto r = bank.at(rank).eval_disk(z, D, tol);
  return {r.value.imag(), r.err};
}

struct LimitEval {
  double value = 0.0;
  double conj_value = 0.0;
  double quad_err = 0.0;
  double tail_bound = 0.0;
  int rank_used = 0;
  bool achieved = false;
  int required_rank = 0;
};

/// Truncated limit field: evaluates f_N, conj f_N at the policy rank and
/// certifies the remaining tail from the frozen geometric bands.
inline LimitEval limit_eval(const FieldBank& bank, const TruncationPolicy& pol, cplx z,
                            int D, double tol) {
  LimitEval out;
  double d = bank.profile().skeleton().distance_to_Kn(z, bank.max_rank());
  if (!(d > 0.0)) throw std::domain_error("limit_eval: z touches the singular set");
  int want = pol.pointwise_rank(tol, d, D);
  int N = std::min(want, bank.max_rank());
  out.rank_used = N;
  out.required_rank = pol.required_rank(tol, d, D);
  out.tail_bound = tail_bound_value(N, d, D);
  out.achieved = out.tail_bound <= tol;
  if (on_circle(z)) {
    double x = frac(std::atan2(z.imag(), z.real()) / TWO_PI);
    out.value = D == 0 ? bank.profile().eval(x, N) : bank.profile().eval_final_dn(x, D);
    if (D == 0) {
      auto b = bank.at(N).eval_boundary(x, tol);
      out.conj_value = b.conj;
      out.quad_err = b.err;
    }
    return out;
  }
  auto r = bank.at(N).eval_disk(z, D, tol);
  out.value = r.value.real();
  out.conj_value = r.value.imag();
  out.quad_err = r.err;
  return out;
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

struct BoundaryAuditRow {
  double x = 0.0;
  double dist = 0.0;     // Euclidean distance to K'
  int D = 0;
  double value = 0.0;    // f^{(D)}(x)
  double product = 0.0;  // |f^{(D)}(x)| d^{D+1}
  bool carved = false;
};

struct BoundaryAuditReport {
  std::vector<BoundaryAuditRow> rows;
  double band_min = 0.0, band_max = 0.0;
  double envelope_c = 0.0;  // largest c >= 0 with f + c log(1/d) sqrt(log log 1/d) <= 0
};

/// Derivative-growth and envelope audit on boundary samples off K'.
inline BoundaryAuditReport boundary_bounds_audit(const BoundaryProfile& prof,
                                                 const std::vector<double>& samples,
                                                 int D) {
  BoundaryAuditReport rep;
  rep.band_min = std::numeric_limits<double>::infinity();
  rep.band_max = 0.0;
  rep.envelope_c = std::numeric_limits<double>::infinity();
  const auto& sk = prof.skeleton();
  for (double x : samples) {
    BoundaryAuditRow row;
    row.x = x;
    row.D = D;
    row.dist = sk.distance_to_Kprime(unit_circle(x));
    auto fv = prof.eval_final(x);
    row.carved = fv.carved;
    row.value = D == 0 ? fv.value : prof.eval_final_dn(x, D);
    row.product = std::fabs(row.value) * std::pow(row.dist, D + 1);
    if (row.carved && row.product > 0.0) {
      rep.band_min = std::min(rep.band_min, row.product);
      rep.band_max = std::max(rep.band_max, row.product);
    }
    if (D == 0 && row.carved && row.dist < 0.2) {
      double lg = std::log(1.0 / row.dist);
      if (lg > 1.05) {
        double denom = lg * std::sqrt(std::log(lg));
        if (denom > 0.0) rep.envelope_c = std::min(rep.envelope_c, -fv.value / denom);
      }
    }
    rep.rows.push_back(row);
  }
  if (!std::isfinite(rep.envelope_c)) rep.envelope_c = 0.0;
  if (rep.envelope_c < 0.0) rep.envelope_c = 0.0;
  return rep;
}

struct DifferenceBandRow {
  int n = 0;
  double d = 0.0;
  int D = 0;
  double product = 0.0;  // max over anchors of |Delta_n^{(D)}(z)| 2^n d^{D+1}
};

/// Successive-difference decay audit: measures
/// |f_{n+1}^{(D)}(z) - f_n^{(D)}(z)| 2^n d(z,K_n)^{D+1} on radial ladders
/// anchored above K_n.
inline std::vector<DifferenceBandRow> difference_band_audit(
    const FieldBank& bank, const std::vector<int>& n_list,
    const std::vector<double>& d_list, const std::vector<int>& D_list, int jobs = 1) {
  struct Task {
    int n, D;
    double d;
  };
  std::vector<Task> tasks;
  for (int n : n_list)
    for (double d : d_list)
      for (int D : D_list) tasks.push_back({n, D, d});
  std::vector<DifferenceBandRow> rows(tasks.size());
  const double anchors_frac[4] = {0.07, 0.33, 0.58, 0.81};
  // fields are built once up-front so parallel tasks only read
  int nmax = 0;
  for (int n : n_list) nmax = std::max(nmax, n + 1);
  for (int n : n_list) {
    bank.at(n);
    bank.at(n + 1);
  }
  parallel_for(tasks.size(), jobs, [&](size_t i) {
    const Task& t = tasks[i];
    const auto& sk = bank.profile().skeleton();
    double best = 0.0;
    for (double q : anchors_frac) {
      uint64_t k = static_cast<uint64_t>(q * static_cast<double>(sk.count(t.n)));
      double x = sk.mid(t.n, k);
      cplx z = (1.0 - t.d) * unit_circle(x);
      auto hi = bank.at(t.n + 1).eval_disk(z, t.D, 1e-12);
      auto lo = bank.at(t.n).eval_disk(z, t.D, 1e-12);
      double diff = std::fabs(hi.value.real() - lo.value.real());
      best = std::max(best, diff);
    }
    rows[i] = {t.n, t.d, t.D,
               best * std::ldexp(1.0, t.n) * std::pow(t.d, t.D + 1)};
  });
  return rows;
}

}  // namespace nullseries
