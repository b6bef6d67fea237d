#pragma once

// Penalty factor of a grouped measurement scheme: the largest 2->1 operator
// norm over the row-normalized group submatrices A[G_i, T].
//
// ||M||_{2->1} = ||M^H||_{inf->2} = max_{|u_i| <= 1} ||M^H u||_2, and the
// square of the latter is max u^H (M M^H) u over unimodular u. Everything
// below works on the g x g Gram matrix B = M M^H.
//
//   exact    sign enumeration, real field only
//   lower    fixed-point phase iteration u <- phase(B u), plus rounding of the
//            relaxed solution
//   upper    diagonal dual of max{ Re tr(B W) : W psd, diag(W) = 1 }; any
//            diagonal L with L - B psd gives ||M||^2 <= tr(L)
//
// The relaxation is within K_p^2 of the squared norm, K_p = sqrt(pi/2) for
// real and sqrt(4/pi) for complex matrices.

#include <bit>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gim/grouping.hpp"
#include "gim/operators.hpp"

namespace gim {

inline const double kPietschReal = std::sqrt(M_PI / 2.0);
inline const double kPietschComplex = std::sqrt(4.0 / M_PI);

enum class GammaMethod { ExactSignEnum, PhaseIterLower, SdpUpper, Sandwich };

inline std::string to_string(GammaMethod m) {
  switch (m) {
    case GammaMethod::ExactSignEnum: return "exact";
    case GammaMethod::PhaseIterLower: return "lower";
    case GammaMethod::SdpUpper: return "upper";
    case GammaMethod::Sandwich: return "sandwich";
  }
  return "?";
}

/// Auto: exact when the submatrices are real and g <= enum_limit, sandwich
/// otherwise. Full: exact where possible and the sandwich as well.
enum class GammaMode { Auto, Exact, Sandwich, Full };

inline GammaMode gamma_mode_from_string(const std::string& s) {
  if (s == "auto") return GammaMode::Auto;
  if (s == "exact") return GammaMode::Exact;
  if (s == "sandwich") return GammaMode::Sandwich;
  if (s == "full") return GammaMode::Full;
  throw Error("unknown gamma mode: " + s);
}

struct GammaOptions {
  GammaMode mode = GammaMode::Auto;
  int enum_limit = 20;
  int restarts = 64;        // phase-iteration starts per group
  int sdp_restarts = 3;
  int sdp_max_sweeps = 5000;
  int roundings = 16;       // randomized roundings of each relaxed solution
  std::uint64_t seed = 0;
};

struct GammaEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  GammaMethod method = GammaMethod::Sandwich;
  std::size_t argmax_group = 0;
  bool degraded = false;   // some SDP bound fell back to sqrt(g) * sigma_max
  bool zero_rows = false;  // some group submatrix had an all-zero row

  /// Headline value: exact when known, otherwise the certified upper bound.
  double value() const { return exact ? *exact : upper; }
};

/// Pietsch constant of the field the matrix lives in.
inline double pietsch_constant(bool real_field) { return real_field ? kPietschReal : kPietschComplex; }

inline double norm_2to1_exact_real(const RMatrix& m, int enum_limit = 20) {
  const Index g = m.rows();
  require(g <= enum_limit, "norm_2to1_exact_real: " + std::to_string(g) +
                               " rows exceeds enumeration limit " + std::to_string(enum_limit));
  require(g < 63, "norm_2to1_exact_real: too many rows");
  if (g == 0) return 0.0;
  // Gray-code walk over s with s_0 = +1; v tracks M^T s.
  RVector v = m.colwise().sum().transpose();
  std::vector<int> s(static_cast<std::size_t>(g), 1);
  double best = v.squaredNorm();
  std::uint64_t best_code = 0, code = 0;
  const std::uint64_t total = std::uint64_t{1} << (g - 1);
  for (std::uint64_t k = 1; k < total; ++k) {
    const int j = std::countr_zero(k) + 1;
    v -= (2.0 * s[j]) * m.row(j).transpose();
    s[j] = -s[j];
    code ^= std::uint64_t{1} << j;
    const double val = v.squaredNorm();
    if (val > best) {
      best = val;
      best_code = code;
    }
  }
  // Recompute the winner from scratch to shed drift from the running updates.
  RVector w = RVector::Zero(m.cols());
  for (Index j = 0; j < g; ++j) w += ((best_code >> j) & 1U ? -1.0 : 1.0) * m.row(j).transpose();
  return w.norm();
}

inline double norm_2to1_exact_real(const CMatrix& m, int enum_limit = 20) {
  require(is_real(m), "norm_2to1_exact_real: complex input");
  return norm_2to1_exact_real(RMatrix(m.real()), enum_limit);
}

namespace detail {

/// u <- phase(B u) until the phases settle. Returns sqrt(u^H B u) at the end.
inline double phase_iterate(const CMatrix& b, CVector& u, bool real_field, int max_iters = 200,
                            double tol = 1e-10) {
  double val = std::max(0.0, std::real(u.dot(b * u)));
  for (int it = 0; it < max_iters; ++it) {
    const CVector bu = b * u;
    double change = 0.0;
    CVector next = u;
    for (Index i = 0; i < u.size(); ++i) {
      const double mag = std::abs(bu(i));
      if (mag == 0.0) continue;
      next(i) = real_field ? Complex(bu(i).real() >= 0 ? 1.0 : -1.0, 0.0) : bu(i) / mag;
      change = std::max(change, std::abs(next(i) - u(i)));
    }
    const double nv = std::max(0.0, std::real(next.dot(b * next)));
    if (nv < val) break;  // guards against round-off cycling
    u = std::move(next);
    val = nv;
    if (change < tol) break;
  }
  return std::sqrt(val);
}

inline CVector sign_vector(Index g, std::uint64_t k) {
  // k-th vector in Gray order with the first entry fixed to +1.
  const std::uint64_t gray = k ^ (k >> 1);
  CVector u(g);
  for (Index j = 0; j < g; ++j) u(j) = (j > 0 && ((gray >> (j - 1)) & 1U)) ? -1.0 : 1.0;
  return u;
}

inline CVector random_start(Index g, bool real_field, Rng& rng) {
  CVector u(g);
  for (Index j = 0; j < g; ++j)
    u(j) = real_field ? Complex(rng.bernoulli(0.5) ? 1.0 : -1.0, 0.0) : rng.unit_phase();
  return u;
}

}  // namespace detail

struct LowerOptions {
  int restarts = 64;
  bool sign_starts_first = false;  // begin with the 2^(g-1) sign vectors
};

/// Lower bound on ||m||_{2->1}: best value found by phase iteration over a
/// prefix-stable sequence of starts. Real matrices stay in the real field.
inline double norm_2to1_lower(const CMatrix& m, const LowerOptions& opt, Rng& rng) {
  const Index g = m.rows();
  if (g == 0 || m.cols() == 0) return 0.0;
  const bool real_field = is_real(m);
  const CMatrix b = m * m.adjoint();
  const std::uint64_t base = rng.next();
  const std::uint64_t sign_count =
      opt.sign_starts_first && g < 62 ? (std::uint64_t{1} << (g - 1)) : 0;
  double best = 0.0;
  for (int k = 0; k < opt.restarts; ++k) {
    CVector u;
    if (static_cast<std::uint64_t>(k) < sign_count) {
      u = detail::sign_vector(g, static_cast<std::uint64_t>(k));
    } else {
      Rng local(combine_seed(base, static_cast<std::uint64_t>(k)));
      u = detail::random_start(g, real_field, local);
    }
    best = std::max(best, detail::phase_iterate(b, u, real_field));
  }
  return best;
}

inline double norm_2to1_lower(const CMatrix& m, int restarts, Rng& rng) {
  return norm_2to1_lower(m, LowerOptions{restarts, false}, rng);
}

struct SdpBound {
  double upper = 0.0;       // certified
  double relaxed = 0.0;     // sqrt of the best primal objective found
  double rounded = 0.0;     // best lower bound recovered by rounding
  bool degraded = false;
};

namespace detail {

struct MixingResult {
  CMatrix r;
  double objective = 0.0;
  bool converged = false;
};

/// Coordinate ascent on unit-norm rows of R for max Re tr(B R R^H).
inline MixingResult mixing_method(const CMatrix& b, Index rank, bool real_field, Rng& rng, int max_sweeps) {
  const Index g = b.rows();
  MixingResult res;
  res.r.resize(g, rank);
  for (Index i = 0; i < g; ++i) {
    for (Index k = 0; k < rank; ++k)
      res.r(i, k) = real_field ? Complex(rng.normal(), 0.0) : Complex(rng.normal(), rng.normal());
    res.r.row(i).normalize();
  }
  auto objective = [&] { return std::real((res.r.adjoint() * b * res.r).trace()); };
  double prev = objective();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Index i = 0; i < g; ++i) {
      Eigen::RowVectorXcd h = b.row(i) * res.r - b(i, i) * res.r.row(i);
      const double nh = h.norm();
      if (nh > 0.0) res.r.row(i) = h / nh;
    }
    const double cur = objective();
    if (std::abs(cur - prev) <= 1e-14 * std::max(1.0, std::abs(cur))) {
      res.converged = true;
      prev = cur;
      break;
    }
    prev = cur;
  }
  res.objective = prev;
  return res;
}

inline double lambda_max(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace detail

/// Certified upper bound on ||m||_{2->1} from the semidefinite relaxation.
inline SdpBound norm_2to1_upper_sdp_detail(const CMatrix& m, Rng& rng, int restarts = 3,
                                           int max_sweeps = 5000, int roundings = 16) {
  SdpBound out;
  const Index g = m.rows();
  if (g == 0 || m.cols() == 0) return out;
  const bool real_field = is_real(m);
  const CMatrix b = m * m.adjoint();
  const double lmax_b = std::max(0.0, detail::lambda_max(b));
  const double trivial = std::sqrt(static_cast<double>(g) * lmax_b);
  const Index rank =
      std::min<Index>(g, static_cast<Index>(std::ceil(std::sqrt(2.0 * static_cast<double>(g)))) + 1);

  double best_upper = trivial;
  bool any_converged = false;
  for (int rs = 0; rs < std::max(1, restarts); ++rs) {
    Rng local = rng.split(static_cast<std::uint64_t>(rs));
    auto mix = detail::mixing_method(b, rank, real_field, local, max_sweeps);
    any_converged = any_converged || mix.converged;
    out.relaxed = std::max(out.relaxed, std::sqrt(std::max(0.0, mix.objective)));

    // Diagonal dual from complementary slackness, shifted into feasibility.
    const CMatrix br = b * mix.r;
    RVector lam(g);
    for (Index i = 0; i < g; ++i) lam(i) = std::real(br.row(i).dot(mix.r.row(i)));
    CMatrix slack = -b;
    slack.diagonal() += lam.cast<Complex>();
    // slack = L - B must be psd; lift by its most negative eigenvalue.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(slack, Eigen::EigenvaluesOnly);
    const double shift = std::max(0.0, -es.eigenvalues().minCoeff());
    const double upper2 = lam.sum() + static_cast<double>(g) * shift;
    best_upper = std::min(best_upper, std::sqrt(std::max(0.0, upper2)));

    // Randomized rounding of the relaxed solution, polished by phase iteration.
    for (int k = 0; k < roundings; ++k) {
      CVector z(rank);
      for (Index j = 0; j < rank; ++j)
        z(j) = real_field ? Complex(local.normal(), 0.0) : Complex(local.normal(), local.normal());
      CVector u = mix.r * z;
      for (Index i = 0; i < g; ++i) {
        const double a = std::abs(u(i));
        u(i) = a > 0.0 ? (real_field ? Complex(u(i).real() >= 0 ? 1.0 : -1.0, 0.0) : u(i) / a) : Complex(1.0);
      }
      out.rounded = std::max(out.rounded, detail::phase_iterate(b, u, real_field));
    }
  }
  out.upper = best_upper;
  out.degraded = !any_converged;
  if (out.degraded) out.upper = std::min(out.upper, trivial);
  return out;
}

inline double norm_2to1_upper_sdp(const CMatrix& m, Rng& rng) {
  return norm_2to1_upper_sdp_detail(m, rng).upper;
}

/// Bounds on the 2->1 norm of one matrix, already row-normalized.
struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> exact;
  bool degraded = false;
};

inline NormEstimate estimate_norm_2to1(const CMatrix& m, const GammaOptions& opt, Rng& rng) {
  NormEstimate est;
  const bool real_field = is_real(m);
  const bool can_exact = real_field && m.rows() <= opt.enum_limit;
  const bool want_exact = opt.mode == GammaMode::Exact || opt.mode == GammaMode::Full ||
                          (opt.mode == GammaMode::Auto && can_exact);
  const bool want_sandwich = opt.mode == GammaMode::Sandwich || opt.mode == GammaMode::Full ||
                             (opt.mode == GammaMode::Auto && !can_exact);
  if (want_exact) {
    require(can_exact, "exact gamma needs real submatrices with at most " +
                           std::to_string(opt.enum_limit) + " rows");
    est.exact = norm_2to1_exact_real(m, opt.enum_limit);
    est.lower = est.upper = *est.exact;
  }
  if (want_sandwich) {
    Rng lower_rng = rng.split(1);
    Rng sdp_rng = rng.split(2);
    const auto sdp = norm_2to1_upper_sdp_detail(m, sdp_rng, opt.sdp_restarts, opt.sdp_max_sweeps, opt.roundings);
    const double lower = std::max(norm_2to1_lower(m, opt.restarts, lower_rng), sdp.rounded);
    est.degraded = sdp.degraded;
    if (est.exact) {
      est.lower = std::min(lower, *est.exact);
      est.upper = std::max(sdp.upper, *est.exact);
    } else {
      est.lower = lower;
      est.upper = std::max(sdp.upper, lower);
    }
  }
  return est;
}

/// max over groups of ||normalize_rows(A[G_i, T])||_{2->1}.
inline GammaEstimate penalty_gamma(const MeasurementEnsemble& e, const SupportSet& t,
                                   const GroupStructure& gs, const GammaOptions& opt = {}) {
  require(gs.n() == e.n(), "penalty_gamma: group structure size " + std::to_string(gs.n()) +
                               " does not match ensemble size " + std::to_string(e.n()));
  for (Index i : t.indices()) require(i < e.n(), "penalty_gamma: support index out of range");
  GammaEstimate out;
  bool all_exact = true, any_exact = false, any_sandwich = false;
  double best_head = -1.0;
  for (std::size_t i = 0; i < gs.count(); ++i) {
    const auto nr = normalize_rows(submatrix(e, gs.group(i), t));
    out.zero_rows = out.zero_rows || nr.has_zero_rows;
    Rng rng(combine_seed(opt.seed, i));
    const NormEstimate est = estimate_norm_2to1(nr.m, opt, rng);
    out.lower = std::max(out.lower, est.lower);
    out.upper = std::max(out.upper, est.upper);
    out.degraded = out.degraded || est.degraded;
    if (est.exact) {
      any_exact = true;
      out.exact = std::max(out.exact.value_or(0.0), *est.exact);
    } else {
      all_exact = false;
    }
    any_sandwich = any_sandwich || !est.exact || opt.mode == GammaMode::Full;
    const double head = est.exact ? *est.exact : est.upper;
    if (head > best_head) {
      best_head = head;
      out.argmax_group = i;
    }
  }
  if (!all_exact) out.exact.reset();
  if (all_exact && any_exact && !any_sandwich)
    out.method = GammaMethod::ExactSignEnum;
  else
    out.method = GammaMethod::Sandwich;
  return out;
}

}  // namespace gim
