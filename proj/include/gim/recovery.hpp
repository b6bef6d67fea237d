#pragma once

#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "gim/grouping.hpp"
#include "gim/operators.hpp"

namespace gim {

struct RecoveryProblem {
  CMatrix a_omega;  // M x N
  CVector y;        // length M
  double tol_feas = 1e-8;
  double tol_obj = 1e-6;
  int max_iters = 20000;
};

struct RecoveryResult {
  CVector c_hat;
  double feas_residual = 0.0;  // ||A c - y|| / ||y||
  double objective = 0.0;      // ||c||_1
  double dual_bound = 0.0;     // certified lower bound on the optimal objective
  int iterations = 0;
  bool converged = false;
  bool full_row_rank = true;
};

inline double l1_norm(const CVector& c) { return c.cwiseAbs().sum(); }

/// ||s - s_hat|| / ||s||.
inline double nre(const CVector& s_true, const CVector& s_hat) {
  require(s_true.size() == s_hat.size(), "nre: length mismatch");
  const double ns = s_true.norm();
  require(ns > 0.0, "nre: true signal is zero");
  return (s_true - s_hat).norm() / ns;
}

namespace detail {

inline void soft_threshold(CVector& v, double tau) {
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    v(i) = a > tau ? v(i) * ((a - tau) / a) : Complex(0.0);
  }
}

inline double spectral_norm_estimate(const CMatrix& a, int iters = 50) {
  if (a.size() == 0) return 0.0;
  CVector v = CVector::Constant(a.cols(), Complex(1.0, 0.5));
  v.normalize();
  double s = 0.0;
  for (int k = 0; k < iters; ++k) {
    CVector w = a.adjoint() * (a * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    s = std::sqrt(nw);
    v = w / nw;
  }
  return s;
}

/// Minimum-norm correction onto {c : A c = y}.
class AffineProjector {
 public:
  AffineProjector(const CMatrix& a, const CVector& y) : a_(a), y_(y) {
    const CMatrix gram = a * a.adjoint();
    orthonormal_ = max_abs(gram - CMatrix::Identity(gram.rows(), gram.cols())) <= 1e-12;
    if (!orthonormal_) {
      ldlt_.compute(gram);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
      const double lmax = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
      full_rank_ = es.eigenvalues().size() == 0 || es.eigenvalues().minCoeff() > 1e-12 * std::max(lmax, 1.0);
    }
  }

  /// (A A^H)^{-1} r
  CVector solve(const CVector& r) const { return orthonormal_ ? r : CVector(ldlt_.solve(r)); }

  CVector project(const CVector& v) const { return v - a_.adjoint() * solve(a_ * v - y_); }

  bool full_rank() const { return full_rank_; }

 private:
  const CMatrix& a_;
  const CVector& y_;
  bool orthonormal_ = false;
  bool full_rank_ = true;
  Eigen::LDLT<CMatrix> ldlt_;
};

}  // namespace detail

/// min ||c||_1 subject to A_omega c = y, by ADMM on the splitting
/// c = z with c restricted to the affine constraint set and z carrying the
/// l1 term. The scaled multiplier doubles as a dual estimate, which yields a
/// certified duality gap; the solver stops when the gap falls below
/// tol_obj * 1e-2 with the iterate feasible, or when iterates stall.
inline RecoveryResult basis_pursuit(const RecoveryProblem& p) {
  const CMatrix& a = p.a_omega;
  const Index n = a.cols();
  require(p.y.size() == a.rows(), "basis_pursuit: measurement length mismatch");
  require(a.allFinite() && p.y.allFinite(), "basis_pursuit: non-finite input");
  require(p.tol_feas > 0 && p.tol_obj > 0 && p.max_iters > 0, "basis_pursuit: invalid tolerances");

  RecoveryResult res;
  res.c_hat = CVector::Zero(n);
  const double ny = p.y.norm();
  if (ny == 0.0 || n == 0) {
    res.converged = true;
    return res;
  }

  detail::AffineProjector proj(a, p.y);
  res.full_row_rank = proj.full_rank();
  auto feas = [&](const CVector& c) { return (a * c - p.y).norm() / ny; };

  const CVector c_ln = proj.project(CVector::Zero(n));  // least-norm solution
  const double sigma = detail::spectral_norm_estimate(a);
  const double cmax = std::max(c_ln.cwiseAbs().maxCoeff(), 1e-300);
  double rho = sigma * sigma / (0.1 * cmax);

  CVector z = c_ln, u = CVector::Zero(n), x(n), z_prev(n);
  std::optional<CVector> best;
  double best_obj = std::numeric_limits<double>::infinity();
  const double alpha = 1.6;
  const double gap_tol = 1e-2 * p.tol_obj;

  // Dual bound: lambda = (A A^H)^{-1} A w scaled so ||A^H lambda||_inf <= 1,
  // then Re <lambda, y> <= optimal objective.
  auto dual_bound = [&](const CVector& w) {
    const CVector lam = proj.solve(a * w);
    const double sup = (a.adjoint() * lam).cwiseAbs().maxCoeff();
    if (sup == 0.0) return 0.0;
    return std::real(lam.dot(p.y)) / std::max(1.0, sup);
  };

  // Least squares on the support of z; an exact optimum when the support is right.
  auto polish = [&](const CVector& zz) -> std::optional<CVector> {
    std::vector<Index> s;
    for (Index i = 0; i < n; ++i)
      if (zz(i) != Complex(0.0)) s.push_back(i);
    if (s.empty() || static_cast<Index>(s.size()) > a.rows()) return std::nullopt;
    CMatrix as(a.rows(), static_cast<Index>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j) as.col(static_cast<Index>(j)) = a.col(s[j]);
    const CVector cs = as.colPivHouseholderQr().solve(p.y);
    CVector c = CVector::Zero(n);
    for (std::size_t j = 0; j < s.size(); ++j) c(s[j]) = cs(static_cast<Index>(j));
    if (!c.allFinite()) return std::nullopt;
    return c;
  };

  auto consider = [&](const CVector& c) {
    if (feas(c) > p.tol_feas) return;
    const double obj = l1_norm(c);
    if (obj < best_obj) {
      best_obj = obj;
      best = c;
    }
  };

  int it = 0;
  bool done = false;
  for (; it < p.max_iters && !done; ++it) {
    x = proj.project(z - u);
    const CVector xh = alpha * x + (1.0 - alpha) * z;
    z_prev = z;
    z = xh + u;
    detail::soft_threshold(z, 1.0 / rho);
    u += xh - z;

    const double r_norm = (x - z).norm();
    const double s_norm = rho * (z - z_prev).norm();
    const double scale = std::max({x.norm(), z.norm(), 1e-300});

    if (it % 10 == 9 || r_norm + s_norm <= 1e-13 * scale) {
      consider(x);
      if (auto c = polish(z)) {
        consider(*c);
      }
      if (best) {
        const double lb = dual_bound(rho * u);
        res.dual_bound = std::max(res.dual_bound, lb);
        if (best_obj - res.dual_bound <= gap_tol * best_obj) done = true;
      }
      if (r_norm <= 1e-13 * scale && s_norm <= 1e-13 * rho * scale) done = true;
    }

    // Residual balancing; the projection does not depend on rho.
    if (it % 10 == 0) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        u /= 2.0;
      } else if (s_norm > 10.0 * r_norm) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }

  consider(x);
  res.iterations = it;
  res.c_hat = best ? *best : x;
  res.feas_residual = feas(res.c_hat);
  res.objective = l1_norm(res.c_hat);
  res.converged = done && res.feas_residual <= p.tol_feas;
  return res;
}

inline RecoveryProblem make_problem(const MeasurementEnsemble& e, const std::vector<Index>& omega,
                                    const CVector& c0) {
  require(c0.size() == e.n(), "make_problem: coefficient length mismatch");
  RecoveryProblem p;
  p.a_omega.resize(static_cast<Index>(omega.size()), e.n());
  for (std::size_t i = 0; i < omega.size(); ++i) {
    require(omega[i] >= 0 && omega[i] < e.n(), "make_problem: row index out of range");
    p.a_omega.row(static_cast<Index>(i)) = e.a().row(omega[i]);
  }
  p.y = p.a_omega * c0;
  return p;
}

struct CertificateReport {
  bool invertible = false;
  double min_singular = 0.0;  // smallest singular value of A_OT^H A_OT
  CVector pi;                 // empty when not invertible
  double max_offsupport = 0.0;
  bool signs_match = false;
  bool holds = false;
  CMatrix cross;              // A_O^H A_OT; row t0 is v0 for t0 outside T
};

inline constexpr double kCertificateStrictMargin = 1e-9;

/// Candidate dual vector pi = A_O^H A_OT (A_OT^H A_OT)^{-1} z.
inline CertificateReport dual_certificate(const MeasurementEnsemble& e, const SampleSet& omega,
                                          const SupportSet& t, const CVector& z) {
  require(z.size() == static_cast<Index>(t.size()), "dual_certificate: sign vector length mismatch");
  CertificateReport rep;
  const CMatrix a_o = submatrix(e, omega.omega, SupportSet::all(e.n()));
  CMatrix a_ot(a_o.rows(), static_cast<Index>(t.size()));
  for (std::size_t j = 0; j < t.size(); ++j) a_ot.col(static_cast<Index>(j)) = a_o.col(t.indices()[j]);
  rep.cross = a_o.adjoint() * a_ot;
  if (t.empty()) {
    rep.invertible = true;
    rep.pi = CVector::Zero(e.n());
    rep.signs_match = true;
    rep.holds = true;
    return rep;
  }
  const CMatrix gram = a_ot.adjoint() * a_ot;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  rep.min_singular = std::max(0.0, es.eigenvalues().minCoeff());
  rep.invertible = static_cast<Index>(omega.omega.size()) >= static_cast<Index>(t.size()) &&
                   rep.min_singular > 1e-10;
  if (!rep.invertible) return rep;
  const CVector w = gram.ldlt().solve(z);
  rep.pi = rep.cross * w;
  rep.signs_match = true;
  for (std::size_t j = 0; j < t.size(); ++j)
    if (std::abs(rep.pi(t.indices()[j]) - z(static_cast<Index>(j))) > 1e-8) rep.signs_match = false;
  for (Index k : t.complement(e.n())) rep.max_offsupport = std::max(rep.max_offsupport, std::abs(rep.pi(k)));
  rep.holds = rep.signs_match && rep.max_offsupport <= 1.0 - kCertificateStrictMargin;
  return rep;
}

/// Unit-modulus signs of c restricted to t.
inline CVector support_signs(const CVector& c, const SupportSet& t) {
  CVector z(static_cast<Index>(t.size()));
  for (std::size_t j = 0; j < t.size(); ++j) {
    const Complex v = c(t.indices()[j]);
    const double a = std::abs(v);
    z(static_cast<Index>(j)) = a > 0 ? v / a : Complex(0.0);
  }
  return z;
}

}  // namespace gim
