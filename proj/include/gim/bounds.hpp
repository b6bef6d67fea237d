#pragma once

// Measurement-count bounds and Monte-Carlo checks of the two statements that
// are verifiable at small scale: concentration of the sampled Gram matrix and
// the second-moment bound on the off-support cross-correlation rows.

#include <vector>

#include <Eigen/Eigenvalues>

#include "gim/gamma.hpp"
#include "gim/grouping.hpp"
#include "gim/operators.hpp"

namespace gim {

struct BoundQuery {
  double n = 0;
  double t_size = 0;
  double mu = 0;
  double gamma = 1;
  double delta = 0.05;
  double constant = 1;  // unspecified universal constant, exposed as a knob

  void validate() const {
    require(n > 0 && t_size > 0 && mu > 0 && gamma > 0 && constant > 0, "bound query: arguments must be positive");
    require(delta > 0 && delta < 1, "bound query: delta must lie in (0, 1)");
  }
};

/// Const * N mu^2 |T| ln(N / delta): independent row sampling.
inline double bound_candes(const BoundQuery& q) {
  q.validate();
  return q.constant * q.n * q.mu * q.mu * q.t_size * std::log(q.n / q.delta);
}

/// gamma * Const * mu^3 N^{3/2} |T| ln(N / delta): grouped sampling.
inline double bound_grouped(const BoundQuery& q) {
  q.validate();
  return q.gamma * q.constant * q.mu * q.mu * q.mu * std::pow(q.n, 1.5) * q.t_size * std::log(q.n / q.delta);
}

/// (28/3) gamma N mu^2 |T| ln(|T| / delta): Gram concentration requirement.
inline double bound_gram(const BoundQuery& q) {
  q.validate();
  return 28.0 / 3.0 * q.gamma * q.n * q.mu * q.mu * q.t_size * std::log(q.t_size / q.delta);
}

struct ConcentrationStats {
  std::vector<double> deviations;  // ||(N/M) A_OT^H A_OT - I||
  double fail_rate = 0.0;          // fraction of deviations >= 1/2
  int trials = 0;

  /// Binomial standard error of fail_rate.
  double sigma() const {
    return trials > 0 ? std::sqrt(fail_rate * (1.0 - fail_rate) / trials) : 0.0;
  }
};

/// Spectral norm of a Hermitian matrix.
inline double hermitian_norm(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Gram deviation under Bernoulli group selection with probability m/n.
inline ConcentrationStats validate_gram_concentration(const MeasurementEnsemble& e, const SupportSet& t,
                                                      const GroupStructure& gs, double m, int trials,
                                                      Rng& rng) {
  require(gs.n() == e.n(), "validate_gram_concentration: size mismatch");
  require(m > 0 && m <= static_cast<double>(e.n()), "validate_gram_concentration: m out of range");
  require(trials > 0, "validate_gram_concentration: trials must be positive");
  ConcentrationStats st;
  st.trials = trials;
  const CMatrix a_t = submatrix(e, SupportSet::all(e.n()).indices(), t);
  const Index k = a_t.cols();
  const double scale = static_cast<double>(e.n()) / m;
  int fails = 0;
  for (int tr = 0; tr < trials; ++tr) {
    const SampleSet s = draw_bernoulli(gs, m, rng);
    CMatrix gram = CMatrix::Zero(k, k);
    for (Index row : s.omega) gram.noalias() += a_t.row(row).adjoint() * a_t.row(row);
    gram *= scale;
    gram -= CMatrix::Identity(k, k);
    const double dev = hermitian_norm(gram);
    st.deviations.push_back(dev);
    if (dev >= 0.5) ++fails;
  }
  st.fail_rate = static_cast<double>(fails) / trials;
  return st;
}

struct Lemma1Result {
  double empirical_mean = 0.0;  // mean of ||v0||^2
  double bound = 0.0;           // (M / sqrt(N)) mu^3 |T| gamma
  double gamma = 0.0;
  int trials = 0;
};

/// v0 is row t0 of A_O^H A_OT with its expectation (m/n) A^H A[t0, T]
/// subtracted; the subtracted term vanishes for orthogonal A.
/// gamma <= 0 computes the penalty factor here (exact when real, else its
/// certified lower bound, which keeps the comparison conservative).
inline Lemma1Result validate_lemma1(const MeasurementEnsemble& e, const SupportSet& t, const GroupStructure& gs,
                                    double m, Index t0, int trials, Rng& rng, double gamma = 0.0,
                                    const GammaOptions& gopt = {}) {
  require(gs.n() == e.n(), "validate_lemma1: size mismatch");
  require(t0 >= 0 && t0 < e.n(), "validate_lemma1: t0 out of range");
  require(!t.contains(t0), "validate_lemma1: t0 must lie outside the support");
  require(m >= 0 && m <= static_cast<double>(e.n()), "validate_lemma1: m out of range");
  require(trials > 0, "validate_lemma1: trials must be positive");
  Lemma1Result out;
  out.trials = trials;
  if (gamma <= 0.0) {
    const auto est = penalty_gamma(e, t, gs, gopt);
    gamma = est.exact ? *est.exact : est.lower;
  }
  out.gamma = gamma;

  const CMatrix a_t = submatrix(e, SupportSet::all(e.n()).indices(), t);
  const CVector col = e.a().col(t0);
  // Per-group contributions sum_{l in G_i} conj(A(l, t0)) A(l, T).
  std::vector<Eigen::RowVectorXcd> contrib;
  Eigen::RowVectorXcd expectation = Eigen::RowVectorXcd::Zero(a_t.cols());
  for (const auto& grp : gs.groups()) {
    Eigen::RowVectorXcd r = Eigen::RowVectorXcd::Zero(a_t.cols());
    for (Index l : grp) r += std::conj(col(l)) * a_t.row(l);
    expectation += r;
    contrib.push_back(std::move(r));
  }
  const double p = m / static_cast<double>(e.n());
  expectation *= p;

  double acc = 0.0;
  for (int tr = 0; tr < trials; ++tr) {
    Eigen::RowVectorXcd v = -expectation;
    for (const auto& r : contrib)
      if (rng.bernoulli(p)) v += r;
    acc += v.squaredNorm();
  }
  out.empirical_mean = acc / trials;
  out.bound = m / std::sqrt(static_cast<double>(e.n())) * std::pow(e.mu(), 3) *
              static_cast<double>(t.size()) * gamma;
  return out;
}

}  // namespace gim
