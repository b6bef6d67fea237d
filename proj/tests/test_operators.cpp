#include <gtest/gtest.h>

#include "gim/operators.hpp"

namespace gim {
namespace {

TEST(Basis, IdentityIsIdentity) {
  const auto b = make_basis(BasisKind::Identity, 4);
  EXPECT_EQ(b.kind(), BasisKind::Identity);
  EXPECT_EQ(max_abs(b.entries() - CMatrix::Identity(4, 4)), 0.0);
}

TEST(Basis, DftEntriesHaveModulusOneOverSqrtN) {
  const auto b = make_basis(BasisKind::Dft1D, 4);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(b.entries()(i, j)), 0.5, 1e-15);
  // e^{-2 pi i jk / n} / sqrt(n)
  EXPECT_NEAR(std::abs(b.entries()(1, 1) - Complex(0.0, -0.5)), 0.0, 1e-15);
  EXPECT_LE(b.unitarity_residual(), kUnitaryTol);
}

TEST(Basis, HaarUnitarityResidual) {
  const auto b = make_basis(BasisKind::Haar2D, 8, 8, 3);
  EXPECT_EQ(b.shape().levels, 3);
  EXPECT_LE(b.unitarity_residual(), 1e-10);
  EXPECT_TRUE(is_real(b.entries()));
}

TEST(Basis, HaarDefaultsToMaximalLevels) {
  EXPECT_EQ(make_basis(BasisKind::Haar2D, 8, 4).shape().levels, 2);
  EXPECT_LE(make_basis(BasisKind::Haar2D, 4, 16).unitarity_residual(), 1e-10);
}

TEST(Basis, Dft2DIsUnitary) {
  const auto b = make_basis(BasisKind::Dft2D, 4, 8);
  EXPECT_EQ(b.n(), 32);
  EXPECT_LE(b.unitarity_residual(), 1e-10);
}

TEST(Basis, Errors) {
  EXPECT_THROW(make_basis(BasisKind::Haar2D, 6, 8), Error);
  EXPECT_THROW(make_basis(BasisKind::Haar2D, 8, 8, 4), Error);
  EXPECT_THROW(make_basis(BasisKind::Dft2D, 16), Error);
  EXPECT_THROW(make_basis(BasisKind::Identity, 0), Error);
  EXPECT_THROW(OrthonormalBasis::custom(CMatrix::Constant(3, 3, 1.0)), Error);
}

TEST(Basis, ParsevalForEveryKind) {
  Rng rng(3);
  for (const auto& b : {make_basis(BasisKind::Dft1D, 64), make_basis(BasisKind::Dft2D, 8, 8),
                        make_basis(BasisKind::Haar2D, 8, 8)}) {
    for (int k = 0; k < 10; ++k) {
      CVector c(b.n());
      for (Index i = 0; i < c.size(); ++i) c(i) = Complex(rng.normal(), rng.normal());
      EXPECT_NEAR(b.synthesize(c).norm() / c.norm(), 1.0, 1e-10);
    }
  }
}

TEST(Ensemble, IdentityDftIsPerfectlyIncoherent) {
  for (Index n : {16, 100, 256}) {
    const auto e = make_ensemble(make_basis(BasisKind::Identity, n), make_basis(BasisKind::Dft1D, n));
    EXPECT_NEAR(e.mu(), 1.0 / std::sqrt(static_cast<double>(n)), 1e-12);
    EXPECT_LE(e.orthogonality_residual(), 1e-10);
  }
}

TEST(Ensemble, EqualBasesGiveIdentity) {
  const auto u = make_basis(BasisKind::Haar2D, 4, 4);
  const auto e = make_ensemble(u, u);
  EXPECT_LE(max_abs(e.a() - CMatrix::Identity(16, 16)), 1e-12);
  EXPECT_NEAR(e.mu(), 1.0, 1e-12);
}

TEST(Ensemble, PixelHaarCoherenceInRange) {
  const auto e = make_ensemble(make_basis(BasisKind::Identity, 1024), make_basis(BasisKind::Haar2D, 32, 32));
  EXPECT_GE(e.mu(), 1.0 / 32.0 - 1e-12);
  EXPECT_LE(e.mu(), 1.0 + 1e-12);
  // Direct scan.
  double mx = 0.0;
  for (Index i = 0; i < e.n(); ++i)
    for (Index j = 0; j < e.n(); ++j) mx = std::max(mx, std::abs(e.a()(i, j)));
  EXPECT_EQ(mx, e.mu());
  EXPECT_LE(e.orthogonality_residual(), 1e-10);
}

TEST(Ensemble, DimensionMismatch) {
  EXPECT_THROW(make_ensemble(make_basis(BasisKind::Identity, 4), make_basis(BasisKind::Dft1D, 8)), Error);
}

TEST(Submatrix, ShapesAndEntries) {
  const auto e = make_ensemble(make_basis(BasisKind::Identity, 8), make_basis(BasisKind::Dft1D, 8));
  const auto all = SupportSet::all(8);
  EXPECT_EQ(max_abs(submatrix(e, all.indices(), all) - e.a()), 0.0);

  const auto id = make_ensemble(make_basis(BasisKind::Identity, 4), make_basis(BasisKind::Identity, 4));
  const std::vector<Index> zero{0};
  const CMatrix one = submatrix(id, zero, SupportSet({0}, 4));
  ASSERT_EQ(one.rows(), 1);
  ASSERT_EQ(one.cols(), 1);
  EXPECT_EQ(one(0, 0), Complex(1.0));

  const std::vector<Index> rows{0, 2, 4, 6};
  const SupportSet t({1, 5, 7}, 8);
  const CMatrix s = submatrix(e, rows, t);
  EXPECT_EQ(s.rows(), 4);
  EXPECT_EQ(s.cols(), 3);
  EXPECT_EQ(s(2, 1), e.a()(4, 5));

  const std::vector<Index> bad{9};
  EXPECT_THROW(submatrix(e, bad, t), Error);
}

TEST(Support, Validation) {
  EXPECT_THROW(SupportSet({3, 1}, 8), Error);
  EXPECT_THROW(SupportSet({1, 1}, 8), Error);
  EXPECT_THROW(SupportSet({8}, 8), Error);
  const auto t = SupportSet::from_unsorted({5, 1, 5, 3}, 8);
  EXPECT_EQ(t.indices(), (std::vector<Index>{1, 3, 5}));
  EXPECT_EQ(t.complement(6), (std::vector<Index>{0, 2, 4}));
}

TEST(NormalizeRows, ThreeFourFive) {
  CMatrix m(1, 2);
  m << 3.0, 4.0;
  const auto r = normalize_rows(m);
  EXPECT_NEAR(std::abs(r.m(0, 0) - 0.6), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(r.m(0, 1) - 0.8), 0.0, 1e-15);
  EXPECT_FALSE(r.has_zero_rows);
}

TEST(NormalizeRows, IdentityUnchangedAndZeroRowFlagged) {
  EXPECT_EQ(max_abs(normalize_rows(CMatrix::Identity(3, 3)).m - CMatrix::Identity(3, 3)), 0.0);
  CMatrix m = CMatrix::Zero(2, 3);
  m(0, 1) = Complex(0.0, 2.0);
  const auto r = normalize_rows(m);
  EXPECT_TRUE(r.has_zero_rows);
  EXPECT_EQ(r.m.row(1).norm(), 0.0);
  EXPECT_NEAR(std::abs(r.m(0, 1) - Complex(0.0, 1.0)), 0.0, 1e-15);
}

TEST(NormalizeRows, Idempotent) {
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    CMatrix m(5, 7);
    for (Index i = 0; i < m.size(); ++i) m(i) = Complex(rng.normal(), rng.normal());
    if (k % 4 == 0) m.row(2).setZero();
    const CMatrix once = normalize_rows(m).m;
    EXPECT_LE(max_abs(normalize_rows(once).m - once), 1e-15);
  }
}

}  // namespace
}  // namespace gim
