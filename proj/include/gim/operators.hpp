#pragma once

#include <span>
#include <string>
#include <vector>

#include "gim/core.hpp"
#include "gim/haar.hpp"

namespace gim {

enum class BasisKind { Identity, Dft1D, Dft2D, Haar2D, Custom };

inline std::string to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Identity: return "identity";
    case BasisKind::Dft1D: return "dft1d";
    case BasisKind::Dft2D: return "dft2d";
    case BasisKind::Haar2D: return "haar2d";
    case BasisKind::Custom: return "custom";
  }
  return "?";
}

/// Image geometry for the 2-D kinds; rows = n, cols = 1 otherwise.
struct BasisShape {
  Index rows = 0;
  Index cols = 0;
  int levels = 0;
};

inline constexpr double kUnitaryTol = 1e-10;

/// An N x N unitary matrix whose columns are the basis atoms.
class OrthonormalBasis {
 public:
  /// Wraps an arbitrary matrix; throws unless it is square and unitary.
  static OrthonormalBasis custom(CMatrix entries) {
    require(entries.rows() == entries.cols() && entries.rows() > 0,
            "custom basis must be square and non-empty");
    OrthonormalBasis b(BasisKind::Custom, {entries.rows(), 1, 0}, std::move(entries));
    require(b.unitarity_residual() <= kUnitaryTol, "custom basis is not unitary");
    return b;
  }

  BasisKind kind() const { return kind_; }
  const BasisShape& shape() const { return shape_; }
  Index n() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }

  /// max |E^H E - I|.
  double unitarity_residual() const {
    const CMatrix g = entries_.adjoint() * entries_;
    return max_abs(g - CMatrix::Identity(n(), n()));
  }

  CVector synthesize(const CVector& c) const { return entries_ * c; }
  CVector analyze(const CVector& x) const { return entries_.adjoint() * x; }

 private:
  OrthonormalBasis(BasisKind k, BasisShape s, CMatrix e)
      : kind_(k), shape_(s), entries_(std::move(e)) {}

  friend OrthonormalBasis make_basis(BasisKind, Index);
  friend OrthonormalBasis make_basis(BasisKind, Index, Index, int);

  BasisKind kind_;
  BasisShape shape_;
  CMatrix entries_;
};

namespace detail {

inline CMatrix dft_matrix(Index n) {
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) {
      // Reduce jk mod n first so large products keep full phase accuracy.
      const double t = -2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n);
      f(j, k) = scale * Complex(std::cos(t), std::sin(t));
    }
  return f;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

/// One-dimensional kinds: Identity and Dft1D.
inline OrthonormalBasis make_basis(BasisKind kind, Index n) {
  require(n >= 1, "basis dimension must be positive");
  switch (kind) {
    case BasisKind::Identity:
      return {kind, {n, 1, 0}, CMatrix::Identity(n, n)};
    case BasisKind::Dft1D:
      return {kind, {n, 1, 0}, detail::dft_matrix(n)};
    default:
      throw Error("make_basis(kind, n): " + to_string(kind) + " needs a rows x cols shape");
  }
}

/// Two-dimensional kinds over a rows x cols image, row-major pixel order.
/// levels < 0 selects the maximal Haar decomposition.
inline OrthonormalBasis make_basis(BasisKind kind, Index rows, Index cols, int levels = -1) {
  require(rows >= 1 && cols >= 1, "basis dimensions must be positive");
  switch (kind) {
    case BasisKind::Identity:
    case BasisKind::Dft1D: {
      auto b = make_basis(kind, rows * cols);
      b.shape_ = {rows, cols, 0};
      return b;
    }
    case BasisKind::Dft2D:
      return {kind, {rows, cols, 0}, detail::kron(detail::dft_matrix(rows), detail::dft_matrix(cols))};
    case BasisKind::Haar2D: {
      require(is_power_of_two(rows) && is_power_of_two(cols),
              "Haar2D requires power-of-two dimensions");
      if (levels < 0) levels = haar::max_levels(rows, cols);
      return {kind, {rows, cols, levels}, haar::synthesis_matrix(rows, cols, levels).cast<Complex>()};
    }
    case BasisKind::Custom:
      break;
  }
  throw Error("make_basis: use OrthonormalBasis::custom for custom bases");
}

/// Strictly increasing column indices into the sparsity domain.
class SupportSet {
 public:
  SupportSet() = default;

  SupportSet(std::vector<Index> indices, Index n) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      require(indices_[i] >= 0 && indices_[i] < n,
              "support index out of range: " + std::to_string(indices_[i]));
      require(i == 0 || indices_[i] > indices_[i - 1], "support indices must be strictly increasing");
    }
  }

  static SupportSet from_unsorted(std::vector<Index> indices, Index n) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return {std::move(indices), n};
  }

  static SupportSet all(Index n) {
    std::vector<Index> v(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) v[i] = i;
    return {std::move(v), n};
  }

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  const std::vector<Index>& indices() const { return indices_; }
  bool contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

  /// Indices of {0..n-1} not in the support.
  std::vector<Index> complement(Index n) const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(n) - indices_.size());
    std::size_t j = 0;
    for (Index i = 0; i < n; ++i) {
      if (j < indices_.size() && indices_[j] == i) {
        ++j;
        continue;
      }
      out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<Index> indices_;
};

/// A = V^H U together with its coherence.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(CMatrix a) : a_(std::move(a)) {
    require(a_.rows() == a_.cols() && a_.rows() > 0, "ensemble matrix must be square");
    mu_ = max_abs(a_);
  }

  const CMatrix& a() const { return a_; }
  double mu() const { return mu_; }
  Index n() const { return a_.rows(); }

  double orthogonality_residual() const {
    return max_abs(a_.adjoint() * a_ - CMatrix::Identity(n(), n()));
  }

  bool is_real(double tol = 0.0) const { return gim::is_real(a_, tol); }

 private:
  CMatrix a_;
  double mu_ = 0.0;
};

inline MeasurementEnsemble make_ensemble(const OrthonormalBasis& v, const OrthonormalBasis& u) {
  require(v.n() == u.n(), "make_ensemble: dimension mismatch (" + std::to_string(v.n()) +
                              " vs " + std::to_string(u.n()) + ")");
  return MeasurementEnsemble(v.entries().adjoint() * u.entries());
}

/// Rows `rows` and columns `t` of A.
inline CMatrix submatrix(const MeasurementEnsemble& e, std::span<const Index> rows, const SupportSet& t) {
  const auto& cols = t.indices();
  CMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < e.n(), "submatrix: row index out of range");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      require(cols[j] < e.n(), "submatrix: column index out of range");
      out(static_cast<Index>(i), static_cast<Index>(j)) = e.a()(rows[i], cols[j]);
    }
  }
  return out;
}

struct NormalizedRows {
  CMatrix m;
  bool has_zero_rows = false;
};

/// Rows with Euclidean norm at or below zero_tol are treated as zero and kept zero.
inline NormalizedRows normalize_rows(const CMatrix& m, double zero_tol = 1e-13) {
  NormalizedRows out{m, false};
  for (Index r = 0; r < m.rows(); ++r) {
    const double nr = m.row(r).norm();
    if (nr <= zero_tol) {
      out.m.row(r).setZero();
      out.has_zero_rows = true;
    } else {
      out.m.row(r) /= nr;
    }
  }
  return out;
}

}  // namespace gim
