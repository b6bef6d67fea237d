#pragma once

// Orthonormal 2-D Haar transform in the Mallat layout: after each level the
// approximation band occupies the top-left quarter of the active region.
// Images and coefficient arrays are rows x cols matrices; linearization is
// row-major everywhere else in the library.

#include "gim/core.hpp"

namespace gim::haar {

inline int max_levels(Index rows, Index cols) {
  return log2_exact(std::min(rows, cols));
}

inline void check_shape(Index rows, Index cols, int levels) {
  require(is_power_of_two(rows) && is_power_of_two(cols),
          "haar: dimensions must be powers of two, got " + std::to_string(rows) + "x" +
              std::to_string(cols));
  require(levels >= 0 && levels <= max_levels(rows, cols),
          "haar: levels out of range: " + std::to_string(levels));
}

namespace detail {

template <typename Vec>
void forward_1d(Vec&& v, Index len, std::vector<double>& tmp) {
  const double s = M_SQRT1_2;
  const Index half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (Index k = 0; k < half; ++k) {
    tmp[k] = s * (v(2 * k) + v(2 * k + 1));
    tmp[half + k] = s * (v(2 * k) - v(2 * k + 1));
  }
  for (Index k = 0; k < len; ++k) v(k) = tmp[k];
}

template <typename Vec>
void inverse_1d(Vec&& v, Index len, std::vector<double>& tmp) {
  const double s = M_SQRT1_2;
  const Index half = len / 2;
  tmp.resize(static_cast<std::size_t>(len));
  for (Index k = 0; k < half; ++k) {
    tmp[2 * k] = s * (v(k) + v(half + k));
    tmp[2 * k + 1] = s * (v(k) - v(half + k));
  }
  for (Index k = 0; k < len; ++k) v(k) = tmp[k];
}

}  // namespace detail

/// Analysis: image -> coefficients.
inline RMatrix forward(RMatrix img, int levels) {
  check_shape(img.rows(), img.cols(), levels);
  std::vector<double> tmp;
  Index h = img.rows(), w = img.cols();
  for (int l = 0; l < levels; ++l) {
    for (Index r = 0; r < h; ++r) detail::forward_1d(img.row(r), w, tmp);
    for (Index c = 0; c < w; ++c) detail::forward_1d(img.col(c), h, tmp);
    h /= 2;
    w /= 2;
  }
  return img;
}

/// Synthesis: coefficients -> image. Exact inverse of forward().
inline RMatrix inverse(RMatrix coef, int levels) {
  check_shape(coef.rows(), coef.cols(), levels);
  std::vector<double> tmp;
  for (int l = levels - 1; l >= 0; --l) {
    const Index h = coef.rows() >> l, w = coef.cols() >> l;
    for (Index c = 0; c < w; ++c) detail::inverse_1d(coef.col(c), h, tmp);
    for (Index r = 0; r < h; ++r) detail::inverse_1d(coef.row(r), w, tmp);
  }
  return coef;
}

/// Row-major flatten / unflatten between matrices and length rows*cols vectors.
inline RVector flatten(const RMatrix& m) {
  RVector v(m.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) v(r * m.cols() + c) = m(r, c);
  return v;
}

inline RMatrix unflatten(const RVector& v, Index rows, Index cols) {
  require(v.size() == rows * cols, "unflatten: size mismatch");
  RMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = v(r * cols + c);
  return m;
}

/// Dense synthesis matrix: column k is the image of unit coefficient k.
inline RMatrix synthesis_matrix(Index rows, Index cols, int levels) {
  check_shape(rows, cols, levels);
  const Index n = rows * cols;
  RMatrix u(n, n);
  RMatrix unit = RMatrix::Zero(rows, cols);
  for (Index k = 0; k < n; ++k) {
    unit(k / cols, k % cols) = 1.0;
    u.col(k) = flatten(inverse(unit, levels));
    unit(k / cols, k % cols) = 0.0;
  }
  return u;
}

}  // namespace gim::haar
