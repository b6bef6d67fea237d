#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised on violated preconditions: dimension mismatch, divisibility, range.
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

inline bool is_power_of_two(Index v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_exact(Index v) {
  int l = 0;
  while ((Index{1} << l) < v) ++l;
  return l;
}

// Seed mixing. splitmix64 finalizer; stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t v) {
  return mix64(seed ^ mix64(v + 0x632be59bd9b4e019ULL));
}

/// Deterministic random source. std::mt19937_64 is bit-specified by the
/// standard; the distributions below are written out so draws do not depend
/// on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller; u1 in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Complex unit_phase() {
    const double t = 2.0 * M_PI * uniform();
    return {std::cos(t), std::sin(t)};
  }

  Rng split(std::uint64_t stream) { return Rng(combine_seed(next(), stream)); }

 private:
  std::mt19937_64 engine_;
};

/// Largest absolute entry.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_real(const CMatrix& m, double tol = 0.0) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
}

}  // namespace gim
