#pragma once

// Shared fixtures for the unit tests: seeded random matrices and tolerances.

#include <cmath>
#include <cstdint>
#include <random>

#include "harness.hpp"
#include "linalg.hpp"
#include "matrix.hpp"

namespace testing {

using namespace pencilfun;

constexpr double kU = 0x1p-53;

inline SymMatrix spd(std::size_t n, double cnd, std::uint64_t seed) {
  UniformStream rng(seed);
  return random_spd(n, cnd, rng);
}

// Symmetric matrix with N(0,1) entries.
inline SymMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) m(i, j) = m(j, i) = g(rng);
  return SymMatrix::from_exact(m);
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = g(rng);
  return m;
}

// P X P^T for general P, mirrored from the exact product.
inline SymMatrix congruence(const Matrix& p, const SymMatrix& x) {
  return SymMatrix::symmetrize(multiply(multiply(p, x.dense()), p.transposed()));
}

inline SymMatrix lin(double a, const SymMatrix& x, double b, const SymMatrix& y) {
  return SymMatrix::symmetrize(a * x.dense() + b * y.dense());
}

inline Matrix vec_apply(const Matrix& m, const Matrix& x) {
  Matrix v(x.rows() * x.cols(), 1);
  for (std::size_t k = 0; k < v.rows(); ++k) v(k, 0) = x.data()[k];
  return multiply(m, v);
}

}  // namespace testing
