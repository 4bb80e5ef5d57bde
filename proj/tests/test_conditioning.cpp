#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "conditioning.hpp"
#include "errors.hpp"
#include "pencil.hpp"
#include "support.hpp"

using namespace testing;

namespace {

const FunctionSpec kLog = FunctionSpec::builtin("log");

// Tridiagonal M-matrix: positive diagonal, nonpositive off-diagonal,
// diagonally dominant.
SymMatrix tridiagonal_m_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  std::vector<double> off(n > 1 ? n - 1 : 0);
  for (double& o : off) o = -u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    if (i > 0) s += std::abs(off[i - 1]);
    if (i + 1 < n) s += std::abs(off[i]);
    m(i, i) = s + 0.01 + u(rng);
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off[i];
  }
  return SymMatrix::from_exact(m);
}

}  // namespace

TEST_CASE("frechet_apply examples") {
  std::mt19937_64 rng(1);
  const SymMatrix a = spd(4, 10.0, 1);
  const SymMatrix b = spd(4, 10.0, 2);
  const SymMatrix h = random_symmetric(4, rng);
  const SymMatrix l = random_symmetric(4, rng);
  CHECK(relative_difference(frechet_apply({a, b, h, l, FunctionSpec::builtin("identity")}), l.dense()) < 1e-13);
  CHECK(relative_difference(frechet_apply({a, b, h, l, FunctionSpec::builtin("constant_one")}), h.dense()) < 1e-13);

  const std::vector<double> d{1.0, 2.0};
  const Matrix r = frechet_apply({SymMatrix::identity(2), SymMatrix::diagonal(d), SymMatrix(2), SymMatrix::identity(2), kLog});
  CHECK(r(0, 0) == doctest::Approx(1.0));
  CHECK(r(1, 1) == doctest::Approx(0.5));
  CHECK(std::abs(r(0, 1)) < 1e-16);

  const std::vector<double> neg{1.0, -2.0};
  CHECK_THROWS_AS(frechet_apply({SymMatrix::identity(2), SymMatrix::diagonal(neg), SymMatrix(2), SymMatrix(2), kLog}),
                  Error);
}

TEST_CASE("frechet_apply matches central differences") {
  std::mt19937_64 rng(3);
  for (const FunctionSpec& f : {kLog, FunctionSpec::builtin("sqrt"), FunctionSpec::builtin("power", {{"t", 0.3}})}) {
    for (std::size_t n : {2, 5, 8}) {
      const SymMatrix a = spd(n, 20.0, 10 + n);
      const SymMatrix b = spd(n, 20.0, 20 + n);
      const SymMatrix h = random_symmetric(n, rng);
      const SymMatrix l = random_symmetric(n, rng);
      const double step = 1e-6 * norms(a).two / std::hypot(frobenius_norm(h), frobenius_norm(l));
      const SymMatrix plus = alg2_cholesky_schur(lin(1, a, step, h), lin(1, b, step, l), f).s5;
      const SymMatrix minus = alg2_cholesky_schur(lin(1, a, -step, h), lin(1, b, -step, l), f).s5;
      const Matrix fd = (1.0 / (2 * step)) * (plus.dense() - minus.dense());
      CHECK(relative_difference(frechet_apply({a, b, h, l, f}), fd) < 1e-5);
    }
  }
}

TEST_CASE("dual route agrees with the direct route") {
  std::mt19937_64 rng(4);
  for (std::size_t n : {1, 3, 9}) {
    const SymMatrix a = spd(n, n > 1 ? 1e3 : 1.0, 30 + n);
    const SymMatrix b = spd(n, n > 1 ? 1e2 : 1.0, 40 + n);
    const FrechetRequest req{a, b, random_symmetric(n, rng), random_symmetric(n, rng), FunctionSpec::builtin("sqrt")};
    CHECK(relative_difference(frechet_apply_dual(req), frechet_apply(req)) < 1e-10);
  }
}

TEST_CASE("kronecker_forms examples") {
  const KroneckerDerivative id =
      kronecker_forms(SymMatrix::identity(3), SymMatrix::identity(3), FunctionSpec::builtin("identity"));
  CHECK(relative_difference(id.m1, Matrix::identity(9)) < 1e-15);
  CHECK(frobenius_norm(id.m2) < 1e-15);

  // Scalar calculus: d/db [a log(b/a)] = 1/(b/a) / ... = f'(b/a), and
  // d/da = log(b/a) - 1 = f^'(a/b) with f^(x) = -x log x.
  const KroneckerDerivative s = kronecker_forms(SymMatrix::from_rows({{2}}), SymMatrix::from_rows({{3}}), kLog);
  CHECK(s.m1(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s.m2(0, 0) == doctest::Approx(-0.59453489189183561802).epsilon(1e-15));

  CHECK_THROWS_AS(kronecker_forms(spd(5, 2.0, 1), spd(5, 2.0, 2), kLog, 4), Error);
  try {
    kronecker_forms(spd(5, 2.0, 1), spd(5, 2.0, 2), kLog, 4);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeCapExceeded);
  }
  const std::vector<double> neg{1.0, -1.0};
  try {
    kronecker_forms(SymMatrix::identity(2), SymMatrix::diagonal(neg), kLog);
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}

TEST_CASE("Kronecker blocks reproduce frechet_apply") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {2, 4, 8}) {
    const SymMatrix a = spd(n, 1e3, 50 + n);
    const SymMatrix b = spd(n, 1e2, 60 + n);
    const KroneckerDerivative k = kronecker_forms(a, b, kLog);
    const double dnorm = kronecker_norm(k);
    for (int trial = 0; trial < 10; ++trial) {
      const SymMatrix h = random_symmetric(n, rng);
      const SymMatrix l = random_symmetric(n, rng);
      const Matrix direct = frechet_apply({a, b, h, l, kLog});
      const Matrix vh = vec_apply(k.m2, h.dense());
      const Matrix vl = vec_apply(k.m1, l.dense());
      double diff = 0.0;
      for (std::size_t i = 0; i < n * n; ++i) diff += std::pow(direct.data()[i] - vh(i, 0) - vl(i, 0), 2);
      CHECK(std::sqrt(diff) <= 1e-9 * (frobenius_norm(h) + frobenius_norm(l)) * dnorm);
    }
  }
}

TEST_CASE("cond_phi examples") {
  const ConditionReport r = cond_phi(SymMatrix::identity(3), SymMatrix::identity(3), FunctionSpec::builtin("identity"));
  CHECK(r.cond_phi == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(r.dphi_norm == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.bound_lemma3 == doctest::Approx(1.0).epsilon(1e-14));

  const ConditionReport z = cond_phi(SymMatrix::identity(1), SymMatrix::identity(1), kLog);
  CHECK(z.cond_phi == std::numeric_limits<double>::infinity());
  CHECK(z.dphi_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(z.phi_norm == 0.0);

  CHECK_THROWS_AS(cond_phi(spd(40, 2.0, 1), spd(40, 2.0, 2), kLog), Error);
}

TEST_CASE("cond_phi agrees with a finite-difference estimate") {
  const SymMatrix a = spd(3, 100.0, 7);
  const SymMatrix b = spd(3, 10.0, 8);
  const ConditionReport r = cond_phi(a, b, kLog);
  const double scale = std::hypot(frobenius_norm(a), frobenius_norm(b)) / r.phi_norm;
  const double step = 1e-7;
  const auto central = [&](const SymMatrix& h, const SymMatrix& l) {
    const SymMatrix p = alg2_cholesky_schur(lin(1, a, step, h), lin(1, b, step, l), kLog).s5;
    const SymMatrix m = alg2_cholesky_schur(lin(1, a, -step, h), lin(1, b, -step, l), kLog).s5;
    return (1.0 / (2 * step)) * (p.dense() - m.dense());
  };

  // Max over 20 random unit directions: a lower bound on ||D phi||.
  std::mt19937_64 rng(9);
  double best = 0.0;
  for (int k = 0; k < 20; ++k) {
    SymMatrix h = random_symmetric(3, rng);
    SymMatrix l = random_symmetric(3, rng);
    const double s = std::hypot(frobenius_norm(h), frobenius_norm(l));
    best = std::max(best, frobenius_norm(central(h.scaled(1.0 / s), l.scaled(1.0 / s))));
  }
  CHECK(r.cond_phi >= best * scale * (1 - 1e-6));

  // Largest singular value of the central-difference Jacobian on an
  // orthonormal basis of symmetric (H, L) pairs.
  std::vector<SymMatrix> basis;
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      SymMatrix e(3);
      e.set(i, j, i == j ? 1.0 : 1.0 / std::sqrt(2.0));
      basis.push_back(e);
    }
  const std::size_t m = basis.size();
  Matrix jac(9, 2 * m);
  for (std::size_t c = 0; c < 2 * m; ++c) {
    const Matrix col = c < m ? central(basis[c], SymMatrix(3)) : central(SymMatrix(3), basis[c - m]);
    for (std::size_t k = 0; k < 9; ++k) jac(k, c) = col.data()[k];
  }
  const double fd_norm = norms(jac).two;
  CHECK(r.cond_phi <= 1.5 * fd_norm * scale);
  CHECK(r.cond_phi >= fd_norm * scale / 1.5);
  CHECK(r.dphi_norm == doctest::Approx(fd_norm).epsilon(1e-5));
}

TEST_CASE("power iteration norm lies between column and Frobenius bounds") {
  // n = 13 takes the power-iteration path.
  const SymMatrix a = spd(13, 50.0, 1);
  const SymMatrix b = spd(13, 5.0, 2);
  const KroneckerDerivative k = kronecker_forms(a, b, kLog);
  const double pw = kronecker_norm(k);
  // Lower bound from any unit vector and upper bound from the Frobenius norm.
  CHECK(pw <= std::hypot(frobenius_norm(k.m1), frobenius_norm(k.m2)) * (1 + 1e-12));
  double col_best = 0.0;
  for (std::size_t j = 0; j < k.m1.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.m1.rows(); ++i) s += k.m1(i, j) * k.m1(i, j);
    col_best = std::max(col_best, std::sqrt(s));
  }
  CHECK(pw >= col_best * (1 - 1e-10));
}

TEST_CASE("derivative bounds") {
  // A = I, B = 4 I, f = sqrt: every F_ij = f'(4) = 1/4 and
  // f(4) - F 4 = 1, so the A-only bound is sqrt(1/16 + 1).
  const std::vector<double> four{4.0, 4.0};
  const DerivativeBounds d = derivative_norm_bounds(SymMatrix::identity(2), SymMatrix::diagonal(four),
                                                    FunctionSpec::builtin("sqrt"));
  CHECK(d.a_only == doctest::Approx(1.0307764064044151375).epsilon(1e-15));
  CHECK(d.mu_a == doctest::Approx(1.0));
  CHECK(d.mu_b == doctest::Approx(1.0));

  const DerivativeBounds i =
      derivative_norm_bounds(SymMatrix::identity(3), SymMatrix::identity(3), FunctionSpec::builtin("identity"));
  CHECK(i.mixed == doctest::Approx(1.0));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SymMatrix a = spd(5, 1e4, seed);
    const SymMatrix b = spd(5, 1e2, seed + 100);
    const ConditionReport r = cond_phi(a, b, kLog);
    CHECK(r.dphi_norm <= r.bound_lemma3 * (1 + 1e-8));
    CHECK(r.dphi_norm <= r.bound_eq14 * (1 + 1e-8));
  }
}

TEST_CASE("psi diagnostic") {
  for (std::size_t n : {1, 4, 25}) {
    CHECK(psi(TriangularFactor(Matrix::identity(n))) == std::sqrt(static_cast<double>(n)));
  }
  CHECK(psi(TriangularFactor(Matrix::from_rows({{3.5}}))) == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937_64 rng(10);
  for (std::size_t n : {2, 10, 50}) {
    const double v = psi(cholesky(tridiagonal_m_matrix(n, rng)));
    CHECK(v >= 1.0 - 1e-12);
    CHECK(v <= std::sqrt(static_cast<double>(n)) * (1 + 1e-12));
  }
  // Far from an M-matrix psi can exceed sqrt n but never drops below 1.
  const double w = psi(cholesky(spd(10, 1e6, 3)));
  CHECK(w >= 1.0 - 1e-12);
  CHECK_THROWS_AS(psi(TriangularFactor(Matrix::from_rows({{1, 1}, {0, 0}}))), Error);
}
