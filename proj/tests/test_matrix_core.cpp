#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "eigen_sym.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "support.hpp"

using namespace testing;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix rt_r(const TriangularFactor& r) { return multiply(r.dense().transposed(), r.dense()); }

}  // namespace

TEST_CASE("symmetric storage rejects asymmetric literals") {
  CHECK_THROWS_AS(SymMatrix::from_rows({{1, 2}, {3, 4}}), Error);
  const SymMatrix s = SymMatrix::symmetrize(Matrix::from_rows({{1, 2}, {4, 5}}));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
}

TEST_CASE("cholesky examples") {
  const TriangularFactor r = cholesky(SymMatrix::from_rows({{4, 2}, {2, 5}}));
  CHECK(max_abs_diff(r.dense(), Matrix::from_rows({{2, 1}, {0, 2}})) == 0.0);

  const TriangularFactor id = cholesky(SymMatrix::identity(5));
  CHECK(max_abs_diff(id.dense(), Matrix::identity(5)) == 0.0);

  try {
    cholesky(SymMatrix::from_rows({{1, 2}, {2, 1}}));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    CHECK(e.index() == 2);
  }
}

TEST_CASE("cholesky residual on random SPD matrices") {
  for (std::size_t n : {1, 5, 20, 50}) {
    for (double cnd : {1.0, 1e3, 1e6}) {
      if (n == 1 && cnd > 1) continue;
      const SymMatrix a = spd(n, cnd, 100 + n);
      const TriangularFactor r = cholesky(a);
      for (std::size_t i = 0; i < n; ++i) CHECK(r(i, i) > 0.0);
      const double res = frobenius_norm(rt_r(r) - a.dense());
      CHECK(res <= 100.0 * n * kU * frobenius_norm(a));
    }
  }
}

TEST_CASE("cholesky flop count tends to n^3/3") {
  const std::size_t n = 256;
  FlopLedger ledger;
  cholesky(spd(n, 10.0, 3), &ledger);
  const double ratio = static_cast<double>(ledger.exact.total()) / std::pow(n, 3);
  CHECK(std::abs(ratio - 1.0 / 3.0) <= 0.1 / 3.0);
  CHECK(ledger.formula == doctest::Approx(std::pow(n, 3) / 3.0));
}

TEST_CASE("eig_sym examples") {
  SUBCASE("diagonal") {
    const EigenDecomposition e = eig_sym(SymMatrix::from_rows({{3, 0}, {0, 1}}));
    CHECK(e.lambda == std::vector<double>{1.0, 3.0});
    CHECK(max_abs_diff(e.q, Matrix::from_rows({{0, 1}, {1, 0}})) == 0.0);
  }
  SUBCASE("exchange matrix") {
    const EigenDecomposition e = eig_sym(SymMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(e.lambda[0] == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(e.lambda[1] == doctest::Approx(1.0).epsilon(1e-15));
    const double s = 1.0 / std::sqrt(2.0);
    // Largest component positive, first one on ties.
    CHECK(e.q(0, 0) == doctest::Approx(s));
    CHECK(e.q(1, 0) == doctest::Approx(-s));
    CHECK(e.q(0, 1) == doctest::Approx(s));
    CHECK(e.q(1, 1) == doctest::Approx(s));
  }
  SUBCASE("2 1 / 1 2") {
    const EigenDecomposition e = eig_sym(SymMatrix::from_rows({{2, 1}, {1, 2}}));
    CHECK(e.lambda[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.lambda[1] == doctest::Approx(3.0).epsilon(1e-15));
  }
}

TEST_CASE("eig_sym residual, orthogonality and ordering") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1, 2, 3, 7, 30, 64, 100}) {
    const SymMatrix x = random_symmetric(n, rng);
    const EigenDecomposition e = eig_sym(x);
    CHECK(std::is_sorted(e.lambda.begin(), e.lambda.end()));
    const Matrix qtq = multiply(e.q.transposed(), e.q);
    CHECK(frobenius_norm(qtq - Matrix::identity(n)) <= 50.0 * n * kU);
    const SymMatrix back = scaled_gram(e.q, e.lambda);
    CHECK(frobenius_norm(back.dense() - x.dense()) <= 50.0 * n * kU * frobenius_norm(x));
    // Sign convention.
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (std::abs(e.q(i, j)) > std::abs(e.q(k, j))) k = i;
      CHECK(e.q(k, j) > 0.0);
    }
  }
}

TEST_CASE("eig_sym is deterministic and resolves graded spectra") {
  const SymMatrix x = spd(20, 1e12, 5);
  const EigenDecomposition e1 = eig_sym(x);
  const EigenDecomposition e2 = eig_sym(x);
  CHECK(e1.lambda == e2.lambda);
  CHECK(max_abs_diff(e1.q, e2.q) == 0.0);

  // Graded diagonal with tiny couplings: eigenvalues keep relative accuracy.
  const std::size_t n = 8;
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) g(i, i) = std::pow(10.0, -2.0 * static_cast<double>(i));
  const EigenDecomposition e = eig_sym(SymMatrix::from_exact(g));
  for (std::size_t i = 0; i < n; ++i) CHECK(e.lambda[i] == std::pow(10.0, -2.0 * static_cast<double>(n - 1 - i)));
}

TEST_CASE("tri_solve examples") {
  std::mt19937_64 rng(2);
  const Matrix b = random_matrix(4, rng);
  CHECK(max_abs_diff(tri_solve(TriangularFactor(Matrix::identity(4)), b), b) == 0.0);

  const Matrix x = tri_solve(TriangularFactor(Matrix::from_rows({{2, 0}, {0, 4}})), Matrix::from_rows({{2}, {4}}));
  CHECK(x(0, 0) == 1.0);
  CHECK(x(1, 0) == 1.0);

  const Matrix inv = tri_solve(TriangularFactor(Matrix::from_rows({{1, 1}, {0, 1}})), Matrix::identity(2));
  CHECK(max_abs_diff(inv, Matrix::from_rows({{1, -1}, {0, 1}})) == 0.0);

  CHECK_THROWS_AS(tri_solve(TriangularFactor(Matrix::from_rows({{1, 1}, {0, 0}})), Matrix::identity(2)), Error);
}

TEST_CASE("tri_solve sides and transposes agree with products") {
  std::mt19937_64 rng(4);
  const std::size_t n = 9;
  const TriangularFactor r = cholesky(spd(n, 100.0, 9));
  const Matrix b = random_matrix(n, rng);
  const Matrix rd = r.dense();
  CHECK(relative_difference(multiply(rd, tri_solve(r, b, Side::Left, false)), b) < 1e-13);
  CHECK(relative_difference(multiply(rd.transposed(), tri_solve(r, b, Side::Left, true)), b) < 1e-13);
  CHECK(relative_difference(multiply(tri_solve(r, b, Side::Right, false), rd), b) < 1e-13);
  CHECK(relative_difference(multiply(tri_solve(r, b, Side::Right, true), rd.transposed()), b) < 1e-13);
}

TEST_CASE("congruence_sandwich examples") {
  const SymMatrix x = spd(4, 10.0, 8);
  CHECK(relative_difference(congruence_sandwich(TriangularFactor(Matrix::identity(4)), x, CongruenceMode::Forward), x) == 0.0);

  const SymMatrix d = congruence_sandwich(TriangularFactor(Matrix::from_rows({{2, 0}, {0, 3}})),
                                          SymMatrix::from_rows({{8, 0}, {0, 18}}), CongruenceMode::Inverse);
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 1) == 2.0);
  CHECK(d(0, 1) == 0.0);

  const SymMatrix t = congruence_sandwich(TriangularFactor(Matrix::from_rows({{1, 1}, {0, 1}})),
                                          SymMatrix::identity(2), CongruenceMode::Forward);
  CHECK(relative_difference(t, SymMatrix::from_rows({{2, 1}, {1, 1}})) == 0.0);

  // Symmetric T, both modes.
  const SymMatrix s = spd(5, 50.0, 1);
  const SymMatrix y = spd(5, 5.0, 2);
  const SymMatrix fwd = congruence_sandwich(s, y, CongruenceMode::Forward);
  CHECK(relative_difference(congruence_sandwich(s, fwd, CongruenceMode::Inverse), y) < 1e-12);
}

TEST_CASE("sym_sqrt examples and square residual") {
  const SymMatrix s = sym_sqrt(SymMatrix::from_rows({{4, 0}, {0, 9}}));
  CHECK(s(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(s(1, 1) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(relative_difference(sym_sqrt(SymMatrix::identity(3)), SymMatrix::identity(3)) < 1e-15);
  CHECK(relative_difference(sym_sqrt(SymMatrix::from_rows({{5, 4}, {4, 5}})), SymMatrix::from_rows({{2, 1}, {1, 2}})) <
        4 * kU);

  for (std::size_t n : {3, 10, 40}) {
    const SymMatrix a = spd(n, 1e6, 40 + n);
    const SymMatrix r = sym_sqrt(a);
    const Matrix sq = multiply(r.dense(), r.dense());
    CHECK(frobenius_norm(sq - a.dense()) <= 1000.0 * n * kU * frobenius_norm(a));
  }
  CHECK_THROWS_AS(sym_sqrt(SymMatrix::from_rows({{1, 2}, {2, 1}})), Error);
}

TEST_CASE("comparison_matrix examples") {
  CHECK(max_abs_diff(comparison_matrix(TriangularFactor(Matrix::identity(3))).dense(), Matrix::identity(3)) == 0.0);
  CHECK(max_abs_diff(comparison_matrix(TriangularFactor(Matrix::from_rows({{1, -2}, {0, 3}}))).dense(),
                     Matrix::from_rows({{1, -2}, {0, 3}})) == 0.0);
  CHECK(max_abs_diff(comparison_matrix(TriangularFactor(Matrix::from_rows({{2, 5}, {0, 1}}))).dense(),
                     Matrix::from_rows({{2, -5}, {0, 1}})) == 0.0);
}

TEST_CASE("norms examples and relations") {
  const Norms i3 = norms(SymMatrix::identity(3));
  CHECK(i3.frobenius == doctest::Approx(std::sqrt(3.0)));
  CHECK(i3.two == doctest::Approx(1.0));
  const Norms d = norms(SymMatrix::from_rows({{3, 0}, {0, -4}}));
  CHECK(d.frobenius == doctest::Approx(5.0));
  CHECK(d.two == doctest::Approx(4.0));
  const Norms r1 = norms(Matrix::from_rows({{0, 1}, {0, 0}}));
  CHECK(r1.frobenius == doctest::Approx(1.0));
  CHECK(r1.two == doctest::Approx(1.0).epsilon(1e-10));

  std::mt19937_64 rng(5);
  for (std::size_t n : {2, 6, 15}) {
    const Matrix a = random_matrix(n, rng);
    const Matrix b = random_matrix(n, rng);
    const Norms na = norms(a);
    // 2-norm of a general matrix against the symmetric route on A^T A.
    const double via_gram = std::sqrt(norms(SymMatrix::symmetrize(multiply(a.transposed(), a))).two);
    CHECK(na.two == doctest::Approx(via_gram).epsilon(1e-10));
    CHECK(na.frobenius <= std::sqrt(static_cast<double>(n)) * na.two * (1 + 1e-14));
    CHECK(frobenius_norm(multiply(a, b)) <= na.two * norms(b).frobenius * (1 + 1e-12));
  }
}

TEST_CASE("spd_condition matches the generator target") {
  CHECK(spd_condition(spd(10, 1e7, 1)) == doctest::Approx(1e7).epsilon(1e-6));
  CHECK(spd_condition(SymMatrix::from_rows({{4, 0}, {0, 1}})) == doctest::Approx(4.0));
}

TEST_CASE("triangular helpers") {
  const TriangularFactor r = cholesky(spd(6, 30.0, 12));
  const TriangularFactor ri = tri_inverse(r);
  CHECK(relative_difference(multiply(r.dense(), ri.dense()), Matrix::identity(6)) < 1e-13);
  CHECK(relative_difference(tri_gram(r).dense(), multiply(r.dense(), r.dense().transposed())) < 1e-14);
  const TriangularFactor r2 = cholesky(spd(6, 5.0, 13));
  CHECK(relative_difference(tri_tri_multiply(r, r2).dense(), multiply(r.dense(), r2.dense())) < 1e-14);
  CHECK(relative_difference(multiply(r.dense(), tri_tri_solve(r, r2).dense()), r2.dense()) < 1e-13);
  CHECK(relative_difference(spd_inverse(spd(6, 30.0, 12)).dense(),
                            multiply(ri.dense(), ri.dense().transposed())) < 1e-13);
}
