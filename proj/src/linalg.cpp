#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "eigen_sym.hpp"
#include "errors.hpp"

namespace pencilfun {

namespace {

using u64 = std::uint64_t;

enum class Part { Full, Lower, Upper };

inline void axpy(std::size_t n, double a, const double* __restrict x, double* __restrict y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline double dot(std::size_t n, const double* __restrict x, const double* __restrict y) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

// C += A B restricted to `part` of C; returns the number of multiply-adds.
u64 gemm_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, std::size_t lda,
             const double* b, std::size_t ldb, double* c, std::size_t ldc, Part part) {
  constexpr std::size_t kRowBlock = 256;
  constexpr std::size_t kDepthBlock = 128;
  u64 madds = 0;
  for (std::size_t k0 = 0; k0 < k; k0 += kDepthBlock) {
    const std::size_t k1 = std::min(k, k0 + kDepthBlock);
    for (std::size_t i0 = 0; i0 < m; i0 += kRowBlock) {
      const std::size_t i1 = std::min(m, i0 + kRowBlock);
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t lo = i0, hi = i1;
        if (part == Part::Lower) lo = std::max(lo, j);
        if (part == Part::Upper) hi = std::min(hi, j + 1);
        if (lo >= hi) continue;
        const std::size_t len = hi - lo;
        double* __restrict cj = c + j * ldc + lo;
        const double* bj = b + j * ldb;
        std::size_t kk = k0;
        for (; kk + 4 <= k1; kk += 4) {
          const double b0 = bj[kk], b1 = bj[kk + 1], b2 = bj[kk + 2], b3 = bj[kk + 3];
          const double* __restrict a0 = a + kk * lda + lo;
          const double* __restrict a1 = a0 + lda;
          const double* __restrict a2 = a1 + lda;
          const double* __restrict a3 = a2 + lda;
          for (std::size_t i = 0; i < len; ++i) cj[i] += a0[i] * b0 + a1[i] * b1 + a2[i] * b2 + a3[i] * b3;
        }
        for (; kk < k1; ++kk) axpy(len, bj[kk], a + kk * lda + lo, cj);
        madds += static_cast<u64>(len) * (k1 - k0);
      }
    }
  }
  return madds;
}

double cube(std::size_t n) { return static_cast<double>(n) * n * n; }

void require_square(const Matrix& m, const char* what) {
  if (!m.square()) throw Error(ErrorCode::ShapeError, std::string(what) + " must be square");
}

void check_diagonal(const Matrix& r) {
  for (std::size_t k = 0; k < r.rows(); ++k)
    if (r(k, k) == 0.0) {
      throw Error(ErrorCode::SingularFactor,
                  "zero diagonal entry " + std::to_string(k + 1) + " in triangular factor",
                  static_cast<long>(k + 1));
    }
}

// True when the effective operator is R^T (lower triangular).
bool effective_lower(const TriangularFactor& t, bool transpose) {
  return (t.view() == Triangle::Lower) != transpose;
}

// In-place solve of R x = b (upper) or R^T x = b (lower) for columns of `x`.
// With `sym_part`, column j only needs rows >= j (upper) or rows <= j (lower)
// because the caller mirrors the result.
u64 solve_columns(const Matrix& r, bool lower, Matrix& x, bool sym_part, u64& divs) {
  const std::size_t n = r.rows();
  const std::size_t p = x.cols();
  u64 madds = 0;
  for (std::size_t j0 = 0; j0 < p; j0 += 4) {
    const std::size_t nc = std::min<std::size_t>(4, p - j0);
    if (!lower) {
      const std::size_t stop = sym_part ? j0 : 0;
      for (std::size_t k = n; k-- > stop;) {
        const double* rk = r.data() + k * n;
        const double inv = rk[k];
        for (std::size_t c = 0; c < nc; ++c) {
          double* xc = x.data() + (j0 + c) * n;
          xc[k] /= inv;
          axpy(k - stop, -xc[k], rk + stop, xc + stop);
        }
        divs += nc;
        madds += static_cast<u64>(nc) * (k - stop);
      }
    } else {
      const std::size_t end = sym_part ? std::min(n, j0 + nc) : n;
      for (std::size_t k = 0; k < end; ++k) {
        const double* rk = r.data() + k * n;
        for (std::size_t c = 0; c < nc; ++c) {
          double* xc = x.data() + (j0 + c) * n;
          xc[k] = (xc[k] - dot(k, rk, xc)) / rk[k];
        }
        divs += nc;
        madds += static_cast<u64>(nc) * k;
      }
    }
  }
  return madds;
}

// C = R M (upper) or R^T M (lower). With `sym_part` only the triangle of C
// that a symmetric result needs is formed: lower for R, upper for R^T.
u64 tri_times(const Matrix& r, bool lower, const Matrix& m, Matrix& c, bool sym_part) {
  const std::size_t n = r.rows();
  const std::size_t p = m.cols();
  u64 madds = 0;
  for (std::size_t j0 = 0; j0 < p; j0 += 4) {
    const std::size_t nc = std::min<std::size_t>(4, p - j0);
    if (!lower) {
      const std::size_t start = sym_part ? j0 : 0;
      for (std::size_t k = start; k < n; ++k) {
        const double* rk = r.data() + k * n;
        for (std::size_t cc = 0; cc < nc; ++cc) {
          const double mk = m(k, j0 + cc);
          axpy(k + 1 - start, mk, rk + start, c.data() + (j0 + cc) * n + start);
        }
        madds += static_cast<u64>(nc) * (k + 1 - start);
      }
    } else {
      const std::size_t end = sym_part ? std::min(n, j0 + nc) : n;
      for (std::size_t i = 0; i < end; ++i) {
        const double* ri = r.data() + i * n;
        for (std::size_t cc = 0; cc < nc; ++cc) {
          c(i, j0 + cc) = dot(i + 1, ri, m.data() + (j0 + cc) * n);
        }
        madds += static_cast<u64>(nc) * (i + 1);
      }
    }
  }
  return madds;
}

// Copies the triangle produced by tri_times / solve_columns into a SymMatrix.
SymMatrix mirror(Matrix m, bool lower_was_formed) {
  return lower_was_formed ? SymMatrix::from_lower(std::move(m)) : SymMatrix::from_upper(std::move(m));
}

}  // namespace

Matrix multiply(const Matrix& a, const Matrix& b, FlopLedger* ledger) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::ShapeError, "inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  const u64 madds = gemm_acc(a.rows(), b.cols(), a.cols(), a.data(), a.rows(), b.data(), b.rows(),
                             c.data(), c.rows(), Part::Full);
  count_fma(ledger, madds);
  count_formula(ledger, 2.0 * static_cast<double>(a.rows()) * b.cols() * a.cols());
  return c;
}

SymMatrix multiply_to_symmetric(const Matrix& a, const Matrix& b, FlopLedger* ledger) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw Error(ErrorCode::ShapeError, "product cannot be symmetric for these shapes");
  Matrix c(a.rows(), b.cols());
  const u64 madds = gemm_acc(a.rows(), b.cols(), a.cols(), a.data(), a.rows(), b.data(), b.rows(),
                             c.data(), c.rows(), Part::Lower);
  count_fma(ledger, madds);
  count_formula(ledger, static_cast<double>(a.rows()) * a.rows() * a.cols());
  return SymMatrix::from_lower(std::move(c));
}

SymMatrix scaled_gram(const Matrix& w, std::span<const double> d, FlopLedger* ledger) {
  if (d.size() != w.cols()) throw Error(ErrorCode::ShapeError, "scaling vector length mismatch");
  const std::size_t n = w.rows(), k = w.cols();
  Matrix wd(n, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) wd(i, j) = w(i, j) * d[j];
  count_mul(ledger, static_cast<u64>(n) * k);
  const Matrix wt = w.transposed();
  Matrix c(n, n);
  const u64 madds = gemm_acc(n, n, k, wd.data(), n, wt.data(), k, c.data(), n, Part::Lower);
  count_fma(ledger, madds);
  count_formula(ledger, static_cast<double>(n) * n * k);
  return SymMatrix::from_lower(std::move(c));
}

Matrix tri_multiply(const TriangularFactor& t, const Matrix& m, FlopLedger* ledger) {
  if (m.rows() != t.n()) throw Error(ErrorCode::ShapeError, "triangular product shape mismatch");
  Matrix c(m.rows(), m.cols());
  const u64 madds = tri_times(t.upper_storage(), t.view() == Triangle::Lower, m, c, false);
  count_fma(ledger, madds);
  count_formula(ledger, static_cast<double>(t.n()) * t.n() * m.cols());
  return c;
}

SymMatrix tri_gram(const TriangularFactor& t, FlopLedger* ledger) {
  const Matrix& u = t.upper_storage();
  const std::size_t n = t.n();
  Matrix s(n, n);
  u64 madds = 0;
  if (t.view() == Triangle::Lower) {
    // L L^T with L = U^T: s_ij = <u_i, u_j> over rows 0..min(i, j).
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j; i < n; ++i) {
        s(i, j) = dot(j + 1, u.data() + i * n, u.data() + j * n);
        madds += j + 1;
      }
  } else {
    // R R^T: s_ij = sum_{k >= max(i,j)} r_ik r_jk, accumulated column-wise.
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) {
        axpy(k - j + 1, u(j, k), u.data() + k * n + j, s.data() + j * n + j);
        madds += k - j + 1;
      }
  }
  count_fma(ledger, madds);
  count_formula(ledger, cube(n) / 3.0);
  return SymMatrix::from_lower(std::move(s));
}

TriangularFactor tri_tri_multiply(const TriangularFactor& t1, const TriangularFactor& t2,
                                  FlopLedger* ledger) {
  if (t1.n() != t2.n()) throw Error(ErrorCode::ShapeError, "triangular factors differ in size");
  if (t1.view() != t2.view())
    throw Error(ErrorCode::ShapeError, "triangular product needs matching orientations");
  const std::size_t n = t1.n();
  // Lower case: L1 L2 = (R2 R1)^T, so both reduce to an upper-upper product.
  const Matrix& a = t1.view() == Triangle::Upper ? t1.upper_storage() : t2.upper_storage();
  const Matrix& b = t1.view() == Triangle::Upper ? t2.upper_storage() : t1.upper_storage();
  Matrix c(n, n);
  u64 madds = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k <= j; ++k) {
      axpy(k + 1, b(k, j), a.data() + k * n, c.data() + j * n);
      madds += k + 1;
    }
  count_fma(ledger, madds);
  count_formula(ledger, cube(n) / 3.0);
  return TriangularFactor::adopt(std::move(c), t1.view());
}

TriangularFactor tri_tri_solve(const TriangularFactor& t1, const TriangularFactor& t2,
                               FlopLedger* ledger) {
  if (t1.n() != t2.n()) throw Error(ErrorCode::ShapeError, "triangular factors differ in size");
  if (t1.view() != t2.view())
    throw Error(ErrorCode::ShapeError, "triangular solve needs matching orientations");
  const std::size_t n = t1.n();
  const Matrix& r1 = t1.upper_storage();
  const Matrix& r2 = t2.upper_storage();
  check_diagonal(r1);
  Matrix x(n, n);
  u64 madds = 0, divs = 0;
  if (t1.view() == Triangle::Upper) {
    for (std::size_t j = 0; j < n; ++j) {
      double* xj = x.data() + j * n;
      for (std::size_t i = 0; i <= j; ++i) xj[i] = r2(i, j);
      for (std::size_t k = j + 1; k-- > 0;) {
        xj[k] /= r1(k, k);
        axpy(k, -xj[k], r1.data() + k * n, xj);
        madds += k;
      }
      divs += j + 1;
    }
  } else {
    // L1 X = L2 with L = R^T; column j of X lives in rows j..n-1 and is
    // stored as row j of the upper storage.
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = j; i < n; ++i) {
        const double s = dot(i - j, r1.data() + i * n + j, col.data() + j);
        col[i] = (r2(j, i) - s) / r1(i, i);
        madds += i - j;
      }
      divs += n - j;
      for (std::size_t i = j; i < n; ++i) x(j, i) = col[i];
    }
  }
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_formula(ledger, cube(n) / 3.0);
  return TriangularFactor::adopt(std::move(x), t1.view());
}

TriangularFactor tri_inverse(const TriangularFactor& t, FlopLedger* ledger) {
  const TriangularFactor id = TriangularFactor::adopt(Matrix::identity(t.n()), t.view());
  return tri_tri_solve(t, id, ledger);
}

TriangularFactor cholesky(const SymMatrix& a, FlopLedger* ledger) {
  const std::size_t n = a.n();
  if (n == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
  constexpr std::size_t kPanel = 64;
  // Work on the upper triangle in place; the strictly lower part is cleared at the end.
  Matrix r = a.dense();
  u64 madds = 0, divs = 0, sqrts = 0;
  for (std::size_t k0 = 0; k0 < n; k0 += kPanel) {
    const std::size_t k1 = std::min(n, k0 + kPanel);
    // Diagonal block, dot-product form.
    for (std::size_t j = k0; j < k1; ++j) {
      double* rj = r.data() + j * n;
      for (std::size_t i = k0; i < j; ++i) {
        const double* ri = r.data() + i * n;
        rj[i] = (rj[i] - dot(i - k0, ri + k0, rj + k0)) / ri[i];
        madds += i - k0;
        ++divs;
      }
      const double pivot = rj[j] - dot(j - k0, rj + k0, rj + k0);
      madds += j - k0;
      if (!(pivot > 0.0)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "matrix is not positive definite (pivot " + std::to_string(j + 1) + ")",
                    static_cast<long>(j + 1), {pivot});
      }
      rj[j] = std::sqrt(pivot);
      ++sqrts;
    }
    // Block row: R11^T R12 = A12.
    for (std::size_t j = k1; j < n; ++j) {
      double* rj = r.data() + j * n;
      for (std::size_t i = k0; i < k1; ++i) {
        const double* ri = r.data() + i * n;
        rj[i] = (rj[i] - dot(i - k0, ri + k0, rj + k0)) / ri[i];
        madds += i - k0;
        ++divs;
      }
    }
    // Trailing update of the upper triangle: A22 -= R12^T R12.
    const std::size_t w = k1 - k0;
    for (std::size_t j = k1; j < n; ++j) {
      const double* rj = r.data() + j * n + k0;
      double* aj = r.data() + j * n;
      for (std::size_t i = k1; i <= j; ++i) aj[i] -= dot(w, r.data() + i * n + k0, rj);
      madds += static_cast<u64>(w) * (j + 1 - k1);
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) r(i, j) = 0.0;
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_sqrt(ledger, sqrts);
  count_formula(ledger, cube(n) / 3.0);
  return TriangularFactor::adopt(std::move(r), Triangle::Upper);
}

Matrix tri_solve(const TriangularFactor& t, const Matrix& b, Side side, bool transpose,
                 FlopLedger* ledger) {
  const std::size_t n = t.n();
  check_diagonal(t.upper_storage());
  if (side == Side::Right) {
    if (b.cols() != n) throw Error(ErrorCode::ShapeError, "right-hand side shape mismatch");
    // X op(T) = B  <=>  op(T)^T X^T = B^T.
    return tri_solve(t, b.transposed(), Side::Left, !transpose, ledger).transposed();
  }
  if (b.rows() != n) throw Error(ErrorCode::ShapeError, "right-hand side shape mismatch");
  Matrix x = b;
  u64 divs = 0;
  const u64 madds = solve_columns(t.upper_storage(), effective_lower(t, transpose), x, false, divs);
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_formula(ledger, static_cast<double>(n) * n * b.cols());
  return x;
}

SymMatrix congruence_sandwich(const TriangularFactor& t, const SymMatrix& x, CongruenceMode mode,
                              FlopLedger* ledger) {
  const std::size_t n = t.n();
  if (x.n() != n) throw Error(ErrorCode::ShapeError, "congruence shape mismatch");
  const Matrix& r = t.upper_storage();
  const bool lower = t.view() == Triangle::Lower;
  u64 madds = 0, divs = 0;
  Matrix out(n, n);
  bool lower_formed = false;
  if (mode == CongruenceMode::Forward) {
    Matrix y(n, n);
    madds += tri_times(r, lower, x.dense(), y, false);  // T X
    const Matrix yt = y.transposed();                   // X T^T
    madds += tri_times(r, lower, yt, out, true);        // T X T^T
    lower_formed = !lower;
  } else {
    check_diagonal(r);
    Matrix y = x.dense();
    madds += solve_columns(r, lower, y, false, divs);  // T^{-1} X
    out = y.transposed();                              // X T^{-T}
    madds += solve_columns(r, lower, out, true, divs);  // T^{-1} X T^{-T}
    lower_formed = !lower;
  }
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_formula(ledger, (1.0 + 1.0 / 3.0) * cube(n));
  return mirror(std::move(out), lower_formed);
}

SymMatrix congruence_sandwich(const SymMatrix& t, const SymMatrix& x, CongruenceMode mode,
                              FlopLedger* ledger) {
  if (t.n() != x.n()) throw Error(ErrorCode::ShapeError, "congruence shape mismatch");
  if (mode == CongruenceMode::Forward) {
    const Matrix y = multiply(t.dense(), x.dense(), ledger);
    return multiply_to_symmetric(y, t.dense(), ledger);
  }
  const TriangularFactor r = cholesky(t, ledger);
  const SymMatrix k = congruence_sandwich(r.transposed(), x, CongruenceMode::Inverse, ledger);
  return congruence_sandwich(r, k, CongruenceMode::Inverse, ledger);
}

SymMatrix spd_inverse(const SymMatrix& a, FlopLedger* ledger) {
  const TriangularFactor r = cholesky(a, ledger);
  const TriangularFactor rinv = tri_inverse(r, ledger);
  return tri_gram(rinv, ledger);  // R^{-1} R^{-T}
}

TriangularFactor comparison_matrix(const TriangularFactor& t) {
  Matrix m = t.upper_storage();
  const std::size_t n = t.n();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) m(i, j) = i == j ? std::abs(m(i, j)) : -std::abs(m(i, j));
  return TriangularFactor::adopt(std::move(m), t.view());
}

Norms norms(const SymMatrix& x) {
  Norms out;
  out.frobenius = frobenius_norm(x);
  const EigenDecomposition e = eig_sym(x);
  out.two = std::max(std::abs(e.lambda.front()), std::abs(e.lambda.back()));
  return out;
}

Norms norms(const Matrix& x) {
  Norms out;
  out.frobenius = frobenius_norm(x);
  if (out.frobenius == 0.0) return out;
  const std::size_t n = x.cols();
  std::vector<double> v(n), xv(x.rows()), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / (2.0 * n);
  auto normalize = [](std::vector<double>& u) {
    double s = 0.0;
    for (double e : u) s += e * e;
    s = std::sqrt(s);
    for (double& e : u) e /= s;
    return s;
  };
  normalize(v);
  double rq = 0.0, prev_delta = 0.0;
  constexpr int kMaxIterations = 10000;
  for (int it = 0; it < kMaxIterations; ++it) {
    std::fill(xv.begin(), xv.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) axpy(x.rows(), v[j], x.data() + j * x.rows(), xv.data());
    double next = 0.0;
    for (double e : xv) next += e * e;
    for (std::size_t j = 0; j < n; ++j) w[j] = dot(x.rows(), x.data() + j * x.rows(), xv.data());
    const double delta = next - rq;
    rq = next;
    if (normalize(w) == 0.0) break;
    v = w;
    // Rayleigh quotients increase geometrically towards sigma_max^2; stop once
    // the extrapolated remaining increase is negligible.
    if (it > 1 && delta >= 0.0) {
      const double ratio = prev_delta > 0.0 ? delta / prev_delta : 0.0;
      const double remaining = ratio < 1.0 ? delta * ratio / (1.0 - ratio) : delta;
      if (remaining <= 1e-13 * rq) {
        out.two = std::sqrt(rq);
        return out;
      }
    }
    prev_delta = delta;
  }
  throw Error(ErrorCode::NoConvergence, "power iteration for the 2-norm did not converge");
}

double spd_condition(const SymMatrix& a) {
  const EigenDecomposition e = eig_sym(a);
  if (e.lambda.front() <= 0.0) return std::numeric_limits<double>::infinity();
  return e.lambda.back() / e.lambda.front();
}

Matrix qr_orthogonal_factor(const Matrix& x) {
  const std::size_t m = x.rows(), n = x.cols();
  if (m < n) throw Error(ErrorCode::ShapeError, "QR needs at least as many rows as columns");
  Matrix a = x;
  std::vector<double> tau(n, 0.0), beta(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double* ak = a.data() + k * m;
    const double alpha = ak[k];
    const double xnorm = std::sqrt(dot(m - k - 1, ak + k + 1, ak + k + 1));
    if (xnorm == 0.0) {
      beta[k] = alpha;
      continue;
    }
    const double b = -std::copysign(std::hypot(alpha, xnorm), alpha);
    tau[k] = (b - alpha) / b;
    const double scale = 1.0 / (alpha - b);
    for (std::size_t i = k + 1; i < m; ++i) ak[i] *= scale;
    ak[k] = 1.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* aj = a.data() + j * m;
      const double s = tau[k] * dot(m - k, ak + k, aj + k);
      axpy(m - k, -s, ak + k, aj + k);
    }
    beta[k] = b;
  }
  Matrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    if (tau[k] == 0.0) continue;
    const double* v = a.data() + k * m;
    for (std::size_t j = k; j < n; ++j) {
      double* qj = q.data() + j * m;
      const double s = tau[k] * dot(m - k, v + k, qj + k);
      axpy(m - k, -s, v + k, qj + k);
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    if (beta[k] < 0.0)
      for (std::size_t i = 0; i < m; ++i) q(i, k) = -q(i, k);
  return q;
}

LuFactors lu_factor(const Matrix& a, FlopLedger* ledger) {
  require_square(a, "LU input");
  const std::size_t n = a.rows();
  LuFactors f{a, std::vector<std::size_t>(n)};
  Matrix& lu = f.lu;
  u64 madds = 0, divs = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    f.pivots[k] = p;
    if (p != k)
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
    const double piv = lu(k, k);
    if (piv == 0.0) continue;  // singular; solves will produce inf
    double* lk = lu.data() + k * n;
    for (std::size_t i = k + 1; i < n; ++i) lk[i] /= piv;
    divs += n - k - 1;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* aj = lu.data() + j * n;
      axpy(n - k - 1, -aj[k], lk + k + 1, aj + k + 1);
    }
    madds += static_cast<u64>(n - k - 1) * (n - k - 1);
  }
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_formula(ledger, 2.0 * cube(n) / 3.0);
  return f;
}

Matrix lu_solve(const LuFactors& f, const Matrix& b, bool transpose, FlopLedger* ledger) {
  const Matrix& lu = f.lu;
  const std::size_t n = lu.rows();
  if (b.rows() != n) throw Error(ErrorCode::ShapeError, "right-hand side shape mismatch");
  Matrix x = b;
  u64 madds = 0, divs = 0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double* xc = x.data() + c * n;
    if (!transpose) {
      for (std::size_t k = 0; k < n; ++k)
        if (f.pivots[k] != k) std::swap(xc[k], xc[f.pivots[k]]);
      for (std::size_t k = 0; k < n; ++k) axpy(n - k - 1, -xc[k], lu.data() + k * n + k + 1, xc + k + 1);
      for (std::size_t k = n; k-- > 0;) {
        xc[k] /= lu(k, k);
        axpy(k, -xc[k], lu.data() + k * n, xc);
      }
    } else {
      // A^T = U^T L^T P.
      for (std::size_t k = 0; k < n; ++k) xc[k] = (xc[k] - dot(k, lu.data() + k * n, xc)) / lu(k, k);
      for (std::size_t k = n; k-- > 0;) xc[k] -= dot(n - k - 1, lu.data() + k * n + k + 1, xc + k + 1);
      for (std::size_t k = n; k-- > 0;)
        if (f.pivots[k] != k) std::swap(xc[k], xc[f.pivots[k]]);
    }
    madds += static_cast<u64>(n) * (n - 1);
    divs += n;
  }
  count_fma(ledger, madds);
  count_div(ledger, divs);
  count_formula(ledger, 2.0 * static_cast<double>(n) * n * b.cols());
  return x;
}

double lu_inverse_norm1_estimate(const LuFactors& f) {
  const std::size_t n = f.lu.rows();
  Matrix x(n, 1, 1.0 / static_cast<double>(n));
  double estimate = 0.0;
  for (int it = 0; it < 5; ++it) {
    const Matrix y = lu_solve(f, x);
    estimate = 0.0;
    for (std::size_t i = 0; i < n; ++i) estimate += std::abs(y(i, 0));
    Matrix xi(n, 1);
    for (std::size_t i = 0; i < n; ++i) xi(i, 0) = y(i, 0) >= 0.0 ? 1.0 : -1.0;
    const Matrix z = lu_solve(f, xi, true);
    std::size_t jmax = 0;
    double zx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      zx += z(i, 0) * x(i, 0);
      if (std::abs(z(i, 0)) > std::abs(z(jmax, 0))) jmax = i;
    }
    if (std::abs(z(jmax, 0)) <= zx) break;
    x = Matrix(n, 1);
    x(jmax, 0) = 1.0;
  }
  return estimate;
}

}  // namespace pencilfun
