#pragma once

// Dense kernels for symmetric and triangular matrices. Every kernel takes an
// optional FlopLedger; it adds the exact operation count of its loops and the
// leading-order cost-table figure for the operation.

#include <span>

#include "flops.hpp"
#include "matrix.hpp"

namespace pencilfun {

// C = A B, general. 2n^3.
Matrix multiply(const Matrix& a, const Matrix& b, FlopLedger* ledger = nullptr);

// C = A B when C is known to be symmetric; only one triangle is formed. n^3.
SymMatrix multiply_to_symmetric(const Matrix& a, const Matrix& b, FlopLedger* ledger = nullptr);

// W diag(d) W^T. n^3.
SymMatrix scaled_gram(const Matrix& w, std::span<const double> d, FlopLedger* ledger = nullptr);

// T M for triangular T and general M. n^3.
Matrix tri_multiply(const TriangularFactor& t, const Matrix& m, FlopLedger* ledger = nullptr);

// T T^T. n^3/3.
SymMatrix tri_gram(const TriangularFactor& t, FlopLedger* ledger = nullptr);

// Product and quotient of two triangular matrices of the same orientation;
// the result keeps that orientation. n^3/3 each.
TriangularFactor tri_tri_multiply(const TriangularFactor& t1, const TriangularFactor& t2,
                                  FlopLedger* ledger = nullptr);
TriangularFactor tri_tri_solve(const TriangularFactor& t1, const TriangularFactor& t2,
                               FlopLedger* ledger = nullptr);

// T^{-1}. n^3/3.
TriangularFactor tri_inverse(const TriangularFactor& t, FlopLedger* ledger = nullptr);

// A = R^T R with R upper triangular and positive diagonal. n^3/3.
// Throws NotPositiveDefinite with the 1-based pivot index.
TriangularFactor cholesky(const SymMatrix& a, FlopLedger* ledger = nullptr);

enum class Side { Left, Right };

// Left: op(T) X = B. Right: X op(T) = B. op(T) = T or T^T. n^3 for n right-hand sides.
// Throws SingularFactor on a zero diagonal entry.
Matrix tri_solve(const TriangularFactor& t, const Matrix& b, Side side = Side::Left,
                 bool transpose = false, FlopLedger* ledger = nullptr);

enum class CongruenceMode {
  Forward,  // T X T^T
  Inverse,  // T^{-1} X T^{-T}
};

// (1 + 1/3) n^3 for a triangular T.
SymMatrix congruence_sandwich(const TriangularFactor& t, const SymMatrix& x, CongruenceMode mode,
                              FlopLedger* ledger = nullptr);
// Symmetric T. Forward: T X T (3n^3). Inverse: through the Cholesky factor of
// T, T^{-1} X T^{-1} = R^{-1} (R^{-T} X R^{-1}) R^{-T} ((3 + 1/3) n^3 with
// the factorization). T must be positive definite for the inverse mode.
SymMatrix congruence_sandwich(const SymMatrix& t, const SymMatrix& x, CongruenceMode mode,
                              FlopLedger* ledger = nullptr);

// Inverse of a positive definite matrix via R^{-1} R^{-T}. n^3.
SymMatrix spd_inverse(const SymMatrix& a, FlopLedger* ledger = nullptr);

// M(T): |t_ii| on the diagonal, -|t_ij| off it.
TriangularFactor comparison_matrix(const TriangularFactor& t);

struct Norms {
  double frobenius = 0.0;
  double two = 0.0;
};

// Symmetric: the 2-norm is the largest |eigenvalue|.
Norms norms(const SymMatrix& x);
// General: the 2-norm comes from power iteration on X^T X (NoConvergence
// after 10000 iterations).
Norms norms(const Matrix& x);

// 2-norm condition number of a positive definite matrix.
double spd_condition(const SymMatrix& a);

// Orthogonal factor Q of X = QR, with the signs fixed so diag(R) > 0.
Matrix qr_orthogonal_factor(const Matrix& x);

// LU with partial pivoting, used by the general eigen path.
struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> pivots;
};
LuFactors lu_factor(const Matrix& a, FlopLedger* ledger = nullptr);
// Solves A X = B (transpose=false) or A^T X = B.
Matrix lu_solve(const LuFactors& f, const Matrix& b, bool transpose = false,
                FlopLedger* ledger = nullptr);
// Hager-Higham estimate of ||A^{-1}||_1.
double lu_inverse_norm1_estimate(const LuFactors& f);

}  // namespace pencilfun
