#pragma once

#include <vector>

#include "functions.hpp"
#include "matrix.hpp"

namespace pencilfun {

struct FrechetRequest {
  SymMatrix a;
  SymMatrix b;
  SymMatrix h;  // direction in A
  SymMatrix l;  // direction in B
  FunctionSpec f;
};

// D phi(A, B)[H, L] = H f(A^{-1}B) + A Df(A^{-1}B)[A^{-1}(L - H A^{-1}B)],
// with Df taken in an eigenbasis of A^{-1}B (Daleckii-Krein form).
Matrix frechet_apply(const FrechetRequest& req);

// The same derivative written as B Df^(B^{-1}A)[B^{-1}H] + A Df(A^{-1}B)[A^{-1}L]
// with f^ the dual function. Needs B positive definite.
Matrix frechet_apply_dual(const FrechetRequest& req);

// vec(D phi[H, L]) = M2 vec(H) + M1 vec(L) in column-stacking order.
struct KroneckerDerivative {
  Matrix m1;  // n^2 x n^2
  Matrix m2;
  Matrix z1hat;  // A^{-1/2} Q1
  Matrix z2hat;  // B^{-1/2} Q2
  std::vector<double> delta1;  // vec of f[lambda_i, lambda_j]
  std::vector<double> delta2;  // vec of f^[1/lambda_i, 1/lambda_j]
};

constexpr std::size_t kDefaultSizeCap = 32;

// Throws SizeCapExceeded when n > size_cap, NotPositiveDefinite unless both
// A and B are positive definite.
KroneckerDerivative kronecker_forms(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                    std::size_t size_cap = kDefaultSizeCap);

// ||[M2 M1]||_2: Gram-matrix eigenvalue for n <= 12, power iteration above
// (relative tolerance 1e-10, NoConvergence after 10000 iterations).
double kronecker_norm(const KroneckerDerivative& k);

struct DerivativeBounds {
  double mixed = 0.0;   // sqrt(mu(A)^2 max|F|^2 + mu(B)^2 max|F^|^2)
  double a_only = 0.0;  // mu(A) sqrt(max|F|^2 + max|f(l_j) - F_ij l_j|^2)
  double mu_a = 0.0;
  double mu_b = 0.0;
};

DerivativeBounds derivative_norm_bounds(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f);

// ||M(R)^{-1}||_F / ||R^{-1}||_2. Throws SingularFactor.
double psi(const TriangularFactor& r);

struct ConditionReport {
  double cond_phi = 0.0;  // +inf when phi(A, B) = 0
  double dphi_norm = 0.0;
  double phi_norm = 0.0;
  double bound_lemma3 = 0.0;
  double bound_eq14 = 0.0;
  double mu_a = 0.0;
  double mu_b = 0.0;
  double psi_ra = 0.0;
  KroneckerDerivative kron;
};

ConditionReport cond_phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                         std::size_t size_cap = kDefaultSizeCap);

}  // namespace pencilfun
