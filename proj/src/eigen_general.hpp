#pragma once

#include "flops.hpp"
#include "matrix.hpp"

namespace pencilfun {

// Eigendecomposition X = V diag(lambda) V^{-1} of a real nonsymmetric matrix
// whose spectrum is known to be real. Hessenberg reduction, Francis double
// shift QR with accumulated transformations, eigenvectors of the triangular
// Schur factor by back substitution. Columns of V have unit 2-norm.
struct RealEigenDecomposition {
  Matrix v;
  std::vector<double> lambda;  // in Schur order
  double cond1_estimate = 0.0;  // ||V||_1 times an estimate of ||V^{-1}||_1
};

// Complex pairs with |imag| <= sqrt(u) ||X||_F are treated as a double real
// eigenvalue; larger imaginary parts throw DomainError. NoConvergence after
// 100 iterations on one eigenvalue.
RealEigenDecomposition eig_real_spectrum(const Matrix& x, FlopLedger* ledger = nullptr);

}  // namespace pencilfun
