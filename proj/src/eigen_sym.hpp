#pragma once

#include "flops.hpp"
#include "matrix.hpp"

namespace pencilfun {

// Householder tridiagonalization followed by implicit-shift QL. Eigenvalues
// come back ascending; each eigenvector is signed so that its largest
// component (first one on ties) is positive. ~9n^3.
// Throws NoConvergence after 64 iterations on one eigenvalue.
EigenDecomposition eig_sym(const SymMatrix& x, FlopLedger* ledger = nullptr);

// Principal square root Q D^{1/2} Q^T. ~10n^3.
// Throws NotPositiveDefinite when an eigenvalue is <= n u lambda_max.
SymMatrix sym_sqrt(const SymMatrix& a, FlopLedger* ledger = nullptr);

// Smallest eigenvalue threshold used by the positive definiteness checks.
double pd_threshold(std::size_t n, double lambda_max);

}  // namespace pencilfun
