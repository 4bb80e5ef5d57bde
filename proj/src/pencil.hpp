#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flops.hpp"
#include "functions.hpp"
#include "matrix.hpp"

namespace pencilfun {

enum class Algorithm {
  Naive,        // A * f(A \ B) through a nonsymmetric eigendecomposition
  SqrtSchur,    // square root of A, then a symmetric eigenproblem
  CholSchur,    // Cholesky of A, then a symmetric eigenproblem
  CholSchurPd,  // Cholesky of A and of B (B positive definite)
};

enum class Variant {
  Default,      // fastest path of the algorithm
  Standard,
  Fast,         // sqrt_schur: Cholesky of the square root; chol_schur_pd: S2 = R_A^{-T} R_B^T and S_t = R_A^T Q
  FastSolve,    // chol_schur: S3 = S1^{-1} B S1^{-T}
  FastProduct,  // chol_schur: FastSolve plus S_t = S1 Q, S5 = S_t f(Lambda) S_t^T
};

const char* algorithm_name(Algorithm a) noexcept;
const char* variant_name(Variant v) noexcept;
// Accepts naive, sqrt_schur, chol_schur, chol_schur_pd (and alg1, alg2, alg3).
Algorithm parse_algorithm(std::string_view name);
Variant parse_variant(std::string_view name);
// Maps Default to the fastest variant and rejects variants the algorithm
// does not have (BadParameter).
Variant resolve_variant(Algorithm a, Variant v);

// Intermediate quantities of one run. Entries are present only when the run
// formed them.
struct AlgorithmTrace {
  std::optional<Matrix> s1;
  std::optional<Matrix> s2;
  std::optional<SymMatrix> s3;
  std::optional<SymMatrix> s4;
  std::optional<Matrix> q;
};

struct PencilResult {
  SymMatrix s5;
  std::vector<double> eigenvalues;  // of S3 (ascending), or of A^{-1}B for naive
  FlopLedger flops;
  double wall_time = 0.0;
  Algorithm algorithm = Algorithm::CholSchur;
  Variant variant = Variant::Standard;
  // Non-fatal diagnostics, e.g. "IllConditionedEigenvectors".
  std::vector<std::string> warnings;
  std::optional<AlgorithmTrace> trace;
};

struct PencilOptions {
  Variant variant = Variant::Default;
  bool trace = false;
};

PencilResult naive(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                   const PencilOptions& opt = {});
PencilResult alg1_sqrt_schur(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                             const PencilOptions& opt = {});
PencilResult alg2_cholesky_schur(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                 const PencilOptions& opt = {});
PencilResult alg3_cholesky_schur_pd(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                    const PencilOptions& opt = {});

PencilResult phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f, Algorithm algorithm,
                 const PencilOptions& opt = {});

}  // namespace pencilfun
