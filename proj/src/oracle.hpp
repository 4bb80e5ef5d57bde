#pragma once

#include <vector>

#include "ddreal.hpp"
#include "functions.hpp"
#include "matrix.hpp"

namespace pencilfun {

// Column-major double-double matrix.
class DDMatrix {
 public:
  DDMatrix() = default;
  explicit DDMatrix(std::size_t n, bool symmetric = false) : n_(n), symmetric_(symmetric), a_(n * n) {}
  static DDMatrix from(const SymMatrix& s);
  static DDMatrix from(const Matrix& m);

  std::size_t n() const noexcept { return n_; }
  bool symmetric() const noexcept { return symmetric_; }
  DDReal& operator()(std::size_t i, std::size_t j) noexcept { return a_[j * n_ + i]; }
  const DDReal& operator()(std::size_t i, std::size_t j) const noexcept { return a_[j * n_ + i]; }
  DDReal* col(std::size_t j) noexcept { return a_.data() + j * n_; }
  const DDReal* col(std::size_t j) const noexcept { return a_.data() + j * n_; }

  // Averages the two triangles and marks the matrix symmetric.
  void symmetrize();
  // Entries rounded to double.
  Matrix rounded() const;
  SymMatrix rounded_sym() const;
  DDReal frobenius() const;

 private:
  std::size_t n_ = 0;
  bool symmetric_ = false;
  std::vector<DDReal> a_;
};

struct DDEigen {
  DDMatrix q;
  std::vector<DDReal> lambda;  // ascending
  int sweeps = 0;
};

// Cyclic Jacobi. Stops once the off-diagonal Frobenius mass is below
// 1e-55 ||X||_F; NoConvergence after 60 sweeps.
DDEigen dd_jacobi_eig(const DDMatrix& x);

// f evaluated in double-double.
DDReal dd_eval(const FunctionSpec& f, const DDReal& x);

// A f(A^{-1} B) through a Cholesky factor of A, a congruence and a Jacobi
// eigendecomposition, all in double-double.
DDMatrix reference_phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f);

// ||computed - ref||_F / ||ref||_F with the difference formed in
// double-double; absolute when ref is zero.
double relative_error(const SymMatrix& computed, const DDMatrix& ref);

}  // namespace pencilfun
