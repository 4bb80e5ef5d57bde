#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace pencilfun {

// Dense column-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  // Row-wise literal, for tests and small examples.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  Matrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Dense symmetric matrix. Both triangles are stored and always hold identical
// values; there is no element-wise mutable access that could break that.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : m_(n, n) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  // Throws ShapeError unless the literal is exactly symmetric.
  static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  // Throws ShapeError unless `m` is square and exactly symmetric.
  static SymMatrix from_exact(const Matrix& m);
  // (M + M^T) / 2.
  static SymMatrix symmetrize(const Matrix& m);
  // Mirrors the lower triangle of `m` onto the upper triangle.
  static SymMatrix from_lower(Matrix m);
  // Mirrors the upper triangle of `m` onto the lower triangle.
  static SymMatrix from_upper(Matrix m);

  std::size_t n() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix& dense() const noexcept { return m_; }
  const double* data() const noexcept { return m_.data(); }

  SymMatrix scaled(double alpha) const;

 private:
  Matrix m_;
};

enum class Triangle { Upper, Lower };

// Triangular matrix T, kept internally as an upper-triangular array R with
// T = R (Upper view) or T = R^T (Lower view). Cholesky produces R with a
// positive diagonal; transposition only flips the view.
class TriangularFactor {
 public:
  TriangularFactor() = default;
  // `upper` must have zeros strictly below the diagonal (ShapeError otherwise).
  explicit TriangularFactor(Matrix upper, Triangle view = Triangle::Upper);
  static TriangularFactor from_lower(const Matrix& lower);

  std::size_t n() const noexcept { return r_.rows(); }
  Triangle view() const noexcept { return view_; }
  // Entry of T itself (view applied).
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return view_ == Triangle::Upper ? r_(i, j) : r_(j, i);
  }
  const Matrix& upper_storage() const noexcept { return r_; }
  TriangularFactor transposed() const {
    return adopt(r_, view_ == Triangle::Upper ? Triangle::Lower : Triangle::Upper);
  }
  Matrix dense() const;

  // Takes ownership of an upper-triangular array without re-checking the
  // zero pattern; for kernels that produce it by construction.
  static TriangularFactor adopt(Matrix upper, Triangle view) {
    TriangularFactor t;
    t.r_ = std::move(upper);
    t.view_ = view;
    return t;
  }

 private:
  Matrix r_;
  Triangle view_ = Triangle::Upper;
};

struct EigenDecomposition {
  Matrix q;                    // orthogonal, columns are eigenvectors
  std::vector<double> lambda;  // ascending
};

// Small dense helpers shared across modules.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double alpha, const Matrix& a);
double frobenius_norm(const Matrix& a);
double frobenius_norm(const SymMatrix& a);
// ||a - b||_F / ||b||_F (or the absolute difference when b is zero).
double relative_difference(const Matrix& a, const Matrix& b);
double relative_difference(const SymMatrix& a, const SymMatrix& b);

}  // namespace pencilfun
