#include "matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace pencilfun {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeError, "matrix shapes differ");
  }
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorCode::ShapeError, "ragged matrix literal");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
  return t;
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) s.m_(i, i) = 1.0;
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
  return s;
}

SymMatrix SymMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  return from_exact(Matrix::from_rows(rows));
}

SymMatrix SymMatrix::from_exact(const Matrix& m) {
  if (!m.square()) throw Error(ErrorCode::ShapeError, "symmetric matrix must be square");
  if (m.rows() == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != m(j, i)) {
        throw Error(ErrorCode::ShapeError,
                    "matrix is not symmetric at (" + std::to_string(i + 1) + "," +
                        std::to_string(j + 1) + ")");
      }
  SymMatrix s;
  s.m_ = m;
  return s;
}

SymMatrix SymMatrix::symmetrize(const Matrix& m) {
  if (!m.square()) throw Error(ErrorCode::ShapeError, "symmetric matrix must be square");
  const std::size_t n = m.rows();
  SymMatrix s(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.m_(j, j) = m(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      s.m_(i, j) = v;
      s.m_(j, i) = v;
    }
  }
  return s;
}

SymMatrix SymMatrix::from_lower(Matrix m) {
  if (!m.square()) throw Error(ErrorCode::ShapeError, "symmetric matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) m(j, i) = m(i, j);
  SymMatrix s;
  s.m_ = std::move(m);
  return s;
}

SymMatrix SymMatrix::from_upper(Matrix m) {
  if (!m.square()) throw Error(ErrorCode::ShapeError, "symmetric matrix must be square");
  const std::size_t n = m.rows();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i) m(i, j) = m(j, i);
  SymMatrix s;
  s.m_ = std::move(m);
  return s;
}

SymMatrix SymMatrix::scaled(double alpha) const {
  SymMatrix s(*this);
  double* p = s.m_.data();
  for (std::size_t k = 0, e = n() * n(); k < e; ++k) p[k] *= alpha;
  return s;
}

TriangularFactor::TriangularFactor(Matrix upper, Triangle view) : r_(std::move(upper)), view_(view) {
  if (!r_.square()) throw Error(ErrorCode::ShapeError, "triangular factor must be square");
  for (std::size_t j = 0; j < r_.cols(); ++j)
    for (std::size_t i = j + 1; i < r_.rows(); ++i)
      if (r_(i, j) != 0.0) throw Error(ErrorCode::ShapeError, "factor is not upper triangular");
}

TriangularFactor TriangularFactor::from_lower(const Matrix& lower) {
  return TriangularFactor(lower.transposed(), Triangle::Lower);
}

Matrix TriangularFactor::dense() const {
  return view_ == Triangle::Upper ? r_ : r_.transposed();
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0, e = a.rows() * a.cols(); k < e; ++k) c.data()[k] = a.data()[k] + b.data()[k];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0, e = a.rows() * a.cols(); k < e; ++k) c.data()[k] = a.data()[k] - b.data()[k];
  return c;
}

Matrix operator*(double alpha, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t k = 0, e = a.rows() * a.cols(); k < e; ++k) c.data()[k] = alpha * a.data()[k];
  return c;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t k = 0, e = a.rows() * a.cols(); k < e; ++k) s += a.data()[k] * a.data()[k];
  return std::sqrt(s);
}

double frobenius_norm(const SymMatrix& a) { return frobenius_norm(a.dense()); }

double relative_difference(const Matrix& a, const Matrix& b) {
  const double d = frobenius_norm(a - b);
  const double nb = frobenius_norm(b);
  return nb == 0.0 ? d : d / nb;
}

double relative_difference(const SymMatrix& a, const SymMatrix& b) {
  return relative_difference(a.dense(), b.dense());
}

}  // namespace pencilfun
