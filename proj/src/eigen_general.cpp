#include "eigen_general.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "linalg.hpp"

namespace pencilfun {

namespace {

using u64 = std::uint64_t;

constexpr double kEps = 0x1p-52;
constexpr int kMaxIterations = 100;

// Householder reduction to upper Hessenberg form; returns the accumulated
// orthogonal factor.
Matrix hessenberg(Matrix& h, u64& madds) {
  const std::size_t n = h.rows();
  std::vector<double> tau(n, 0.0), w(n);
  Matrix vs(n, n);  // Householder vectors, column k holds v_k in rows k+1..
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double* x = h.data() + k * n + k + 1;
    const double alpha = x[0];
    double xnorm2 = 0.0;
    for (std::size_t i = 1; i < m; ++i) xnorm2 += x[i] * x[i];
    if (xnorm2 == 0.0) continue;
    const double beta = -std::copysign(std::hypot(alpha, std::sqrt(xnorm2)), alpha);
    const double t = (beta - alpha) / beta;
    const double scale = 1.0 / (alpha - beta);
    double* v = vs.data() + k * n + k + 1;
    v[0] = 1.0;
    for (std::size_t i = 1; i < m; ++i) v[i] = x[i] * scale;
    tau[k] = t;
    x[0] = beta;
    for (std::size_t i = 1; i < m; ++i) x[i] = 0.0;
    // Left: H[k+1:, k+1:] -= t v (v^T H).
    for (std::size_t j = k + 1; j < n; ++j) {
      double* hj = h.data() + j * n + k + 1;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += v[i] * hj[i];
      s *= t;
      for (std::size_t i = 0; i < m; ++i) hj[i] -= s * v[i];
    }
    // Right: H[:, k+1:] -= t (H v) v^T.
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t jj = 0; jj < m; ++jj) {
      const double* hj = h.data() + (k + 1 + jj) * n;
      const double vj = v[jj];
      for (std::size_t i = 0; i < n; ++i) w[i] += hj[i] * vj;
    }
    for (std::size_t jj = 0; jj < m; ++jj) {
      double* hj = h.data() + (k + 1 + jj) * n;
      const double c = t * v[jj];
      for (std::size_t i = 0; i < n; ++i) hj[i] -= w[i] * c;
    }
    madds += 2 * static_cast<u64>(m) * m + 2 * static_cast<u64>(m) * n;
  }
  Matrix q = Matrix::identity(n);
  for (std::size_t k = n >= 3 ? n - 2 : 0; k-- > 0;) {
    if (tau[k] == 0.0) continue;
    const std::size_t m = n - k - 1;
    const double* v = vs.data() + k * n + k + 1;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* qj = q.data() + j * n + k + 1;
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += v[i] * qj[i];
      s *= tau[k];
      for (std::size_t i = 0; i < m; ++i) qj[i] -= s * v[i];
    }
    madds += 2 * static_cast<u64>(m) * m;
  }
  return q;
}

struct Rotation {
  double p;
  double q;
};

// Applies the plane rotation [[q, p], [-p, q]] to rows/columns r, r+1 of the
// Schur form and columns r, r+1 of the accumulated transformation.
void rotate_pair(Matrix& h, Matrix& z, std::size_t r, Rotation g, u64& ops) {
  const std::size_t n = h.rows();
  for (std::size_t j = r; j < n; ++j) {
    const double a = h(r, j);
    h(r, j) = g.q * a + g.p * h(r + 1, j);
    h(r + 1, j) = g.q * h(r + 1, j) - g.p * a;
  }
  for (std::size_t i = 0; i <= r + 1; ++i) {
    const double a = h(i, r);
    h(i, r) = g.q * a + g.p * h(i, r + 1);
    h(i, r + 1) = g.q * h(i, r + 1) - g.p * a;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(i, r);
    z(i, r) = g.q * a + g.p * z(i, r + 1);
    z(i, r + 1) = g.q * z(i, r + 1) - g.p * a;
  }
  ops += 6 * static_cast<u64>(3 * n);
}

Rotation unit_rotation(double a, double b) {
  const double s = std::abs(a) + std::abs(b);
  if (s == 0.0) return {0.0, 1.0};
  const double p = a / s, q = b / s;
  const double r = std::sqrt(p * p + q * q);
  return {p / r, q / r};
}

// Francis double-shift QR on the Hessenberg matrix h, accumulating into z.
// On return h is upper triangular.
void schur(Matrix& h, Matrix& z, double xnorm, u64& ops) {
  const std::size_t nn = h.rows();
  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, zz = 0;
  double norm = 0.0;
  for (std::size_t i = 0; i < nn; ++i)
    for (std::size_t j = i == 0 ? 0 : i - 1; j < nn; ++j) norm += std::abs(h(i, j));
  const double imag_tol = std::sqrt(0x1p-53) * xnorm;
  std::vector<double> complex_parts;

  long n = static_cast<long>(nn) - 1;
  const long low = 0;
  int iter = 0;
  while (n >= low) {
    long l = n;
    while (l > low) {
      s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) < kEps * s) break;
      --l;
    }
    if (l == n) {
      h(n, n) += exshift;
      if (n >= 1) h(n, n - 1) = 0.0;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      w = h(n, n - 1) * h(n - 1, n);
      p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
      q = p * p + w;
      zz = std::sqrt(std::abs(q));
      h(n, n) += exshift;
      h(n - 1, n - 1) += exshift;
      x = h(n, n);
      Rotation g;
      if (q >= 0) {
        zz = p >= 0 ? p + zz : p - zz;
        g = unit_rotation(h(n, n - 1), zz);
      } else {
        if (zz > imag_tol) complex_parts.push_back(zz);
        // Nearly real pair: rotate onto an approximate eigenvector of the
        // 2x2 block at its mean eigenvalue.
        const double delta = 0.5 * (h(n - 1, n - 1) - h(n, n));
        const double b = h(n - 1, n), c = h(n, n - 1);
        if (std::hypot(delta, c) >= std::hypot(b, delta)) {
          g = unit_rotation(c, delta);
        } else {
          g = unit_rotation(-delta, b);
        }
      }
      rotate_pair(h, z, static_cast<std::size_t>(n - 1), g, ops);
      h(n, n - 1) = 0.0;
      n -= 2;
      iter = 0;
    } else {
      x = h(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = h(n - 1, n - 1);
        w = h(n, n - 1) * h(n - 1, n);
      }
      if (iter == 10) {
        exshift += x;
        for (long i = low; i <= n; ++i) h(i, i) -= x;
        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (long i = low; i <= n; ++i) h(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      if (++iter > kMaxIterations) {
        throw Error(ErrorCode::NoConvergence,
                    "QR iteration did not converge for eigenvalue " + std::to_string(n + 1),
                    static_cast<long>(n + 1));
      }
      long m = n - 2;
      while (m >= l) {
        zz = h(m, m);
        r = x - zz;
        s = y - zz;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - zz - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            kEps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(zz) + std::abs(h(m + 1, m + 1)))))
          break;
        --m;
      }
      for (long i = m + 2; i <= n; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }
      for (long k = m; k <= n - 1; ++k) {
        const bool notlast = k != n - 1;
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s == 0) continue;
        if (k != m) {
          h(k, k - 1) = -s * x;
        } else if (l != m) {
          h(k, k - 1) = -h(k, k - 1);
        }
        p += s;
        x = p / s;
        y = q / s;
        zz = r / s;
        q /= p;
        r /= p;
        for (std::size_t j = static_cast<std::size_t>(k); j < nn; ++j) {
          double* hj = h.data() + j * nn + k;
          double t = hj[0] + q * hj[1];
          if (notlast) {
            t += r * hj[2];
            hj[2] -= t * zz;
          }
          hj[0] -= t * x;
          hj[1] -= t * y;
        }
        const long imax = std::min(n, k + 3);
        double* c0 = h.data() + k * nn;
        double* c1 = c0 + nn;
        double* c2 = c1 + nn;
        for (long i = 0; i <= imax; ++i) {
          double t = x * c0[i] + y * c1[i];
          if (notlast) {
            t += zz * c2[i];
            c2[i] -= t * r;
          }
          c0[i] -= t;
          c1[i] -= t * q;
        }
        double* v0 = z.data() + k * nn;
        double* v1 = v0 + nn;
        double* v2 = v1 + nn;
        if (notlast) {
          for (std::size_t i = 0; i < nn; ++i) {
            const double t = x * v0[i] + y * v1[i] + zz * v2[i];
            v2[i] -= t * r;
            v0[i] -= t;
            v1[i] -= t * q;
          }
        } else {
          for (std::size_t i = 0; i < nn; ++i) {
            const double t = x * v0[i] + y * v1[i];
            v0[i] -= t;
            v1[i] -= t * q;
          }
        }
        ops += 10 * (static_cast<u64>(nn - k) + static_cast<u64>(imax + 1) + nn);
      }
    }
  }
  if (!complex_parts.empty()) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "spectrum is not real: complex pair(s) with imaginary part";
    for (double v : complex_parts) msg << ' ' << v;
    throw Error(ErrorCode::DomainError, msg.str(), -1, complex_parts);
  }
}

}  // namespace

RealEigenDecomposition eig_real_spectrum(const Matrix& x, FlopLedger* ledger) {
  if (!x.square() || x.rows() == 0) throw Error(ErrorCode::ShapeError, "matrix must be square and nonempty");
  const std::size_t n = x.rows();
  for (std::size_t k = 0; k < n * n; ++k)
    if (!std::isfinite(x.data()[k])) throw Error(ErrorCode::DomainError, "matrix has non-finite entries");
  u64 madds = 0, ops = 0, divs = 0;
  Matrix h = x;
  Matrix z = hessenberg(h, madds);
  schur(h, z, frobenius_norm(x), ops);
  count_formula(ledger, 25.0 * static_cast<double>(n) * n * n);

  // Eigenvectors of the triangular factor: (T - t_kk I) y = 0 with y_k = 1.
  double tnorm = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) tnorm += std::abs(h(i, j));
  const double tiny = kEps * std::max(tnorm, 1e-300);
  Matrix y(n, n);
  std::vector<double> rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = h(k, k);
    double* yk = y.data() + k * n;
    yk[k] = 1.0;
    for (std::size_t i = 0; i < k; ++i) rhs[i] = -h(i, k);
    for (std::size_t j = k; j-- > 0;) {
      double d = h(j, j) - lam;
      if (std::abs(d) < tiny) d = d < 0 ? -tiny : tiny;
      double v = rhs[j] / d;
      // Rescale the partial solution when it threatens to overflow.
      if (std::abs(v) > 1e150) {
        const double sc = 1.0 / std::abs(v);
        for (std::size_t i = j; i <= k; ++i) yk[i] *= sc;
        for (std::size_t i = 0; i <= j; ++i) rhs[i] *= sc;
        v *= sc;
      }
      yk[j] = v;
      const double* hj = h.data() + j * n;
      for (std::size_t i = 0; i < j; ++i) rhs[i] -= hj[i] * v;
      madds += j;
      ++divs;
    }
  }
  count_formula(ledger, static_cast<double>(n) * n * n / 3.0);

  // V = Z Y with Y upper triangular, columns normalized.
  RealEigenDecomposition out;
  out.v = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double* vk = out.v.data() + k * n;
    const double* yk = y.data() + k * n;
    for (std::size_t j = 0; j <= k; ++j) {
      const double c = yk[j];
      const double* zj = z.data() + j * n;
      for (std::size_t i = 0; i < n; ++i) vk[i] += c * zj[i];
    }
    madds += static_cast<u64>(n) * (k + 1);
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += vk[i] * vk[i];
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) vk[i] /= nrm;
    divs += n;
  }
  count_formula(ledger, static_cast<double>(n) * n * n);
  out.lambda.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.lambda[i] = h(i, i);
  if (ledger) {
    ledger->fma(madds);
    ledger->exact.adds += ops / 2;
    ledger->exact.muls += ops - ops / 2;
    ledger->div(divs);
  }
  return out;
}

}  // namespace pencilfun
