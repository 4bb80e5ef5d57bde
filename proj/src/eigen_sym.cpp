#include "eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace pencilfun {

namespace {

using u64 = std::uint64_t;

constexpr double kEps = 0x1p-52;
constexpr int kMaxIterations = 64;

// Reduces the lower triangle of `a` to tridiagonal form in place. The
// Householder vectors are left below the subdiagonal with tau alongside.
void tridiagonalize(Matrix& a, std::vector<double>& d, std::vector<double>& e,
                    std::vector<double>& tau, u64& madds) {
  const std::size_t n = a.rows();
  std::vector<double> w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double* v = a.data() + k * n + k + 1;
    const double alpha = v[0];
    double xnorm2 = 0.0;
    for (std::size_t i = 1; i < m; ++i) xnorm2 += v[i] * v[i];
    madds += m - 1;
    if (xnorm2 == 0.0) {
      tau[k] = 0.0;
      e[k] = alpha;
      continue;
    }
    const double beta = -std::copysign(std::hypot(alpha, std::sqrt(xnorm2)), alpha);
    tau[k] = (beta - alpha) / beta;
    const double scale = 1.0 / (alpha - beta);
    for (std::size_t i = 1; i < m; ++i) v[i] *= scale;
    v[0] = 1.0;
    e[k] = beta;

    // w = tau A22 v using the lower triangle only.
    double* p = w.data();
    std::fill(p, p + m, 0.0);
    for (std::size_t jj = 0; jj < m; ++jj) {
      const double* aj = a.data() + (k + 1 + jj) * n + (k + 1 + jj);
      const double vj = v[jj];
      double s = aj[0] * vj;
      const double* vv = v + jj;
      double* pp = p + jj;
      for (std::size_t ii = 1; ii < m - jj; ++ii) {
        pp[ii] += aj[ii] * vj;
        s += aj[ii] * vv[ii];
      }
      p[jj] += s;
    }
    madds += static_cast<u64>(m) * m;
    double pv = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] *= tau[k];
      pv += p[i] * v[i];
    }
    const double alpha2 = -0.5 * tau[k] * pv;
    for (std::size_t i = 0; i < m; ++i) p[i] += alpha2 * v[i];
    madds += 3 * static_cast<u64>(m);

    // A22 -= v w^T + w v^T, lower triangle.
    for (std::size_t jj = 0; jj < m; ++jj) {
      double* aj = a.data() + (k + 1 + jj) * n + (k + 1 + jj);
      const double wj = p[jj], vj = v[jj];
      const double* vv = v + jj;
      const double* ww = p + jj;
      for (std::size_t ii = 0; ii < m - jj; ++ii) aj[ii] -= vv[ii] * wj + ww[ii] * vj;
    }
    madds += static_cast<u64>(m) * (m + 1);
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  if (n >= 2) e[n - 2] = a(n - 1, n - 2);
  e[n - 1] = 0.0;
}

// Q = H_0 H_1 ... H_{n-3}, formed backwards.
Matrix accumulate_q(const Matrix& a, const std::vector<double>& tau, u64& madds) {
  const std::size_t n = a.rows();
  Matrix q = Matrix::identity(n);
  for (std::size_t k = n >= 3 ? n - 2 : 0; k-- > 0;) {
    if (tau[k] == 0.0) continue;
    const std::size_t m = n - k - 1;
    const double* v = a.data() + k * n + k + 1;
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

// Eigenvalues of [[a, b], [b, c]]: rt1 of larger magnitude, rt2 = det / rt1,
// and (cs, sn) the unit eigenvector of rt1.
void sym_2x2(double a, double b, double c, double& rt1, double& rt2, double& cs, double& sn) {
  const double sm = a + c, df = a - c, adf = std::abs(df), tb = b + b, ab = std::abs(tb);
  const double acmx = std::abs(a) > std::abs(c) ? a : c;
  const double acmn = std::abs(a) > std::abs(c) ? c : a;
  double rt;
  if (adf > ab)
    rt = adf * std::sqrt(1.0 + (ab / adf) * (ab / adf));
  else if (adf < ab)
    rt = ab * std::sqrt(1.0 + (adf / ab) * (adf / ab));
  else
    rt = ab * std::sqrt(2.0);
  int sgn1;
  if (sm < 0.0) {
    rt1 = 0.5 * (sm - rt);
    sgn1 = -1;
    rt2 = (acmx / rt1) * acmn - (b / rt1) * b;
  } else if (sm > 0.0) {
    rt1 = 0.5 * (sm + rt);
    sgn1 = 1;
    rt2 = (acmx / rt1) * acmn - (b / rt1) * b;
  } else {
    rt1 = 0.5 * rt;
    rt2 = -0.5 * rt;
    sgn1 = 1;
  }
  int sgn2;
  double csx;
  if (df >= 0.0) {
    csx = df + rt;
    sgn2 = 1;
  } else {
    csx = df - rt;
    sgn2 = -1;
  }
  if (std::abs(csx) > ab) {
    const double ct = -tb / csx;
    sn = 1.0 / std::sqrt(1.0 + ct * ct);
    cs = ct * sn;
  } else if (ab == 0.0) {
    cs = 1.0;
    sn = 0.0;
  } else {
    const double tn = -csx / tb;
    cs = 1.0 / std::sqrt(1.0 + tn * tn);
    sn = tn * cs;
  }
  if (sgn1 == sgn2) {
    const double tn = cs;
    cs = -sn;
    sn = tn;
  }
}

// Plane rotation with [c s; -s c] [f; g] = [r; 0].
void givens(double f, double g, double& c, double& s, double& r) {
  if (g == 0.0) {
    c = 1.0;
    s = 0.0;
    r = f;
  } else if (f == 0.0) {
    c = 0.0;
    s = std::copysign(1.0, g);
    r = std::abs(g);
  } else {
    const double d = std::hypot(f, g);
    c = std::abs(f) / d;
    r = std::copysign(d, f);
    s = g / r;
  }
}

// Columns j and j+1 of z: (zj, zj1) <- (c zj + s zj1, c zj1 - s zj).
void rotate_columns(Matrix& z, std::size_t j, double c, double s) {
  const std::size_t n = z.rows();
  double* __restrict zj = z.data() + j * n;
  double* __restrict zj1 = zj + n;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = zj1[k];
    zj1[k] = c * t - s * zj[k];
    zj[k] = s * t + c * zj[k];
  }
}

// Implicit QL/QR on the tridiagonal (d, e), choosing the direction per block
// so that the chase starts from the end with the larger diagonal entry.
// Off-diagonals are dropped relative to their neighbours, not to ||T||, so
// graded matrices keep their small eigenvalues to high relative accuracy.
void tridiagonal_qr(std::vector<double>& d, std::vector<double>& e, Matrix& z, u64& ops) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  constexpr double eps2 = kEps * kEps / 4.0;
  constexpr double safmin = std::numeric_limits<double>::min();
  const std::size_t max_iterations = static_cast<std::size_t>(kMaxIterations) * n;
  std::vector<double> cw(n), sw(n);
  std::size_t total = 0;
  std::size_t l1 = 0;
  const auto negligible = [&](std::size_t m) {
    return e[m] * e[m] <= (eps2 * std::abs(d[m])) * std::abs(d[m + 1]) + safmin;
  };
  while (l1 < n) {
    if (l1 > 0) e[l1 - 1] = 0.0;
    std::size_t m = l1;
    for (; m + 1 < n; ++m) {
      const double tst = std::abs(e[m]);
      if (tst == 0.0) break;
      if (tst <= std::sqrt(std::abs(d[m])) * std::sqrt(std::abs(d[m + 1])) * (kEps / 2.0)) {
        e[m] = 0.0;
        break;
      }
    }
    std::size_t l = l1;
    std::size_t lend = m;
    l1 = m + 1;
    if (lend == l) continue;
    if (std::abs(d[lend]) < std::abs(d[l])) std::swap(l, lend);

    if (lend > l) {
      // QL: deflate at the top.
      while (l <= lend) {
        std::size_t mm = l;
        while (mm < lend && !negligible(mm)) ++mm;
        if (mm < lend) e[mm] = 0.0;
        if (mm == l) {
          ++l;
          continue;
        }
        if (mm == l + 1) {
          double rt1, rt2, c, s;
          sym_2x2(d[l], e[l], d[l + 1], rt1, rt2, c, s);
          rotate_columns(z, l, c, s);
          d[l] = rt1;
          d[l + 1] = rt2;
          e[l] = 0.0;
          l += 2;
          continue;
        }
        if (total == max_iterations) break;
        ++total;
        double p = d[l];
        double g = (d[l + 1] - p) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - p + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0;
        p = 0.0;
        for (std::size_t i = mm; i-- > l;) {
          const double f = s * e[i];
          const double b = c * e[i];
          givens(g, f, c, s, r);
          if (i + 1 != mm) e[i + 1] = r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          cw[i] = c;
          sw[i] = -s;
        }
        for (std::size_t j = mm; j-- > l;) rotate_columns(z, j, cw[j], sw[j]);
        ops += (6 * static_cast<u64>(n) + 20) * (mm - l);
        d[l] -= p;
        e[l] = g;
      }
    } else {
      // QR: deflate at the bottom.
      while (l + 1 > lend) {
        std::size_t mm = l;
        while (mm > lend && !negligible(mm - 1)) --mm;
        if (mm > lend) e[mm - 1] = 0.0;
        if (mm == l) {
          if (l == 0) break;
          --l;
          continue;
        }
        if (mm + 1 == l) {
          double rt1, rt2, c, s;
          sym_2x2(d[l - 1], e[l - 1], d[l], rt1, rt2, c, s);
          rotate_columns(z, l - 1, c, s);
          d[l - 1] = rt1;
          d[l] = rt2;
          e[l - 1] = 0.0;
          if (l < 2 || l - 2 < lend) break;
          l -= 2;
          continue;
        }
        if (total == max_iterations) break;
        ++total;
        double p = d[l];
        double g = (d[l - 1] - p) / (2.0 * e[l - 1]);
        double r = std::hypot(g, 1.0);
        g = d[mm] - p + e[l - 1] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0;
        p = 0.0;
        for (std::size_t i = mm; i < l; ++i) {
          const double f = s * e[i];
          const double b = c * e[i];
          givens(g, f, c, s, r);
          if (i != mm) e[i - 1] = r;
          g = d[i] - p;
          r = (d[i + 1] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i] = g + p;
          g = c * r - b;
          cw[i] = c;
          sw[i] = s;
        }
        for (std::size_t j = mm; j < l; ++j) rotate_columns(z, j, cw[j], sw[j]);
        ops += (6 * static_cast<u64>(n) + 20) * (l - mm);
        d[l] -= p;
        e[l - 1] = g;
      }
    }
    if (total == max_iterations) {
      std::size_t bad = 0;
      while (bad + 1 < n && e[bad] == 0.0) ++bad;
      throw Error(ErrorCode::NoConvergence,
                  "symmetric eigensolver did not converge for eigenvalue " + std::to_string(bad + 1),
                  static_cast<long>(bad + 1));
    }
  }
}

}  // namespace

double pd_threshold(std::size_t n, double lambda_max) {
  return static_cast<double>(n) * 0x1p-53 * lambda_max;
}

EigenDecomposition eig_sym(const SymMatrix& x, FlopLedger* ledger) {
  const std::size_t n = x.n();
  if (n == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
  for (std::size_t k = 0, e = n * n; k < e; ++k)
    if (!std::isfinite(x.data()[k])) throw Error(ErrorCode::DomainError, "matrix has non-finite entries");
  // The reduction runs on the reversed matrix P X P, which amounts to
  // eliminating from the last column upward. With T and the accumulated
  // transform mapped back through P, matrices graded towards the bottom
  // right (such as R^{-T} B R^{-1} for ill-conditioned A) keep their
  // small eigenvalues accurate.
  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) a(i, j) = x(n - 1 - i, n - 1 - j);
  std::vector<double> dr(n), er(n, 0.0), tau(n, 0.0);
  u64 madds = 0, ops = 0;
  tridiagonalize(a, dr, er, tau, madds);
  const Matrix qr = accumulate_q(a, tau, madds);
  std::vector<double> d(n), e(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = dr[n - 1 - i];
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = er[n - 2 - i];
  Matrix z(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) z(i, j) = qr(n - 1 - i, n - 1 - j);
  tridiagonal_qr(d, e, z, ops);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
  EigenDecomposition out;
  out.q = Matrix(n, n);
  out.lambda.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.lambda[j] = d[src];
    const double* zc = z.data() + src * n;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(zc[i]) > std::abs(zc[imax])) imax = i;
    const double sign = zc[imax] < 0.0 ? -1.0 : 1.0;
    double* qc = out.q.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) qc[i] = sign * zc[i];
  }
  if (ledger) {
    ledger->fma(madds);
    ledger->exact.adds += ops / 3;
    ledger->exact.muls += ops - ops / 3;
    ledger->formula += 9.0 * static_cast<double>(n) * n * n;
  }
  return out;
}

SymMatrix sym_sqrt(const SymMatrix& a, FlopLedger* ledger) {
  const EigenDecomposition e = eig_sym(a, ledger);
  const std::size_t n = a.n();
  const double lmax = e.lambda.back();
  const double tol = pd_threshold(n, lmax);
  for (std::size_t i = 0; i < n; ++i)
    if (!(e.lambda[i] > tol)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "matrix is not positive definite (eigenvalue " + std::to_string(i + 1) + ")",
                  static_cast<long>(i + 1), {e.lambda[i]});
    }
  std::vector<double> root(n);
  for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(e.lambda[i]);
  count_sqrt(ledger, n);
  return scaled_gram(e.q, root, ledger);
}

}  // namespace pencilfun
