#include "conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "eigen_sym.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "pencil.hpp"

namespace pencilfun {

namespace {

constexpr std::size_t kGramLimit = 12;
constexpr double kPowerTolerance = 1e-10;
constexpr int kPowerCap = 10000;

// X^{-1} Y = Z diag(lambda) Z^{-1} with Z = R^{-1} Q, X = R^T R and
// R^{-T} Y R^{-1} = Q diag(lambda) Q^T.
struct CholDiag {
  Matrix z;
  Matrix zinv;  // Q^T R
  std::vector<double> lambda;
};

CholDiag chol_diag(const SymMatrix& x, const SymMatrix& y, const char* which) {
  TriangularFactor r;
  try {
    r = cholesky(x);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(which) + ": " + e.what(), e.index(), e.values());
  }
  const SymMatrix s = congruence_sandwich(r.transposed(), y, CongruenceMode::Inverse);
  EigenDecomposition e = eig_sym(s);
  CholDiag d;
  d.z = tri_solve(r, e.q);
  d.zinv = multiply(e.q.transposed(), r.dense());
  d.lambda = std::move(e.lambda);
  return d;
}

Matrix hadamard(const Matrix& f, const Matrix& g) {
  Matrix out(g.rows(), g.cols());
  for (std::size_t j = 0; j < g.cols(); ++j)
    for (std::size_t i = 0; i < g.rows(); ++i) out(i, j) = f(i, j) * g(i, j);
  return out;
}

Matrix scale_columns(Matrix m, const std::vector<double>& d) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (double& v : m.col(j)) v *= d[j];
  return m;
}

// Z^{-T} (F o (Z^T E Z)) Z^{-1}: X Df(X^{-1}Y)[X^{-1}E] in the eigenbasis.
Matrix daleckii_krein(const CholDiag& d, const Matrix& f, const Matrix& e) {
  const Matrix g = multiply(multiply(d.z.transposed(), e), d.z);
  return multiply(multiply(d.zinv.transposed(), hadamard(f, g)), d.zinv);
}

void check_shapes(const FrechetRequest& req) {
  const std::size_t n = req.a.n();
  if (req.b.n() != n || req.h.n() != n || req.l.n() != n)
    throw Error(ErrorCode::ShapeError, "A, B, H and L must have the same size");
}

std::vector<double> evaluate(const FunctionSpec& f, const std::vector<double>& x) {
  f.require_in_domain(x);
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return f.eval(v); });
  return out;
}

// Eigen-structure used by the Kronecker blocks: with X = V D V^T and
// D^{-1/2} V^T Y V D^{-1/2} = P diag(lambda) P^T,
//   zhat = X^{-1/2} Q = V D^{-1/2} P,  u = X^{1/2} Q = V D^{1/2} P,  w = u^{-1} = zhat^T.
struct SqrtDiag {
  Matrix zhat;
  Matrix u;
  std::vector<double> lambda;
};

SqrtDiag sqrt_diag(const SymMatrix& x, const SymMatrix& y, const char* which) {
  const EigenDecomposition ex = eig_sym(x);
  const std::size_t n = x.n();
  const double top = ex.lambda.back();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ex.lambda[i] > pd_threshold(n, top)))
      throw Error(ErrorCode::NotPositiveDefinite,
                  std::string(which) + ": matrix is not positive definite (eigenvalue " + std::to_string(i + 1) + ")",
                  static_cast<long>(i + 1), {ex.lambda[i]});
  }
  std::vector<double> rs(n), is(n);
  for (std::size_t i = 0; i < n; ++i) {
    rs[i] = std::sqrt(ex.lambda[i]);
    is[i] = 1.0 / rs[i];
  }
  const Matrix p = scale_columns(ex.q, is);
  const SymMatrix c = SymMatrix::symmetrize(multiply(multiply(p.transposed(), y.dense()), p));
  EigenDecomposition ec = eig_sym(c);
  SqrtDiag d;
  d.zhat = multiply(p, ec.q);
  d.u = multiply(scale_columns(ex.q, rs), ec.q);
  d.lambda = std::move(ec.lambda);
  return d;
}

// (U kron U) diag(delta) (W kron W) with W = zhat^T, column by column:
// column k + l n is vec(U (F o w_k w_l^T) U^T).
Matrix kron_block(const Matrix& u, const Matrix& zhat, const Matrix& f) {
  const std::size_t n = u.rows();
  const std::size_t nn = n * n;
  Matrix m(nn, nn);
  const Matrix ut = u.transposed();
  Matrix y(n, n);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      // w_k(i) = W(i, k) = zhat(k, i).
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) y(i, j) = f(i, j) * zhat(k, i) * zhat(l, j);
      const Matrix v = multiply(multiply(u, y), ut);
      std::copy(v.data(), v.data() + nn, m.col(k + l * n).data());
    }
  }
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = M x or y = M^T x.
void apply(const Matrix& m, const std::vector<double>& x, std::vector<double>& y, bool transpose) {
  const std::size_t r = m.rows(), c = m.cols();
  if (transpose) {
    y.assign(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      const double* mj = m.data() + j * r;
      double s = 0.0;
      for (std::size_t i = 0; i < r; ++i) s += mj[i] * x[i];
      y[j] = s;
    }
  } else {
    y.assign(r, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      const double* mj = m.data() + j * r;
      const double xj = x[j];
      for (std::size_t i = 0; i < r; ++i) y[i] += mj[i] * xj;
    }
  }
}

double max_abs(const Matrix& m) {
  double v = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (double x : m.col(j)) v = std::max(v, std::abs(x));
  return v;
}

}  // namespace

Matrix frechet_apply(const FrechetRequest& req) {
  check_shapes(req);
  const CholDiag d = chol_diag(req.a, req.b, "A");
  const Matrix f = dd_table(req.f, d.lambda).f;
  const std::vector<double> fl = evaluate(req.f, d.lambda);

  const Matrix& h = req.h.dense();
  // H X = H Z diag(lambda) Z^{-1}, H f(X) = H Z diag(f(lambda)) Z^{-1}.
  const Matrix hz = multiply(h, d.z);
  const Matrix hx = multiply(scale_columns(hz, d.lambda), d.zinv);
  const Matrix hf = multiply(scale_columns(hz, fl), d.zinv);
  return hf + daleckii_krein(d, f, req.l.dense() - hx);
}

Matrix frechet_apply_dual(const FrechetRequest& req) {
  check_shapes(req);
  const CholDiag da = chol_diag(req.a, req.b, "A");
  const CholDiag db = chol_diag(req.b, req.a, "B");
  const Matrix f = dd_table(req.f, da.lambda).f;
  const Matrix fd = dd_table(req.f.dual(), db.lambda).f;
  return daleckii_krein(db, fd, req.h.dense()) + daleckii_krein(da, f, req.l.dense());
}

KroneckerDerivative kronecker_forms(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                    std::size_t size_cap) {
  const std::size_t n = a.n();
  if (b.n() != n) throw Error(ErrorCode::ShapeError, "A and B differ in size");
  if (n > size_cap)
    throw Error(ErrorCode::SizeCapExceeded,
                "n = " + std::to_string(n) + " exceeds the Kronecker size cap " + std::to_string(size_cap),
                static_cast<long>(n));
  const SqrtDiag d1 = sqrt_diag(a, b, "A");
  const SqrtDiag d2 = sqrt_diag(b, a, "B");
  const Matrix f1 = dd_table(f, d1.lambda).f;
  const Matrix f2 = dd_table(f.dual(), d2.lambda).f;

  KroneckerDerivative k;
  k.m1 = kron_block(d1.u, d1.zhat, f1);
  k.m2 = kron_block(d2.u, d2.zhat, f2);
  k.z1hat = d1.zhat;
  k.z2hat = d2.zhat;
  k.delta1.assign(f1.data(), f1.data() + n * n);
  k.delta2.assign(f2.data(), f2.data() + n * n);
  return k;
}

double kronecker_norm(const KroneckerDerivative& k) {
  const std::size_t nn = k.m1.rows();
  if (nn == 0) return 0.0;
  if (nn <= kGramLimit * kGramLimit) {
    const SymMatrix g1 = multiply_to_symmetric(k.m1, k.m1.transposed());
    const SymMatrix g2 = multiply_to_symmetric(k.m2, k.m2.transposed());
    Matrix g = g1.dense() + g2.dense();
    const EigenDecomposition e = eig_sym(SymMatrix::from_lower(std::move(g)));
    return std::sqrt(std::max(0.0, e.lambda.back()));
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> v(nn), x1, x2, y1, y2, w(nn);
  for (double& e : v) e = unit(rng);
  double nv = std::sqrt(dot(v, v));
  for (double& e : v) e /= nv;
  double prev = 0.0;
  for (int it = 0; it < kPowerCap; ++it) {
    apply(k.m1, v, x1, true);
    apply(k.m2, v, x2, true);
    apply(k.m1, x1, y1, false);
    apply(k.m2, x2, y2, false);
    for (std::size_t i = 0; i < nn; ++i) w[i] = y1[i] + y2[i];
    const double rq = dot(v, w);
    const double nw = std::sqrt(dot(w, w));
    if (nw == 0.0) return 0.0;
    for (std::size_t i = 0; i < nn; ++i) v[i] = w[i] / nw;
    if (it > 0 && std::abs(rq - prev) <= kPowerTolerance * rq) return std::sqrt(rq);
    prev = rq;
  }
  throw Error(ErrorCode::NoConvergence, "power iteration for ||[M2 M1]||_2 did not converge");
}

DerivativeBounds derivative_norm_bounds(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f) {
  if (a.n() != b.n()) throw Error(ErrorCode::ShapeError, "A and B differ in size");
  const std::size_t n = a.n();
  const TriangularFactor r = cholesky(a);
  const std::vector<double> lambda =
      eig_sym(congruence_sandwich(r.transposed(), b, CongruenceMode::Inverse)).lambda;
  std::vector<double> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / lambda[i];
  const Matrix fm = dd_table(f, lambda).f;
  const Matrix fh = dd_table(f.dual(), inv).f;
  const std::vector<double> fl = evaluate(f, lambda);
  double g = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) g = std::max(g, std::abs(fl[j] - fm(i, j) * lambda[j]));

  DerivativeBounds out;
  out.mu_a = spd_condition(a);
  out.mu_b = spd_condition(b);
  const double mf = max_abs(fm), mh = max_abs(fh);
  out.mixed = std::hypot(out.mu_a * mf, out.mu_b * mh);
  out.a_only = out.mu_a * std::hypot(mf, g);
  return out;
}

double psi(const TriangularFactor& r) {
  const TriangularFactor minv = tri_inverse(comparison_matrix(r));
  const TriangularFactor rinv = tri_inverse(r);
  const double two = std::sqrt(eig_sym(tri_gram(rinv)).lambda.back());
  return frobenius_norm(minv.dense()) / two;
}

ConditionReport cond_phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f, std::size_t size_cap) {
  ConditionReport rep;
  rep.kron = kronecker_forms(a, b, f, size_cap);
  rep.dphi_norm = kronecker_norm(rep.kron);
  const PencilResult p = alg2_cholesky_schur(a, b, f);
  rep.phi_norm = frobenius_norm(p.s5);
  const double ab = std::hypot(frobenius_norm(a), frobenius_norm(b));
  rep.cond_phi = rep.phi_norm == 0.0 ? std::numeric_limits<double>::infinity() : rep.dphi_norm * ab / rep.phi_norm;
  const DerivativeBounds bounds = derivative_norm_bounds(a, b, f);
  rep.bound_lemma3 = bounds.mixed;
  rep.bound_eq14 = bounds.a_only;
  rep.mu_a = bounds.mu_a;
  rep.mu_b = bounds.mu_b;
  rep.psi_ra = psi(cholesky(a));
  return rep;
}

}  // namespace pencilfun
