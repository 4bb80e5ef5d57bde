#include "oracle.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace pencilfun {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffTolerance = 1e-55;

// Upper R with A = R^T R.
DDMatrix dd_cholesky(const DDMatrix& a, const char* which) {
  const std::size_t n = a.n();
  DDMatrix r(n);
  for (std::size_t j = 0; j < n; ++j) {
    DDReal* rj = r.col(j);
    for (std::size_t i = 0; i < j; ++i) {
      const DDReal* ri = r.col(i);
      DDReal s = a(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= ri[k] * rj[k];
      rj[i] = s / ri[i];
    }
    DDReal d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= sqr(rj[k]);
    if (!(d.hi > 0.0)) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  std::string(which) + ": matrix is not positive definite (pivot " + std::to_string(j + 1) + ")",
                  static_cast<long>(j + 1), {d.hi});
    }
    rj[j] = sqrt(d);
  }
  return r;
}

// Solves R^T X = B column by column (R upper).
DDMatrix dd_solve_rt(const DDMatrix& r, const DDMatrix& b) {
  const std::size_t n = r.n();
  DDMatrix x(n);
  for (std::size_t j = 0; j < n; ++j) {
    DDReal* xj = x.col(j);
    const DDReal* bj = b.col(j);
    for (std::size_t i = 0; i < n; ++i) {
      const DDReal* ri = r.col(i);
      DDReal s = bj[i];
      for (std::size_t k = 0; k < i; ++k) s -= ri[k] * xj[k];
      xj[i] = s / ri[i];
    }
  }
  return x;
}

DDMatrix transpose(const DDMatrix& m) {
  const std::size_t n = m.n();
  DDMatrix t(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) t(j, i) = m(i, j);
  return t;
}

}  // namespace

DDMatrix DDMatrix::from(const SymMatrix& s) {
  DDMatrix m(s.n(), true);
  for (std::size_t j = 0; j < s.n(); ++j)
    for (std::size_t i = 0; i < s.n(); ++i) m(i, j) = s(i, j);
  return m;
}

DDMatrix DDMatrix::from(const Matrix& x) {
  if (!x.square()) throw Error(ErrorCode::ShapeError, "matrix must be square");
  DDMatrix m(x.rows(), false);
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) m(i, j) = x(i, j);
  return m;
}

void DDMatrix::symmetrize() {
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t i = j + 1; i < n_; ++i) {
      DDReal v = ((*this)(i, j) + (*this)(j, i)) * 0.5;
      (*this)(i, j) = v;
      (*this)(j, i) = v;
    }
  symmetric_ = true;
}

Matrix DDMatrix::rounded() const {
  Matrix m(n_, n_);
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t i = 0; i < n_; ++i) m(i, j) = (*this)(i, j).to_double();
  return m;
}

SymMatrix DDMatrix::rounded_sym() const { return SymMatrix::symmetrize(rounded()); }

DDReal DDMatrix::frobenius() const {
  DDReal s = 0.0;
  for (const DDReal& v : a_) s += sqr(v);
  return sqrt(s);
}

DDEigen dd_jacobi_eig(const DDMatrix& x) {
  const std::size_t n = x.n();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i)
      if (!(x(i, j) == x(j, i))) throw Error(ErrorCode::ShapeError, "Jacobi input is not symmetric");
  DDMatrix a = x;
  DDMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double norm = x.frobenius().hi;
  int sweeps = 0;
  for (;; ++sweeps) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) off += a(i, j).hi * a(i, j).hi;
    if (std::sqrt(off) <= kOffTolerance * norm) break;
    if (sweeps >= kMaxSweeps) throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exceeded");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const DDReal apq = a(p, q);
        if (apq.hi == 0.0) continue;
        const DDReal diff = a(q, q) - a(p, p);
        DDReal t;
        if (std::abs(apq.hi) <= 1e-40 * std::abs(diff.hi)) {
          // theta^2 would overflow; t = 1 / (2 theta) to working accuracy.
          t = apq / diff;
        } else {
          const DDReal theta = diff / (apq * 2.0);
          t = 1.0 / (abs(theta) + sqrt(sqr(theta) + 1.0));
          if (theta.hi < 0.0) t = -t;
        }
        const DDReal c = 1.0 / sqrt(sqr(t) + 1.0);
        const DDReal s = t * c;
        const DDReal tau = s / (c + 1.0);
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        DDReal* cp = a.col(p);
        DDReal* cq = a.col(q);
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const DDReal akp = cp[k], akq = cq[k];
          cp[k] = akp - s * (akq + tau * akp);
          cq[k] = akq + s * (akp - tau * akq);
        }
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          a(p, k) = cp[k];
          a(q, k) = cq[k];
        }
        DDReal* vp = v.col(p);
        DDReal* vq = v.col(q);
        for (std::size_t k = 0; k < n; ++k) {
          const DDReal vkp = vp[k], vkq = vq[k];
          vp[k] = vkp - s * (vkq + tau * vkp);
          vq[k] = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  DDEigen out;
  out.q = DDMatrix(n);
  out.lambda.resize(n);
  out.sweeps = sweeps;
  for (std::size_t j = 0; j < n; ++j) {
    out.lambda[j] = a(order[j], order[j]);
    std::copy(v.col(order[j]), v.col(order[j]) + n, out.q.col(j));
  }
  return out;
}

DDReal dd_eval(const FunctionSpec& f, const DDReal& x) {
  const bool dual = f.is_dual();
  const DDReal te = dual ? DDReal(1.0) - f.t() : DDReal(f.t());
  switch (f.kind()) {
    case FunctionKind::Log: return dual ? -(x * log(x)) : log(x);
    case FunctionKind::Power: return pow(x, te);
    case FunctionKind::Sqrt: return sqrt(x);
    case FunctionKind::ArithMean: return (DDReal(1.0) - te) + te * x;
    case FunctionKind::HarmMean: return (x * 2.0) / (x + 1.0);
    case FunctionKind::PowerMean: {
      const DDReal p = f.p();
      const DDReal m = (DDReal(1.0) - te) + te * pow(x, p);
      return pow(m, DDReal(1.0) / p);
    }
    case FunctionKind::Exp: return dual ? x * exp(DDReal(1.0) / x) : exp(x);
    case FunctionKind::Identity: return dual ? DDReal(1.0) : x;
    case FunctionKind::ConstantOne: return dual ? x : DDReal(1.0);
  }
  return x;
}

DDMatrix reference_phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f) {
  if (a.n() != b.n()) throw Error(ErrorCode::ShapeError, "A and B differ in size");
  const std::size_t n = a.n();
  const DDMatrix r = dd_cholesky(DDMatrix::from(a), "A");
  // S3 = R^{-T} B R^{-1} = R^{-T} (R^{-T} B)^T.
  const DDMatrix y = dd_solve_rt(r, DDMatrix::from(b));
  DDMatrix s3 = dd_solve_rt(r, transpose(y));
  s3.symmetrize();
  const DDEigen e = dd_jacobi_eig(s3);

  std::vector<double> lam(n);
  for (std::size_t i = 0; i < n; ++i) lam[i] = e.lambda[i].hi;
  f.require_in_domain(lam);
  std::vector<DDReal> fl(n);
  for (std::size_t i = 0; i < n; ++i) fl[i] = dd_eval(f, e.lambda[i]);

  // S_t = R^T Q, then S5 = S_t f(Lambda) S_t^T.
  DDMatrix st(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const DDReal* ri = r.col(i);
      DDReal s = 0.0;
      for (std::size_t k = 0; k <= i; ++k) s += ri[k] * e.q(k, j);
      st(i, j) = s;
    }
  DDMatrix s5(n, true);
  std::vector<DDReal> row(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) row[k] = st(j, k) * fl[k];
    for (std::size_t i = j; i < n; ++i) {
      DDReal s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += st(i, k) * row[k];
      s5(i, j) = s;
      s5(j, i) = s;
    }
  }
  return s5;
}

double relative_error(const SymMatrix& computed, const DDMatrix& ref) {
  if (computed.n() != ref.n()) throw Error(ErrorCode::ShapeError, "sizes differ");
  const std::size_t n = ref.n();
  DDReal diff = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) diff += sqr(ref(i, j) - computed(i, j));
  const double d = sqrt(diff).to_double();
  const double r = ref.frobenius().to_double();
  return r == 0.0 ? d : d / r;
}

}  // namespace pencilfun
