#include "pencil.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "eigen_general.hpp"
#include "eigen_sym.hpp"
#include "errors.hpp"
#include "linalg.hpp"

namespace pencilfun {

namespace {

using Clock = std::chrono::steady_clock;

void require_pair(const SymMatrix& a, const SymMatrix& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::ShapeError, "A and B differ in size");
  if (a.n() == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
}

// Cholesky with the failing operand named in the message.
TriangularFactor cholesky_of(const SymMatrix& m, const char* which, FlopLedger* ledger) {
  try {
    return cholesky(m, ledger);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(e.code(), std::string(which) + ": " + e.what(), e.index(), e.values());
  }
}

std::vector<double> apply_function(const FunctionSpec& f, const std::vector<double>& lambda) {
  f.require_in_domain(lambda);
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    out[i] = f.eval(lambda[i]);
    if (!std::isfinite(out[i])) {
      throw Error(ErrorCode::Overflow, "f(" + std::to_string(lambda[i]) + ") is not finite",
                  static_cast<long>(i + 1), {lambda[i]});
    }
  }
  return out;
}

void require_finite(const SymMatrix& s) {
  for (std::size_t k = 0, e = s.n() * s.n(); k < e; ++k)
    if (!std::isfinite(s.data()[k])) throw Error(ErrorCode::Overflow, "result has non-finite entries");
}

class Run {
 public:
  Run(Algorithm a, Variant v, bool trace) : start_(Clock::now()) {
    result_.algorithm = a;
    result_.variant = v;
    if (trace) result_.trace.emplace();
  }
  FlopLedger* ledger() { return &result_.flops; }
  AlgorithmTrace* trace() { return result_.trace ? &*result_.trace : nullptr; }
  PencilResult& result() { return result_; }
  PencilResult finish(SymMatrix s5, std::vector<double> eigenvalues) {
    require_finite(s5);
    result_.s5 = std::move(s5);
    result_.eigenvalues = std::move(eigenvalues);
    result_.wall_time = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(result_);
  }

 private:
  Clock::time_point start_;
  PencilResult result_;
};

}  // namespace

const char* algorithm_name(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Naive: return "naive";
    case Algorithm::SqrtSchur: return "sqrt_schur";
    case Algorithm::CholSchur: return "chol_schur";
    case Algorithm::CholSchurPd: return "chol_schur_pd";
  }
  return "unknown";
}

const char* variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Default: return "default";
    case Variant::Standard: return "standard";
    case Variant::Fast: return "fast";
    case Variant::FastSolve: return "fast_solve";
    case Variant::FastProduct: return "fast_product";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "naive") return Algorithm::Naive;
  if (name == "sqrt_schur" || name == "alg1") return Algorithm::SqrtSchur;
  if (name == "chol_schur" || name == "alg2") return Algorithm::CholSchur;
  if (name == "chol_schur_pd" || name == "alg3") return Algorithm::CholSchurPd;
  throw Error(ErrorCode::BadParameter, "unknown algorithm '" + std::string(name) + "'");
}

Variant parse_variant(std::string_view name) {
  if (name == "default") return Variant::Default;
  if (name == "standard") return Variant::Standard;
  if (name == "fast") return Variant::Fast;
  if (name == "fast_solve") return Variant::FastSolve;
  if (name == "fast_product") return Variant::FastProduct;
  throw Error(ErrorCode::BadParameter, "unknown variant '" + std::string(name) + "'");
}

Variant resolve_variant(Algorithm a, Variant v) {
  auto reject = [&]() -> Variant {
    throw Error(ErrorCode::BadParameter, std::string("algorithm ") + algorithm_name(a) +
                                             " has no variant '" + variant_name(v) + "'");
  };
  switch (a) {
    case Algorithm::Naive:
      if (v == Variant::Default || v == Variant::Standard) return Variant::Standard;
      return reject();
    case Algorithm::SqrtSchur:
    case Algorithm::CholSchurPd:
      if (v == Variant::Default) return Variant::Fast;
      if (v == Variant::Standard || v == Variant::Fast) return v;
      return reject();
    case Algorithm::CholSchur:
      if (v == Variant::Default || v == Variant::Fast) return Variant::FastProduct;
      if (v == Variant::Standard || v == Variant::FastSolve || v == Variant::FastProduct) return v;
      return reject();
  }
  return reject();
}

PencilResult naive(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f, const PencilOptions& opt) {
  require_pair(a, b);
  Run run(Algorithm::Naive, resolve_variant(Algorithm::Naive, opt.variant), opt.trace);
  FlopLedger* L = run.ledger();
  const std::size_t n = a.n();

  const TriangularFactor r = cholesky_of(a, "A", L);
  const Matrix y = tri_solve(r, b.dense(), Side::Left, true, L);
  const Matrix x = tri_solve(r, y, Side::Left, false, L);

  const RealEigenDecomposition e = eig_real_spectrum(x, L);
  const std::vector<double> fl = apply_function(f, e.lambda);

  Matrix w = e.v;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) w(i, j) *= fl[j];
  count_mul(L, static_cast<std::uint64_t>(n) * n);
  const LuFactors lu = lu_factor(e.v, L);
  // F = W V^{-1}, i.e. V^T F^T = W^T.
  const Matrix ft = lu_solve(lu, w.transposed(), true, L);
  const Matrix s = multiply(a.dense(), ft.transposed(), L);

  double vnorm1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += std::abs(e.v(i, j));
    vnorm1 = std::max(vnorm1, c);
  }
  const double condv = vnorm1 * lu_inverse_norm1_estimate(lu);
  if (!(condv <= 1.0 / 0x1p-53)) run.result().warnings.push_back("IllConditionedEigenvectors");

  if (AlgorithmTrace* t = run.trace()) {
    t->s1 = x;
    t->q = e.v;
  }
  std::vector<double> lambda = e.lambda;
  std::sort(lambda.begin(), lambda.end());
  return run.finish(SymMatrix::symmetrize(s), std::move(lambda));
}

PencilResult alg1_sqrt_schur(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                             const PencilOptions& opt) {
  require_pair(a, b);
  const Variant v = resolve_variant(Algorithm::SqrtSchur, opt.variant);
  Run run(Algorithm::SqrtSchur, v, opt.trace);
  FlopLedger* L = run.ledger();

  SymMatrix s1;
  try {
    s1 = sym_sqrt(a, L);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(e.code(), std::string("A: ") + e.what(), e.index(), e.values());
  }
  SymMatrix s3;
  if (v == Variant::Standard) {
    const SymMatrix s2 = spd_inverse(s1, L);
    s3 = congruence_sandwich(s2, b, CongruenceMode::Forward, L);
    if (AlgorithmTrace* t = run.trace()) t->s2 = s2.dense();
  } else {
    s3 = congruence_sandwich(s1, b, CongruenceMode::Inverse, L);
  }
  const EigenDecomposition e = eig_sym(s3, L);
  const std::vector<double> fl = apply_function(f, e.lambda);
  const SymMatrix s4 = scaled_gram(e.q, fl, L);
  SymMatrix s5 = congruence_sandwich(s1, s4, CongruenceMode::Forward, L);
  if (AlgorithmTrace* t = run.trace()) {
    t->s1 = s1.dense();
    t->s3 = s3;
    t->s4 = s4;
    t->q = e.q;
  }
  return run.finish(std::move(s5), e.lambda);
}

PencilResult alg2_cholesky_schur(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                 const PencilOptions& opt) {
  require_pair(a, b);
  const Variant v = resolve_variant(Algorithm::CholSchur, opt.variant);
  Run run(Algorithm::CholSchur, v, opt.trace);
  FlopLedger* L = run.ledger();

  const TriangularFactor s1 = cholesky_of(a, "A", L).transposed();
  SymMatrix s3;
  if (v == Variant::Standard) {
    const TriangularFactor s2 = tri_inverse(s1, L);
    s3 = congruence_sandwich(s2, b, CongruenceMode::Forward, L);
    if (AlgorithmTrace* t = run.trace()) t->s2 = s2.dense();
  } else {
    s3 = congruence_sandwich(s1, b, CongruenceMode::Inverse, L);
  }
  const EigenDecomposition e = eig_sym(s3, L);
  const std::vector<double> fl = apply_function(f, e.lambda);
  SymMatrix s5;
  if (v == Variant::FastProduct) {
    const Matrix st = tri_multiply(s1, e.q, L);
    s5 = scaled_gram(st, fl, L);
  } else {
    const SymMatrix s4 = scaled_gram(e.q, fl, L);
    s5 = congruence_sandwich(s1, s4, CongruenceMode::Forward, L);
    if (AlgorithmTrace* t = run.trace()) t->s4 = s4;
  }
  if (AlgorithmTrace* t = run.trace()) {
    t->s1 = s1.dense();
    t->s3 = s3;
    t->q = e.q;
  }
  return run.finish(std::move(s5), e.lambda);
}

PencilResult alg3_cholesky_schur_pd(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f,
                                    const PencilOptions& opt) {
  require_pair(a, b);
  const Variant v = resolve_variant(Algorithm::CholSchurPd, opt.variant);
  Run run(Algorithm::CholSchurPd, v, opt.trace);
  FlopLedger* L = run.ledger();

  const TriangularFactor ra_t = cholesky_of(a, "A", L).transposed();
  const TriangularFactor rb_t = cholesky_of(b, "B", L).transposed();
  TriangularFactor s2;
  if (v == Variant::Standard) {
    const TriangularFactor s1 = tri_inverse(ra_t, L);
    s2 = tri_tri_multiply(s1, rb_t, L);
    if (AlgorithmTrace* t = run.trace()) t->s1 = s1.dense();
  } else {
    s2 = tri_tri_solve(ra_t, rb_t, L);
  }
  const SymMatrix s3 = tri_gram(s2, L);
  const EigenDecomposition e = eig_sym(s3, L);
  const std::vector<double> fl = apply_function(f, e.lambda);
  SymMatrix s5;
  if (v == Variant::Fast) {
    const Matrix st = tri_multiply(ra_t, e.q, L);
    s5 = scaled_gram(st, fl, L);
  } else {
    const SymMatrix s4 = scaled_gram(e.q, fl, L);
    s5 = congruence_sandwich(ra_t, s4, CongruenceMode::Forward, L);
    if (AlgorithmTrace* t = run.trace()) t->s4 = s4;
  }
  if (AlgorithmTrace* t = run.trace()) {
    t->s2 = s2.dense();
    t->s3 = s3;
    t->q = e.q;
  }
  return run.finish(std::move(s5), e.lambda);
}

PencilResult phi(const SymMatrix& a, const SymMatrix& b, const FunctionSpec& f, Algorithm algorithm,
                 const PencilOptions& opt) {
  switch (algorithm) {
    case Algorithm::Naive: return naive(a, b, f, opt);
    case Algorithm::SqrtSchur: return alg1_sqrt_schur(a, b, f, opt);
    case Algorithm::CholSchur: return alg2_cholesky_schur(a, b, f, opt);
    case Algorithm::CholSchurPd: return alg3_cholesky_schur_pd(a, b, f, opt);
  }
  throw Error(ErrorCode::BadParameter, "unknown algorithm");
}

}  // namespace pencilfun
