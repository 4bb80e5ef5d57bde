// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "conditioning.hpp"
#include "harness.hpp"
#include "linalg.hpp"
#include "oracle.hpp"
#include "pencil.hpp"

using namespace pencilfun;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

SymMatrix lin(double a, const SymMatrix& x, double b, const SymMatrix& y) {
  return SymMatrix::symmetrize(a * x.dense() + b * y.dense());
}

SymMatrix random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) m(i, j) = m(j, i) = g(rng);
  return SymMatrix::from_exact(m);
}

// Q1 diag(s) Q2^T with singular values geometric in [1/cnd, 1].
Matrix random_nonsingular(std::size_t n, double cnd, UniformStream& rng) {
  const std::vector<double> s = geometric_spectrum(n, cnd);
  Matrix x1(n, n), x2(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      x1(i, j) = rng.next();
      x2(i, j) = rng.next();
    }
  Matrix q1 = qr_orthogonal_factor(x1);
  const Matrix q2 = qr_orthogonal_factor(x2);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) q1(i, j) *= s[j];
  return multiply(q1, q2.transposed());
}

SymMatrix congruence(const Matrix& p, const SymMatrix& x) {
  return SymMatrix::symmetrize(multiply(multiply(p, x.dense()), p.transposed()));
}

// Structured algorithms held to the property tolerances.
const std::vector<Algorithm> kStructured{Algorithm::SqrtSchur, Algorithm::CholSchur, Algorithm::CholSchurPd};

Verdict criterion1() {
  const auto t0 = Clock::now();
  const FunctionSpec id = FunctionSpec::builtin("identity");
  const FunctionSpec one = FunctionSpec::builtin("constant_one");
  const FunctionSpec lg = FunctionSpec::builtin("log");
  const FunctionSpec pw = FunctionSpec::builtin("power", {{"t", 0.3}});
  const FunctionSpec sq = FunctionSpec::builtin("sqrt");
  std::map<std::string, double> worst;
  std::map<std::string, double> limit{{"identity", 5e-14}, {"duality", 1e-11}, {"congruence", 1e-10},
                                      {"homogeneity", 1e-13}, {"geomean", 1e-11}};
  const auto note = [&](const std::string& k, double v) { worst[k] = std::max(worst[k], v); };

  for (std::size_t n : {4, 10, 30}) {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
      for (Algorithm alg : kStructured) {
        {
          const auto [a, b] = gen_pair(n, 1e3, 1e3, 101, trial);
          note("identity", relative_difference(phi(a, b, id, alg).s5, b));
          note("identity", relative_difference(phi(a, b, one, alg).s5, a));
        }
        {
          const auto [a, b] = gen_pair(n, 1e4, 1e4, 202, trial);
          for (const FunctionSpec& f : {lg, pw}) {
            const SymMatrix fwd = phi(a, b, f, alg).s5;
            note("duality", relative_difference(phi(b, a, f.dual(), alg).s5, fwd));
          }
        }
        {
          const auto [a, b] = gen_pair(n, 100.0, 100.0, 303, trial);
          UniformStream rng(404 ^ trial);
          const Matrix p = random_nonsingular(n, 10.0, rng);
          const double cond_p = 10.0;
          const SymMatrix base = phi(a, b, lg, alg).s5;
          const SymMatrix moved = phi(congruence(p, a), congruence(p, b), lg, alg).s5;
          note("congruence", frobenius_norm(congruence(p, base).dense() - moved.dense()) / frobenius_norm(base) /
                                 (cond_p * cond_p));
          for (double alpha : {2.0, 1.0 / 3.0, 1e5}) {
            const SymMatrix scaled = phi(a.scaled(alpha), b.scaled(alpha), lg, alg).s5;
            note("homogeneity", relative_difference(scaled, base.scaled(alpha)));
          }
          note("geomean", relative_difference(phi(b, a, sq, alg).s5, phi(a, b, sq, alg).s5));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  for (const auto& [k, w] : worst) {
    v.pass = v.pass && w <= limit[k];
    v.detail += k + "=" + fmt("%.2e", w) + " ";
  }
  v.pass = v.pass && secs < 30.0;
  v.detail += fmt("(%.1f s)", secs);
  return v;
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  double kron_worst = 0.0, fd_worst = 0.0;
  for (const FunctionSpec& f :
       {FunctionSpec::builtin("log"), FunctionSpec::builtin("sqrt"), FunctionSpec::builtin("power", {{"t", 0.3}})}) {
    for (std::size_t n : {1, 2, 4, 6, 8}) {
      const auto [a, b] = gen_pair(n, n > 1 ? 100.0 : 1.0, n > 1 ? 10.0 : 1.0, 22, n);
      const KroneckerDerivative k = kronecker_forms(a, b, f);
      const double dnorm = kronecker_norm(k);
      for (int t = 0; t < 20; ++t) {
        const SymMatrix h = random_symmetric(n, rng);
        const SymMatrix l = random_symmetric(n, rng);
        const Matrix direct = frechet_apply({a, b, h, l, f});
        Matrix vh(n * n, 1), vl(n * n, 1);
        for (std::size_t i = 0; i < n * n; ++i) {
          vh(i, 0) = h.data()[i];
          vl(i, 0) = l.data()[i];
        }
        const Matrix kv = multiply(k.m2, vh) + multiply(k.m1, vl);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n * n; ++i) d2 += std::pow(direct.data()[i] - kv(i, 0), 2);
        kron_worst = std::max(kron_worst, std::sqrt(d2) / ((frobenius_norm(h) + frobenius_norm(l)) * dnorm));

        if (t < 5) {
          const double step = 1e-6 * norms(a).two / std::hypot(frobenius_norm(h), frobenius_norm(l));
          const SymMatrix p = alg2_cholesky_schur(lin(1, a, step, h), lin(1, b, step, l), f).s5;
          const SymMatrix m = alg2_cholesky_schur(lin(1, a, -step, h), lin(1, b, -step, l), f).s5;
          const Matrix fd = (1.0 / (2 * step)) * (p.dense() - m.dense());
          fd_worst = std::max(fd_worst, relative_difference(direct, fd));
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {kron_worst <= 1e-9 && fd_worst <= 1e-5 && secs < 60.0,
          fmt("kronecker=%.2e (limit 1e-9) central-difference=%.2e (limit 1e-5) (%.1f s)", kron_worst, fd_worst, secs)};
}

Verdict criterion3() {
  const std::vector<FunctionSpec> fs{FunctionSpec::builtin("log"), FunctionSpec::builtin("sqrt"),
                                     FunctionSpec::builtin("power", {{"t", 0.3}})};
  int violations = 0, instances = 0;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    const std::size_t n = 1 + k % 10;
    const double ca = n > 1 ? std::pow(10.0, static_cast<double>(k % 7)) : 1.0;
    const double cb = n > 1 ? std::pow(10.0, static_cast<double>((k / 7) % 7)) : 1.0;
    const auto [a, b] = gen_pair(n, ca, cb, 333, k);
    const ConditionReport r = cond_phi(a, b, fs[k % 3]);
    ++instances;
    const double ratio = std::max(r.dphi_norm / r.bound_lemma3, r.dphi_norm / r.bound_eq14);
    worst = std::max(worst, ratio);
    if (r.dphi_norm > r.bound_lemma3 * (1 + 1e-8) || r.dphi_norm > r.bound_eq14 * (1 + 1e-8)) ++violations;
  }
  return {violations == 0, fmt("%.0f instances, %.0f violations, max ||D phi|| / bound = %.3f", instances,
                               violations, worst)};
}

Verdict criterion4() {
  const auto t0 = Clock::now();
  AccuracyConfig c;
  c.sizes = {10};
  for (int i = 0; i <= 12; ++i) c.conds.emplace_back(std::pow(10.0, i), 10.0);
  c.trials = 20;
  c.seed = 1;
  c.function = FunctionSpec::builtin("log");
  const std::vector<ExperimentRecord> recs = accuracy_sweep(c);
  std::map<std::pair<double, std::string>, const ExperimentRecord*> cell;
  for (const ExperimentRecord& r : recs) cell[{r.cond_a, r.algorithm}] = &r;
  Verdict v;
  double worst_factor = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double ca = std::pow(10.0, i);
    for (const char* alg : {"chol_schur", "chol_schur_pd"}) {
      const ExperimentRecord& r = *cell.at({ca, alg});
      const double factor = std::max(r.mean_rel_err / r.u_cond_phi, r.u_cond_phi / r.mean_rel_err);
      worst_factor = std::max(worst_factor, factor);
      if (!(factor <= 100.0) || r.failures) v.pass = false;
    }
  }
  const double e2 = cell.at({1e12, "chol_schur"})->mean_rel_err;
  const double e1 = cell.at({1e12, "sqrt_schur"})->mean_rel_err;
  const double en = cell.at({1e12, "naive"})->mean_rel_err;
  v.pass = v.pass && e1 >= 10 * e2 && en >= 10 * e2;
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 300.0;
  v.detail = fmt("worst err/(u cond) factor %.1f (limit 100); at cond(A)=1e12 alg1/alg2 = %.1f, naive/alg2 = %.1f",
                 worst_factor, e1 / e2, en / e2) +
             fmt(" (%.1f s)", secs);
  return v;
}

Verdict criterion5() {
  const auto t0 = Clock::now();
  AccuracyConfig c;
  c.sizes = {10, 50, 100};
  c.conds = {{1e7, 10.0}};
  c.trials = 20;
  c.seed = 1;
  c.function = FunctionSpec::builtin("log");
  c.with_cond = false;
  const std::vector<ExperimentRecord> recs = accuracy_sweep(c);
  std::map<std::pair<std::size_t, std::string>, double> err;
  bool failures = false;
  for (const ExperimentRecord& r : recs) {
    err[{r.n, r.algorithm}] = r.mean_rel_err;
    failures = failures || r.failures;
  }
  Verdict v;
  v.pass = !failures;
  for (std::size_t n : c.sizes) {
    const double e2 = err[{n, "chol_schur"}], e3 = err[{n, "chol_schur_pd"}];
    const double e1 = err[{n, "sqrt_schur"}], en = err[{n, "naive"}];
    const bool ok = std::max(e2, e3) <= 2 * std::min(e2, e3) && std::max(e2, e3) < std::min(e1, en);
    v.pass = v.pass && ok;
    v.detail += fmt("n=%.0f: alg2 %.1e alg3 %.1e alg1 %.1e", static_cast<double>(n), e2, e3, e1) +
                fmt(" naive %.1e; ", en);
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 600.0;
  v.detail += fmt("(%.1f s)", secs);
  return v;
}

Verdict criterion6() {
  const std::size_t n = 512;
  const double n3 = std::pow(static_cast<double>(n), 3);
  const auto [a, b] = gen_pair(n, 10.0, 10.0, 6, 0);
  const FunctionSpec lg = FunctionSpec::builtin("log");
  const double f1 = phi(a, b, lg, Algorithm::SqrtSchur).flops.formula / n3;
  const double f2 = phi(a, b, lg, Algorithm::CholSchur).flops.formula / n3;
  const double f3 = phi(a, b, lg, Algorithm::CholSchurPd).flops.formula / n3;
  const bool pass = f1 >= 24.3 && f1 <= 29.7 && f2 >= 11.7 && f2 <= 14.3 && f3 >= 11.1 && f3 <= 13.6;
  return {pass, fmt("alg1 %.3f n^3, alg2 %.3f n^3, alg3 %.3f n^3", f1, f2, f3)};
}

Verdict criterion7() {
  const auto t0 = Clock::now();
  BenchConfig c;
  c.sizes = {1000};
  c.trials = 5;
  c.function = FunctionSpec::builtin("log");
  const std::vector<ExperimentRecord> recs = bench(c);
  std::map<std::string, double> t;
  for (const ExperimentRecord& r : recs) t[r.algorithm] = r.median_time_s;
  const double t1 = t["sqrt_schur"], t2 = t["chol_schur"], t3 = t["chol_schur_pd"], tn = t["naive"];
  const bool close = std::max(t2, t3) <= 1.15 * std::min(t2, t3);
  const bool pass = close && t2 <= t1 && t3 <= t1 && t1 <= 1.2 * tn;
  const double secs = seconds_since(t0);
  return {pass && secs < 300.0,
          fmt("median s: alg3 %.3f alg2 %.3f alg1 %.3f naive %.3f", t3, t2, t1, tn) + fmt(" (%.1f s)", secs)};
}

Verdict criterion8() {
  double worst = 0.0;
  const FunctionSpec lg = FunctionSpec::builtin("log");
  for (std::uint64_t trial = 0; trial < 5; ++trial) {
    const auto [a, b] = gen_pair(10, 10.0, 10.0, 1, trial);
    worst = std::max(worst, relative_error(alg3_cholesky_schur_pd(a, b, lg).s5, reference_phi(a, b, lg)));
  }
  return {worst <= 1e-13, fmt("max alg3 error %.2e over 5 pairs (limit 1e-13)", worst)};
}

Verdict criterion9() {
  bool pass = true;
  for (std::size_t n = 1; n <= 50; ++n) pass = pass && psi(TriangularFactor(Matrix::identity(n))) == std::sqrt(double(n));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 50; ++n) {
    Matrix m(n, n);
    std::vector<double> off(n - 1);
    for (double& o : off) o = -u(rng);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      if (i > 0) s -= off[i - 1];
      if (i + 1 < n) s -= off[i];
      m(i, i) = s + 0.01 + u(rng);
      if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = off[i];
    }
    const double v = psi(cholesky(SymMatrix::from_exact(m)));
    worst = std::max(worst, v / std::sqrt(static_cast<double>(n)));
    pass = pass && v <= std::sqrt(static_cast<double>(n));
  }
  return {pass, fmt("psi(I) = sqrt(n) for n <= 50; max psi/sqrt(n) on M-matrices %.4f", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"identity/property suite", criterion1},
      {"Frechet/Kronecker consistency", criterion2},
      {"bound validity", criterion3},
      {"error vs cond(A) trend", criterion4},
      {"error vs n trend", criterion5},
      {"flop accounting", criterion6},
      {"timing ordering", criterion7},
      {"oracle floor", criterion8},
      {"psi diagnostic", criterion9},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed ? 1 : 0;
}
