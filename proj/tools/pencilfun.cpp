// Command-line front end over the C interface.
//
// Exit codes: 0 success, 1 input error (usage, files, parameters),
// 2 numerical failure.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pencilfun/pencilfun.h"

namespace {

constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

struct MatrixDeleter {
  void operator()(pf_matrix* m) const { pf_matrix_free(m); }
};
struct FunctionDeleter {
  void operator()(pf_function* f) const { pf_function_free(f); }
};
struct ResultDeleter {
  void operator()(pf_result* r) const { pf_result_free(r); }
};
struct RecordsDeleter {
  void operator()(pf_records* r) const { pf_records_free(r); }
};
using MatrixPtr = std::unique_ptr<pf_matrix, MatrixDeleter>;
using FunctionPtr = std::unique_ptr<pf_function, FunctionDeleter>;
using ResultPtr = std::unique_ptr<pf_result, ResultDeleter>;
using RecordsPtr = std::unique_ptr<pf_records, RecordsDeleter>;

// Thrown to unwind with a library status.
struct Failure {
  pf_status status;
};

void check(pf_status s, const std::string& context) {
  if (s == PF_OK) return;
  std::fprintf(stderr, "error: %s: %s (%s)\n", context.c_str(), pf_last_error(), pf_status_name(s));
  throw Failure{s};
}

MatrixPtr read_matrix(const std::string& path) {
  pf_matrix* m = nullptr;
  check(pf_matrix_read(path.c_str(), &m), "reading " + path);
  return MatrixPtr(m);
}

FunctionPtr parse_function(const std::string& text) {
  pf_function* f = nullptr;
  check(pf_function_parse(text.c_str(), &f), "function '" + text + "'");
  return FunctionPtr(f);
}

void report_failures(const pf_records* recs) {
  const size_t count = pf_records_count(recs);
  for (size_t i = 0; i < count; ++i) {
    pf_record r;
    check(pf_records_get(recs, i, &r), "records");
    if (r.failures)
      std::fprintf(stderr, "note: n=%zu cond_A=%g cond_B=%g %s: %zu of %zu trials failed\n", r.n, r.cond_a,
                   r.cond_b, r.algorithm, r.failures, r.trials);
  }
}

std::string numbered(const std::string& path, size_t k) {
  const size_t dot = path.find_last_of('.');
  const size_t slash = path.find_last_of('/');
  const std::string tag = "_" + std::to_string(k);
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
  return path.substr(0, dot) + tag + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"A f(A^{-1} B) for symmetric positive definite pencils"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 1;
  size_t trials = 0;
  std::string csv = "-";
  app.add_option("--seed", seed, "base random seed");
  app.add_option("--trials", trials, "trials per cell (accuracy: 20, bench: 5)");
  app.add_option("--csv", csv, "CSV output path (- for stdout)");

  // compute
  auto* compute = app.add_subcommand("compute", "evaluate A f(A^{-1} B) for matrices in Matrix Market files");
  std::string a_path, b_path, out_path = "-", function = "log", algorithm = "chol_schur", variant = "default";
  compute->add_option("-A", a_path, "file holding A")->required();
  compute->add_option("-B", b_path, "file holding B")->required();
  compute->add_option("--function,-f", function, "scalar function, e.g. log, power:t=0.3, dual(exp)");
  compute->add_option("--algorithm", algorithm, "naive, sqrt_schur, chol_schur, chol_schur_pd (or alg1..alg3)");
  compute->add_option("--variant", variant, "default, standard, fast, fast_solve, fast_product");
  compute->add_option("-o", out_path, "output file (- for stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "write random positive definite matrices with a given condition number");
  size_t gen_n = 0, gen_count = 1;
  double gen_cond = 1.0;
  std::string gen_out = "-";
  gen->add_option("-n", gen_n, "dimension")->required();
  gen->add_option("--cond", gen_cond, "2-norm condition number");
  gen->add_option("--count", gen_count, "number of matrices (files get a _k suffix)");
  gen->add_option("-o", gen_out, "output file (- for stdout)");

  // accuracy
  auto* accuracy = app.add_subcommand("accuracy", "forward error against the double-double reference");
  std::string preset, algorithms;
  std::vector<size_t> sizes;
  std::vector<double> cond_a, cond_b;
  bool no_cond = false;
  accuracy->add_option("--preset", preset, "fig1-left, fig1-right, fig2-left, fig2-right");
  accuracy->add_option("-n", sizes, "sizes")->delimiter(',');
  accuracy->add_option("--cond-a", cond_a, "condition numbers of A")->delimiter(',');
  accuracy->add_option("--cond-b", cond_b, "condition numbers of B (one value or one per --cond-a)")->delimiter(',');
  accuracy->add_option("--function,-f", function, "scalar function");
  accuracy->add_option("--algorithms", algorithms, "comma list, e.g. naive,alg1,alg2:standard,alg3");
  accuracy->add_flag("--no-cond", no_cond, "skip u cond(phi)");

  // bench
  auto* benchmark = app.add_subcommand("bench", "median wall time after a discarded warm-up run");
  std::vector<size_t> bench_sizes;
  double bench_cond_a = 1e3, bench_cond_b = 10.0;
  benchmark->add_option("-n", bench_sizes, "sizes")->delimiter(',')->required();
  benchmark->add_option("--cond-a", bench_cond_a, "condition number of A");
  benchmark->add_option("--cond-b", bench_cond_b, "condition number of B");
  benchmark->add_option("--function,-f", function, "scalar function");
  benchmark->add_option("--algorithms", algorithms, "comma list of algorithms");

  // cond
  auto* cond = app.add_subcommand("cond", "condition number, derivative norm bounds and psi(R_A)");
  size_t cond_n = 0, size_cap = 0;
  double cond_cond_a = 10.0, cond_cond_b = 10.0;
  cond->add_option("-A", a_path, "file holding A");
  cond->add_option("-B", b_path, "file holding B");
  cond->add_option("-n", cond_n, "generate a random pair of this size instead of reading files");
  cond->add_option("--cond-a", cond_cond_a, "condition number of the generated A");
  cond->add_option("--cond-b", cond_cond_b, "condition number of the generated B");
  cond->add_option("--function,-f", function, "scalar function");
  cond->add_option("--size-cap", size_cap, "largest n for the Kronecker forms (default 32)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return kInputError;
  }

  try {
    if (*compute) {
      const MatrixPtr a = read_matrix(a_path);
      const MatrixPtr b = read_matrix(b_path);
      const FunctionPtr f = parse_function(function);
      pf_result* raw = nullptr;
      check(pf_compute(a.get(), b.get(), f.get(), algorithm.c_str(), variant.c_str(), &raw), "compute");
      const ResultPtr r(raw);
      for (size_t i = 0; i < pf_result_warning_count(r.get()); ++i)
        std::fprintf(stderr, "warning: %s\n", pf_result_warning(r.get(), i));
      check(pf_matrix_write(pf_result_matrix(r.get()), out_path.c_str()), "writing " + out_path);
      std::fprintf(stderr, "%s/%s: %.6e s, %.6e flops\n", pf_result_algorithm(r.get()), pf_result_variant(r.get()),
                   pf_result_wall_time(r.get()), pf_result_flops(r.get()));
    } else if (*gen) {
      if (gen_count > 1 && gen_out == "-") {
        std::fprintf(stderr, "error: --count > 1 needs an output file name\n");
        return kInputError;
      }
      for (size_t k = 0; k < gen_count; ++k) {
        pf_matrix* raw = nullptr;
        check(pf_gen_spd(gen_n, gen_cond, seed ^ static_cast<uint64_t>(k), &raw), "gen");
        const MatrixPtr m(raw);
        const std::string path = gen_count > 1 ? numbered(gen_out, k) : gen_out;
        check(pf_matrix_write(m.get(), path.c_str()), "writing " + path);
      }
    } else if (*accuracy) {
      const size_t t = trials ? trials : 20;
      const char* algs = algorithms.empty() ? nullptr : algorithms.c_str();
      pf_records* raw = nullptr;
      if (!preset.empty()) {
        check(pf_accuracy_preset(preset.c_str(), algs, t, seed, &raw), "accuracy");
      } else {
        if (sizes.empty() || cond_a.empty()) {
          std::fprintf(stderr, "error: accuracy needs --preset or both -n and --cond-a\n");
          return kInputError;
        }
        if (cond_b.empty()) cond_b = {10.0};
        if (cond_b.size() == 1) cond_b.assign(cond_a.size(), cond_b[0]);
        if (cond_b.size() != cond_a.size()) {
          std::fprintf(stderr, "error: --cond-b needs one value or one per --cond-a value\n");
          return kInputError;
        }
        const FunctionPtr f = parse_function(function);
        check(pf_accuracy(sizes.data(), sizes.size(), cond_a.data(), cond_b.data(), cond_a.size(), f.get(), algs, t,
                          seed, no_cond ? 0 : 1, &raw),
              "accuracy");
      }
      const RecordsPtr recs(raw);
      check(pf_records_write_csv(recs.get(), csv.c_str()), "writing CSV");
      report_failures(recs.get());
    } else if (*benchmark) {
      const size_t t = trials ? trials : 5;
      const FunctionPtr f = parse_function(function);
      pf_records* raw = nullptr;
      check(pf_bench(bench_sizes.data(), bench_sizes.size(), bench_cond_a, bench_cond_b, f.get(),
                     algorithms.empty() ? nullptr : algorithms.c_str(), t, seed, &raw),
            "bench");
      const RecordsPtr recs(raw);
      check(pf_records_write_csv(recs.get(), csv.c_str()), "writing CSV");
      report_failures(recs.get());
    } else if (*cond) {
      MatrixPtr a, b;
      if (cond_n > 0) {
        pf_matrix *ra = nullptr, *rb = nullptr;
        check(pf_gen_pair(cond_n, cond_cond_a, cond_cond_b, seed, 0, &ra, &rb), "gen");
        a.reset(ra);
        b.reset(rb);
      } else {
        if (a_path.empty() || b_path.empty()) {
          std::fprintf(stderr, "error: cond needs -A and -B files or -n\n");
          return kInputError;
        }
        a = read_matrix(a_path);
        b = read_matrix(b_path);
      }
      const FunctionPtr f = parse_function(function);
      pf_condition_report rep;
      check(pf_cond(a.get(), b.get(), f.get(), size_cap, &rep), "cond");
      std::printf("cond=%.17g\ndphi_norm=%.17g\nphi_norm=%.17g\nbound_lemma3=%.17g\nbound_eq14=%.17g\n"
                  "mu_A=%.17g\nmu_B=%.17g\npsi_RA=%.17g\n",
                  rep.cond_phi, rep.dphi_norm, rep.phi_norm, rep.bound_lemma3, rep.bound_eq14, rep.mu_a, rep.mu_b,
                  rep.psi_ra);
    }
  } catch (const Failure& f) {
    return pf_status_is_numerical(f.status) ? kNumericalError : kInputError;
  }
  return 0;
}
