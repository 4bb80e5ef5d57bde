#include "pencilfun/pencilfun.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "conditioning.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "matrix_io.hpp"
#include "oracle.hpp"
#include "pencil.hpp"

using namespace pencilfun;

struct pf_matrix {
  SymMatrix m;
};

struct pf_function {
  FunctionSpec spec;
  std::string name;
};

struct pf_result {
  PencilResult r;
  pf_matrix s5;
  std::string algorithm;
  std::string variant;
};

struct pf_records {
  std::vector<ExperimentRecord> records;
};

namespace {

thread_local std::string last_error;
thread_local long last_index = -1;

pf_status set_error(pf_status s, const std::string& msg, long index = -1) {
  last_error = msg;
  last_index = index;
  return s;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
pf_status guarded(Body body) {
  try {
    last_error.clear();
    last_index = -1;
    body();
    return PF_OK;
  } catch (const Error& e) {
    return set_error(static_cast<pf_status>(static_cast<int>(e.code())), e.what(), e.index());
  } catch (const std::bad_alloc&) {
    return set_error(PF_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PF_INTERNAL_ERROR, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::BadParameter, std::string(what) + " must not be null");
}

std::vector<AlgorithmChoice> parse_algorithms(const char* list) {
  if (!list || !*list) return all_algorithms();
  std::vector<AlgorithmChoice> out;
  std::string s(list);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    if (item.empty()) throw Error(ErrorCode::BadParameter, "empty entry in algorithm list '" + s + "'");
    AlgorithmChoice c;
    const std::size_t colon = item.find(':');
    c.algorithm = parse_algorithm(item.substr(0, colon));
    if (colon != std::string::npos) c.variant = parse_variant(item.substr(colon + 1));
    resolve_variant(c.algorithm, c.variant);
    out.push_back(c);
    pos = comma + 1;
  }
  return out;
}

pf_matrix* wrap(SymMatrix m) { return new pf_matrix{std::move(m)}; }

}  // namespace

extern "C" {

const char* pf_last_error(void) { return last_error.c_str(); }
long pf_last_error_index(void) { return last_index; }

const char* pf_status_name(pf_status status) {
  if (status == PF_OK) return "OK";
  if (status == PF_INTERNAL_ERROR) return "InternalError";
  if (status >= PF_NOT_POSITIVE_DEFINITE && status <= PF_OVERFLOW)
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status)));
  return "Unknown";
}

int pf_status_is_numerical(pf_status status) {
  switch (status) {
    case PF_NOT_POSITIVE_DEFINITE:
    case PF_NO_CONVERGENCE:
    case PF_SINGULAR_FACTOR:
    case PF_DOMAIN_ERROR:
    case PF_OVERFLOW:
      return 1;
    default:
      return 0;
  }
}

pf_status pf_matrix_from_array(size_t n, const double* values, pf_matrix** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    if (n == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
    Matrix m(n, n);
    std::copy(values, values + n * n, m.data());
    *out = wrap(SymMatrix::from_exact(m));
  });
}

pf_status pf_matrix_identity(size_t n, pf_matrix** out) {
  return guarded([&] {
    require(out, "out");
    if (n == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
    *out = wrap(SymMatrix::identity(n));
  });
}

size_t pf_matrix_dim(const pf_matrix* m) { return m ? m->m.n() : 0; }

double pf_matrix_get(const pf_matrix* m, size_t i, size_t j) {
  if (!m || i >= m->m.n() || j >= m->m.n()) return std::nan("");
  return m->m(i, j);
}

void pf_matrix_copy_to(const pf_matrix* m, double* values) {
  if (!m || !values) return;
  std::copy(m->m.data(), m->m.data() + m->m.n() * m->m.n(), values);
}

pf_status pf_matrix_read(const char* path, pf_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(read_matrix_market(std::string(path)));
  });
}

pf_status pf_matrix_write(const pf_matrix* m, const char* path) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    if (std::string(path) == "-") {
      write_matrix_market(std::cout, m->m);
      std::cout.flush();
      return;
    }
    write_matrix_market(std::string(path), m->m);
  });
}

void pf_matrix_free(pf_matrix* m) { delete m; }

pf_status pf_gen_spd(size_t n, double cnd, uint64_t seed, pf_matrix** out) {
  return guarded([&] {
    require(out, "out");
    UniformStream rng(seed);
    *out = wrap(random_spd(n, cnd, rng));
  });
}

pf_status pf_gen_pair(size_t n, double cond_a, double cond_b, uint64_t seed, uint64_t trial, pf_matrix** a,
                      pf_matrix** b) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    auto [ma, mb] = gen_pair(n, cond_a, cond_b, seed, trial);
    *a = wrap(std::move(ma));
    *b = wrap(std::move(mb));
  });
}

pf_status pf_function_parse(const char* text, pf_function** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    FunctionSpec f = FunctionSpec::parse(text);
    *out = new pf_function{f, f.name()};
  });
}

const char* pf_function_name(const pf_function* f) { return f ? f->name.c_str() : ""; }

pf_status pf_function_dual(const pf_function* f, pf_function** out) {
  return guarded([&] {
    require(f, "function");
    require(out, "out");
    FunctionSpec d = f->spec.dual();
    *out = new pf_function{d, d.name()};
  });
}

pf_status pf_function_eval(const pf_function* f, double x, double* value) {
  return guarded([&] {
    require(f, "function");
    require(value, "value");
    f->spec.require_in_domain(std::vector<double>{x});
    *value = f->spec.eval(x);
  });
}

pf_status pf_function_divided_difference(const pf_function* f, double x, double y, double* value) {
  return guarded([&] {
    require(f, "function");
    require(value, "value");
    *value = f->spec.divided_difference(x, y);
  });
}

void pf_function_free(pf_function* f) { delete f; }

pf_status pf_compute(const pf_matrix* a, const pf_matrix* b, const pf_function* f, const char* algorithm,
                     const char* variant, pf_result** out) {
  return guarded([&] {
    require(a, "A");
    require(b, "B");
    require(f, "function");
    require(algorithm, "algorithm");
    require(out, "out");
    PencilOptions opt;
    opt.variant = variant ? parse_variant(variant) : Variant::Default;
    auto res = std::make_unique<pf_result>();
    res->r = phi(a->m, b->m, f->spec, parse_algorithm(algorithm), opt);
    res->s5.m = res->r.s5;
    res->algorithm = algorithm_name(res->r.algorithm);
    res->variant = variant_name(res->r.variant);
    *out = res.release();
  });
}

const pf_matrix* pf_result_matrix(const pf_result* r) { return r ? &r->s5 : nullptr; }
double pf_result_wall_time(const pf_result* r) { return r ? r->r.wall_time : 0.0; }
double pf_result_flops(const pf_result* r) { return r ? r->r.flops.formula : 0.0; }
uint64_t pf_result_flops_exact(const pf_result* r) { return r ? r->r.flops.exact.total() : 0; }
const char* pf_result_algorithm(const pf_result* r) { return r ? r->algorithm.c_str() : ""; }
const char* pf_result_variant(const pf_result* r) { return r ? r->variant.c_str() : ""; }
size_t pf_result_warning_count(const pf_result* r) { return r ? r->r.warnings.size() : 0; }
const char* pf_result_warning(const pf_result* r, size_t i) {
  return r && i < r->r.warnings.size() ? r->r.warnings[i].c_str() : nullptr;
}
void pf_result_free(pf_result* r) { delete r; }

pf_status pf_reference_error(const pf_matrix* a, const pf_matrix* b, const pf_function* f,
                             const pf_matrix* computed, double* rel_err) {
  return guarded([&] {
    require(a, "A");
    require(b, "B");
    require(f, "function");
    require(computed, "computed");
    require(rel_err, "rel_err");
    *rel_err = relative_error(computed->m, reference_phi(a->m, b->m, f->spec));
  });
}

pf_status pf_cond(const pf_matrix* a, const pf_matrix* b, const pf_function* f, size_t size_cap,
                  pf_condition_report* out) {
  return guarded([&] {
    require(a, "A");
    require(b, "B");
    require(f, "function");
    require(out, "out");
    const ConditionReport r = cond_phi(a->m, b->m, f->spec, size_cap ? size_cap : kDefaultSizeCap);
    *out = {r.cond_phi, r.dphi_norm, r.phi_norm, r.bound_lemma3, r.bound_eq14, r.mu_a, r.mu_b, r.psi_ra};
  });
}

pf_status pf_accuracy_preset(const char* preset, const char* algorithms, size_t trials, uint64_t seed,
                             pf_records** out) {
  return guarded([&] {
    require(preset, "preset");
    require(out, "out");
    AccuracyConfig c = accuracy_preset(preset);
    c.algorithms = parse_algorithms(algorithms);
    c.trials = trials;
    c.seed = seed;
    *out = new pf_records{accuracy_sweep(c)};
  });
}

pf_status pf_accuracy(const size_t* sizes, size_t nsizes, const double* cond_a, const double* cond_b,
                      size_t nconds, const pf_function* f, const char* algorithms, size_t trials, uint64_t seed,
                      int with_cond, pf_records** out) {
  return guarded([&] {
    require(sizes, "sizes");
    require(cond_a, "cond_a");
    require(cond_b, "cond_b");
    require(f, "function");
    require(out, "out");
    AccuracyConfig c;
    c.sizes.assign(sizes, sizes + nsizes);
    for (size_t k = 0; k < nconds; ++k) c.conds.emplace_back(cond_a[k], cond_b[k]);
    c.function = f->spec;
    c.algorithms = parse_algorithms(algorithms);
    c.trials = trials;
    c.seed = seed;
    c.with_cond = with_cond != 0;
    *out = new pf_records{accuracy_sweep(c)};
  });
}

pf_status pf_bench(const size_t* sizes, size_t nsizes, double cond_a, double cond_b, const pf_function* f,
                   const char* algorithms, size_t trials, uint64_t seed, pf_records** out) {
  return guarded([&] {
    require(sizes, "sizes");
    require(f, "function");
    require(out, "out");
    BenchConfig c;
    c.sizes.assign(sizes, sizes + nsizes);
    c.cond_a = cond_a;
    c.cond_b = cond_b;
    c.function = f->spec;
    c.algorithms = parse_algorithms(algorithms);
    c.trials = trials;
    c.seed = seed;
    *out = new pf_records{bench(c)};
  });
}

size_t pf_records_count(const pf_records* r) { return r ? r->records.size() : 0; }

pf_status pf_records_get(const pf_records* r, size_t i, pf_record* out) {
  return guarded([&] {
    require(r, "records");
    require(out, "out");
    if (i >= r->records.size()) throw Error(ErrorCode::BadParameter, "record index out of range");
    const ExperimentRecord& e = r->records[i];
    *out = {e.n, e.cond_a, e.cond_b, e.function.c_str(), e.algorithm.c_str(), e.variant.c_str(),
            e.trials, e.failures, e.mean_rel_err, e.median_time_s, e.flops, e.u_cond_phi};
  });
}

pf_status pf_records_write_csv(const pf_records* r, const char* path) {
  return guarded([&] {
    require(r, "records");
    if (!path || std::string(path) == "-") {
      write_csv(std::cout, r->records);
      std::cout.flush();
      return;
    }
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, std::string("cannot open '") + path + "' for writing");
    write_csv(f, r->records);
    f.flush();
    if (!f) throw Error(ErrorCode::IoError, std::string("write to '") + path + "' failed");
  });
}

void pf_records_free(pf_records* r) { delete r; }

}  // extern "C"
