#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "functions.hpp"
#include "matrix.hpp"
#include "pencil.hpp"

namespace pencilfun {

// Random positive definite matrices Q diag(d) Q^T with d_i = v^i,
// v = (1/cnd)^{1/(n-1)}, and Q the orthogonal factor of an n x n matrix of
// uniform(0,1) draws.
struct GenSpec {
  std::size_t n = 0;
  double cnd = 1.0;
  std::uint64_t seed = 0;
  std::size_t count = 1;
};

// Uniform(0,1) stream used by the generators: mt19937_64 words mapped as
// (w >> 11) 2^-53.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }

 private:
  std::mt19937_64 engine_;
};

// Eigenvalue grid 1, v, v^2, ..., v^{n-1}. Throws BadParameter.
std::vector<double> geometric_spectrum(std::size_t n, double cnd);

// One matrix drawn from `rng`. cnd = 1 gives the identity exactly.
SymMatrix random_spd(std::size_t n, double cnd, UniformStream& rng);

// Matrix k uses the stream seeded with seed ^ k.
std::vector<SymMatrix> gen_spd(const GenSpec& spec);

// The (A, B) pair of one trial: both drawn, A first, from the stream seeded
// with seed ^ trial.
std::pair<SymMatrix, SymMatrix> gen_pair(std::size_t n, double cond_a, double cond_b, std::uint64_t seed,
                                         std::uint64_t trial);

struct ExperimentRecord {
  std::size_t n = 0;
  double cond_a = 1.0;
  double cond_b = 1.0;
  std::string function;
  std::string algorithm;
  std::string variant;
  std::size_t trials = 0;    // trials attempted
  std::size_t failures = 0;  // trials that raised an error (excluded from the mean)
  double mean_rel_err = 0.0;  // NaN when no trial succeeded or not measured
  double median_time_s = 0.0;
  double flops = 0.0;  // leading-order formula count
  double u_cond_phi = 0.0;  // NaN when not computed
};

struct AlgorithmChoice {
  Algorithm algorithm = Algorithm::CholSchur;
  Variant variant = Variant::Default;
};

std::vector<AlgorithmChoice> all_algorithms();

struct AccuracyConfig {
  std::vector<std::size_t> sizes;
  // (cond_A, cond_B) cells, swept for every size.
  std::vector<std::pair<double, double>> conds;
  FunctionSpec function = FunctionSpec::builtin("log");
  std::vector<AlgorithmChoice> algorithms = all_algorithms();
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  // u cond(phi; A, B) per cell; skipped (NaN) above the Kronecker size cap.
  bool with_cond = true;
};

// Named experiment shapes: fig1-left, fig1-right, fig2-left, fig2-right.
// Throws BadParameter for other names.
AccuracyConfig accuracy_preset(const std::string& name);

// Worker count from PENCILFUN_THREADS (unset, 0 or invalid: serial).
std::size_t worker_count();

std::vector<ExperimentRecord> accuracy_sweep(const AccuracyConfig& config);

struct BenchConfig {
  std::vector<std::size_t> sizes;
  double cond_a = 1e3;
  double cond_b = 10.0;
  FunctionSpec function = FunctionSpec::builtin("log");
  std::vector<AlgorithmChoice> algorithms = all_algorithms();
  std::size_t trials = 5;
  std::uint64_t seed = 1;
};

// Median wall time over `trials` runs after one discarded warm-up run. Always
// serial.
std::vector<ExperimentRecord> bench(const BenchConfig& config);

extern const char* const kCsvHeader;
void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);

}  // namespace pencilfun
