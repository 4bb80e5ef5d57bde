#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>
#include <tuple>

#include "conditioning.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "oracle.hpp"

namespace pencilfun {

namespace {

constexpr double kUnitRoundoff = 0x1p-53;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count) on up to `workers` threads.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ExperimentRecord blank_record(std::size_t n, double ca, double cb, const FunctionSpec& f, const AlgorithmChoice& c) {
  ExperimentRecord r;
  r.n = n;
  r.cond_a = ca;
  r.cond_b = cb;
  r.function = f.name();
  r.algorithm = algorithm_name(c.algorithm);
  r.variant = variant_name(resolve_variant(c.algorithm, c.variant));
  return r;
}

struct TrialResult {
  std::vector<double> err;
  std::vector<double> time;
  std::vector<double> flops;
  std::vector<bool> ok;
  double u_cond = kNaN;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::vector<double> geometric_spectrum(std::size_t n, double cnd) {
  if (n == 0) throw Error(ErrorCode::BadParameter, "n must be positive");
  if (!(cnd >= 1.0) || !std::isfinite(cnd)) throw Error(ErrorCode::BadParameter, "cnd must be a finite number >= 1", -1, {cnd});
  if (n == 1 && cnd > 1.0) throw Error(ErrorCode::BadParameter, "n must be at least 2 when cnd > 1");
  std::vector<double> d(n, 1.0);
  for (std::size_t i = 1; i < n; ++i)
    d[i] = std::pow(1.0 / cnd, static_cast<double>(i) / static_cast<double>(n - 1));
  return d;
}

SymMatrix random_spd(std::size_t n, double cnd, UniformStream& rng) {
  const std::vector<double> d = geometric_spectrum(n, cnd);
  Matrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) x(i, j) = rng.next();
  // Q I Q^T is I; return it exactly rather than with rounding noise. The
  // draws above are still consumed so later matrices see the same stream.
  if (cnd == 1.0) return SymMatrix::identity(n);
  return scaled_gram(qr_orthogonal_factor(x), d);
}

std::vector<SymMatrix> gen_spd(const GenSpec& spec) {
  std::vector<SymMatrix> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) {
    UniformStream rng(spec.seed ^ static_cast<std::uint64_t>(k));
    out.push_back(random_spd(spec.n, spec.cnd, rng));
  }
  return out;
}

std::pair<SymMatrix, SymMatrix> gen_pair(std::size_t n, double cond_a, double cond_b, std::uint64_t seed,
                                         std::uint64_t trial) {
  UniformStream rng(seed ^ trial);
  SymMatrix a = random_spd(n, cond_a, rng);
  SymMatrix b = random_spd(n, cond_b, rng);
  return {std::move(a), std::move(b)};
}

std::vector<AlgorithmChoice> all_algorithms() {
  return {{Algorithm::Naive, Variant::Default},
          {Algorithm::SqrtSchur, Variant::Default},
          {Algorithm::CholSchur, Variant::Default},
          {Algorithm::CholSchurPd, Variant::Default}};
}

AccuracyConfig accuracy_preset(const std::string& name) {
  AccuracyConfig c;
  if (name == "fig1-left" || name == "fig1-right") {
    c.sizes = {10, 25, 50, 75, 100, 150, 200};
    c.conds = {{1e7, name == "fig1-left" ? 10.0 : 1e7}};
    c.with_cond = false;
  } else if (name == "fig2-left" || name == "fig2-right") {
    c.sizes = {10};
    for (int i = 0; i <= 15; ++i) {
      const double k = std::pow(10.0, i);
      c.conds.emplace_back(k, name == "fig2-left" ? 10.0 : k);
    }
  } else {
    throw Error(ErrorCode::BadParameter,
                "unknown preset '" + name + "' (expected fig1-left, fig1-right, fig2-left or fig2-right)");
  }
  return c;
}

std::size_t worker_count() {
  const char* env = std::getenv("PENCILFUN_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v <= 0) return 1;
  return static_cast<std::size_t>(v);
}

std::vector<ExperimentRecord> accuracy_sweep(const AccuracyConfig& config) {
  if (config.trials == 0) throw Error(ErrorCode::BadParameter, "trials must be positive");
  for (const AlgorithmChoice& c : config.algorithms) resolve_variant(c.algorithm, c.variant);
  const std::size_t na = config.algorithms.size();
  const std::size_t workers = worker_count();
  std::vector<ExperimentRecord> records;

  for (std::size_t n : config.sizes) {
    for (const auto& [ca, cb] : config.conds) {
      std::vector<TrialResult> results(config.trials);
      parallel_for(config.trials, workers, [&](std::size_t t) {
        TrialResult& r = results[t];
        r.err.assign(na, kNaN);
        r.time.assign(na, kNaN);
        r.flops.assign(na, kNaN);
        r.ok.assign(na, false);
        SymMatrix a, b;
        DDMatrix ref;
        try {
          std::tie(a, b) = gen_pair(n, ca, cb, config.seed, t);
          ref = reference_phi(a, b, config.function);
        } catch (const Error&) {
          return;
        }
        for (std::size_t k = 0; k < na; ++k) {
          try {
            PencilOptions opt;
            opt.variant = config.algorithms[k].variant;
            const PencilResult p = phi(a, b, config.function, config.algorithms[k].algorithm, opt);
            r.err[k] = relative_error(p.s5, ref);
            r.time[k] = p.wall_time;
            r.flops[k] = p.flops.formula;
            r.ok[k] = true;
          } catch (const Error&) {
          }
        }
        if (config.with_cond && n <= kDefaultSizeCap) {
          try {
            r.u_cond = kUnitRoundoff * cond_phi(a, b, config.function).cond_phi;
          } catch (const Error&) {
          }
        }
      });

      // Aggregation in trial order, independent of scheduling.
      double cond_sum = 0.0;
      std::size_t cond_count = 0;
      for (const TrialResult& r : results)
        if (!std::isnan(r.u_cond)) {
          cond_sum += r.u_cond;
          ++cond_count;
        }
      const double u_cond = cond_count ? cond_sum / static_cast<double>(cond_count) : kNaN;
      for (std::size_t k = 0; k < na; ++k) {
        ExperimentRecord rec = blank_record(n, ca, cb, config.function, config.algorithms[k]);
        rec.trials = config.trials;
        double sum = 0.0;
        std::size_t good = 0;
        std::vector<double> times;
        for (const TrialResult& r : results) {
          if (!r.ok[k]) {
            ++rec.failures;
            continue;
          }
          sum += r.err[k];
          ++good;
          times.push_back(r.time[k]);
          rec.flops = r.flops[k];
        }
        rec.mean_rel_err = good ? sum / static_cast<double>(good) : kNaN;
        rec.median_time_s = median(times);
        if (!good) rec.flops = kNaN;
        rec.u_cond_phi = u_cond;
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

std::vector<ExperimentRecord> bench(const BenchConfig& config) {
  if (config.trials == 0) throw Error(ErrorCode::BadParameter, "trials must be positive");
  for (const AlgorithmChoice& c : config.algorithms) resolve_variant(c.algorithm, c.variant);
  const std::size_t na = config.algorithms.size();
  std::vector<ExperimentRecord> records;
  for (std::size_t n : config.sizes) {
    std::vector<std::vector<double>> times(na);
    std::vector<double> flops(na, kNaN);
    std::vector<std::size_t> failures(na, 0);
    const auto run = [&](std::size_t k, const SymMatrix& a, const SymMatrix& b) {
      PencilOptions opt;
      opt.variant = config.algorithms[k].variant;
      return phi(a, b, config.function, config.algorithms[k].algorithm, opt);
    };
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto [a, b] = gen_pair(n, config.cond_a, config.cond_b, config.seed, t);
      for (std::size_t k = 0; k < na; ++k) {
        try {
          if (t == 0) run(k, a, b);  // warm-up, discarded
          const PencilResult p = run(k, a, b);
          times[k].push_back(p.wall_time);
          flops[k] = p.flops.formula;
        } catch (const Error&) {
          ++failures[k];
        }
      }
    }
    for (std::size_t k = 0; k < na; ++k) {
      ExperimentRecord rec = blank_record(n, config.cond_a, config.cond_b, config.function, config.algorithms[k]);
      rec.trials = config.trials;
      rec.failures = failures[k];
      rec.mean_rel_err = kNaN;
      rec.median_time_s = median(times[k]);
      rec.flops = flops[k];
      rec.u_cond_phi = kNaN;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

const char* const kCsvHeader =
    "n,cond_A,cond_B,function,algorithm,variant,trials,mean_rel_err,median_time_s,flops,u_cond_phi";

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kCsvHeader << '\n';
  for (const ExperimentRecord& r : records) {
    out << r.n << ',' << number(r.cond_a) << ',' << number(r.cond_b) << ',' << csv_field(r.function) << ','
        << r.algorithm << ',' << r.variant << ',' << r.trials << ',' << number(r.mean_rel_err) << ','
        << number(r.median_time_s, "%.6e") << ',' << number(r.flops) << ',' << number(r.u_cond_phi) << '\n';
  }
}

}  // namespace pencilfun
