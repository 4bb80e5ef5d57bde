#pragma once

#include <cstdint>

namespace pencilfun {

// Exact operation tallies kept by the hand-written loops.
struct FlopCount {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t divs = 0;
  std::uint64_t sqrts = 0;

  std::uint64_t total() const noexcept { return adds + muls + divs + sqrts; }

  FlopCount& operator+=(const FlopCount& o) noexcept {
    adds += o.adds;
    muls += o.muls;
    divs += o.divs;
    sqrts += o.sqrts;
    return *this;
  }
};

// Per-call accumulator. `formula` sums the leading-order n^3 cost of each
// kernel as listed in the standard cost table (Cholesky n^3/3, symmetric
// Schur 9n^3, ...); `exact` counts what the loops actually executed.
struct FlopLedger {
  FlopCount exact;
  double formula = 0.0;

  void add(std::uint64_t n) noexcept { exact.adds += n; }
  void mul(std::uint64_t n) noexcept { exact.muls += n; }
  void div(std::uint64_t n) noexcept { exact.divs += n; }
  void sqrt(std::uint64_t n) noexcept { exact.sqrts += n; }
  // n multiply-add pairs
  void fma(std::uint64_t n) noexcept {
    exact.adds += n;
    exact.muls += n;
  }

  FlopLedger& operator+=(const FlopLedger& o) noexcept {
    exact += o.exact;
    formula += o.formula;
    return *this;
  }
};

// Null-safe helpers so kernels can take an optional ledger.
inline void count_fma(FlopLedger* l, std::uint64_t n) noexcept {
  if (l) l->fma(n);
}
inline void count_add(FlopLedger* l, std::uint64_t n) noexcept {
  if (l) l->add(n);
}
inline void count_mul(FlopLedger* l, std::uint64_t n) noexcept {
  if (l) l->mul(n);
}
inline void count_div(FlopLedger* l, std::uint64_t n) noexcept {
  if (l) l->div(n);
}
inline void count_sqrt(FlopLedger* l, std::uint64_t n) noexcept {
  if (l) l->sqrt(n);
}
inline void count_formula(FlopLedger* l, double flops) noexcept {
  if (l) l->formula += flops;
}

}  // namespace pencilfun
