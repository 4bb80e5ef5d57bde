#pragma once

#include <cmath>
#include <string>

namespace pencilfun {

// Unevaluated sum hi + lo of two doubles, |lo| <= ulp(hi)/2. About 32
// significant digits. Relies on a correctly rounded fma.
struct DDReal {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DDReal() = default;
  constexpr DDReal(double h) : hi(h) {}  // NOLINT: implicit widening is intended
  constexpr DDReal(double h, double l) : hi(h), lo(l) {}

  double to_double() const noexcept { return hi + lo; }
};

namespace dd {

inline DDReal quick_two_sum(double a, double b) noexcept {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DDReal two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DDReal two_prod(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd

inline DDReal operator+(const DDReal& a, const DDReal& b) noexcept {
  DDReal s = dd::two_sum(a.hi, b.hi);
  const DDReal t = dd::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd::quick_two_sum(s.hi, s.lo);
}

inline DDReal operator+(const DDReal& a, double b) noexcept {
  DDReal s = dd::two_sum(a.hi, b);
  s.lo += a.lo;
  return dd::quick_two_sum(s.hi, s.lo);
}

inline DDReal operator-(const DDReal& a) noexcept { return {-a.hi, -a.lo}; }
inline DDReal operator-(const DDReal& a, const DDReal& b) noexcept { return a + (-b); }
inline DDReal operator-(const DDReal& a, double b) noexcept { return a + (-b); }

inline DDReal operator*(const DDReal& a, const DDReal& b) noexcept {
  DDReal p = dd::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd::quick_two_sum(p.hi, p.lo);
}

inline DDReal operator*(const DDReal& a, double b) noexcept {
  DDReal p = dd::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return dd::quick_two_sum(p.hi, p.lo);
}

inline DDReal operator/(const DDReal& a, const DDReal& b) noexcept {
  const double q1 = a.hi / b.hi;
  DDReal r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  return dd::quick_two_sum(q1, q2) + q3;
}

inline DDReal& operator+=(DDReal& a, const DDReal& b) noexcept { return a = a + b; }
inline DDReal& operator-=(DDReal& a, const DDReal& b) noexcept { return a = a - b; }
inline DDReal& operator*=(DDReal& a, const DDReal& b) noexcept { return a = a * b; }
inline DDReal& operator/=(DDReal& a, const DDReal& b) noexcept { return a = a / b; }

inline bool operator<(const DDReal& a, const DDReal& b) noexcept {
  return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(const DDReal& a, const DDReal& b) noexcept { return b < a; }
inline bool operator==(const DDReal& a, const DDReal& b) noexcept { return a.hi == b.hi && a.lo == b.lo; }

inline DDReal abs(const DDReal& a) noexcept { return a.hi < 0.0 ? -a : a; }
inline DDReal sqr(const DDReal& a) noexcept { return a * a; }

// Throws DomainError for negative arguments.
DDReal sqrt(const DDReal& a);
// Throws DomainError for non-positive arguments.
DDReal log(const DDReal& a);
// Throws Overflow above ~709.78.
DDReal exp(const DDReal& a);
// x^t for x > 0 (0^t = 0 for t > 0).
DDReal pow(const DDReal& x, const DDReal& t);

// ln 2 to double-double accuracy.
inline constexpr DDReal kLn2{6.931471805599452862e-01, 2.319046813846299558e-17};

// Decimal rendering with `digits` significant digits.
std::string to_string(const DDReal& a, int digits = 32);

}  // namespace pencilfun
