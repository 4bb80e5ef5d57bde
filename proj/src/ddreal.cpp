#include "ddreal.hpp"

#include <cstdlib>
#include <limits>

#include "errors.hpp"

namespace pencilfun {

DDReal sqrt(const DDReal& a) {
  if (a.hi == 0.0) return {};
  if (a.hi < 0.0) throw Error(ErrorCode::DomainError, "square root of a negative number", -1, {a.hi});
  const double x = 1.0 / std::sqrt(a.hi);
  const double ax = a.hi * x;
  return DDReal(ax) + (a - dd::two_prod(ax, ax)).hi * (x * 0.5);
}

DDReal exp(const DDReal& a) {
  constexpr double kMax = 709.78;
  if (a.hi > kMax) throw Error(ErrorCode::Overflow, "exp argument too large", -1, {a.hi});
  if (a.hi < -745.0) return {};
  if (a.hi == 0.0 && a.lo == 0.0) return 1.0;
  const double k = std::floor(a.hi / kLn2.hi + 0.5);
  // r = (a - k ln2) / 1024, so |r| <= 3.4e-4.
  DDReal r = a - kLn2 * k;
  r = DDReal(std::ldexp(r.hi, -10), std::ldexp(r.lo, -10));
  // expm1(r) by Taylor series.
  DDReal term = r;
  DDReal s = r;
  for (int i = 2; i <= 12; ++i) {
    term = term * r / DDReal(static_cast<double>(i));
    s += term;
    if (std::abs(term.hi) < 1e-36 * std::abs(s.hi)) break;
  }
  // (1 + s)^2 - 1 = 2s + s^2, ten times.
  for (int i = 0; i < 10; ++i) s = DDReal(2.0 * s.hi, 2.0 * s.lo) + sqr(s);
  s = s + 1.0;
  const int ki = static_cast<int>(k);
  return {std::ldexp(s.hi, ki), std::ldexp(s.lo, ki)};
}

DDReal log(const DDReal& a) {
  if (!(a.hi > 0.0)) throw Error(ErrorCode::DomainError, "logarithm of a non-positive number", -1, {a.hi});
  if (a.hi == 1.0 && a.lo == 0.0) return {};
  // One Newton step on exp(y) = a from the double-precision logarithm.
  DDReal y = std::log(a.hi);
  y = y + a * exp(-y) - 1.0;
  return y;
}

DDReal pow(const DDReal& x, const DDReal& t) {
  if (x.hi == 0.0 && x.lo == 0.0) {
    if (t.hi > 0.0) return {};
    throw Error(ErrorCode::DomainError, "zero raised to a non-positive power");
  }
  if (t.hi == 0.0 && t.lo == 0.0) return 1.0;
  if (t.hi == 1.0 && t.lo == 0.0) return x;
  if (t.hi == 0.5 && t.lo == 0.0) return sqrt(x);
  return exp(t * log(x));
}

std::string to_string(const DDReal& a, int digits) {
  if (!std::isfinite(a.hi)) return std::to_string(a.hi);
  if (a.hi == 0.0) return "0";
  std::string out;
  DDReal v = a;
  if (v.hi < 0.0) {
    out += '-';
    v = -v;
  }
  int e = static_cast<int>(std::floor(std::log10(v.hi)));
  DDReal scale = 1.0;
  const DDReal ten = 10.0;
  for (int i = 0; i < std::abs(e); ++i) scale *= ten;
  v = e >= 0 ? v / scale : v * scale;
  if (v.hi >= 10.0) {
    v = v / ten;
    ++e;
  } else if (v.hi < 1.0) {
    v = v * ten;
    --e;
  }
  std::string mant;
  for (int i = 0; i < digits; ++i) {
    int d = static_cast<int>(std::floor(v.hi));
    if (d < 0) d = 0;
    if (d > 9) d = 9;
    mant += static_cast<char>('0' + d);
    v = (v - static_cast<double>(d)) * 10.0;
  }
  out += mant.substr(0, 1);
  out += '.';
  out += mant.substr(1);
  out += 'e';
  out += std::to_string(e);
  return out;
}

}  // namespace pencilfun
