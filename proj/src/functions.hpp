#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "matrix.hpp"

namespace pencilfun {

enum class FunctionKind {
  Log,          // log x
  Power,        // x^t
  Sqrt,         // x^{1/2}
  ArithMean,    // (1-t) + t x
  HarmMean,     // 2x / (1+x)
  PowerMean,    // ((1-t) + t x^p)^{1/p}
  Exp,          // e^x
  Identity,     // x
  ConstantOne,  // 1
};

// Open interval on which f is evaluated.
struct Domain {
  double lo;
  double hi;
  bool contains(double x) const noexcept { return x > lo && x < hi; }
};

// Scalar function together with its derivatives and its dual x f(1/x).
// Immutable value type. The dual of a spec is the same spec with a flag
// flipped, so dual().dual() is the original exactly; evaluation uses the
// closed form of the dual where one exists.
class FunctionSpec {
 public:
  // Names: log, power (power_t), sqrt, arith_mean (arith_mean_t), harm_mean,
  // power_mean (power_mean_p_t), exp, identity, constant_one (one).
  // t defaults to 0.5; power_mean needs p. Throws UnknownFunction or
  // BadParameter (t outside [0,1], p == 0, unknown parameter name).
  static FunctionSpec builtin(std::string_view name, const std::map<std::string, double>& params = {});
  // "log", "power:t=0.3", "power_mean:p=2,t=0.25", "dual(log)".
  static FunctionSpec parse(std::string_view text);

  FunctionKind kind() const noexcept { return kind_; }
  bool is_dual() const noexcept { return dual_; }
  double t() const noexcept { return t_; }
  double p() const noexcept { return p_; }
  // Canonical text form; parse(name()) reproduces the spec.
  std::string name() const;

  FunctionSpec dual() const;
  Domain domain() const;
  bool in_domain(double x) const { return domain().contains(x); }

  double eval(double x) const;
  double derivative(double x) const;
  // Not available for power means.
  std::optional<double> second_derivative(double x) const;
  double dual_eval(double x) const { return dual().eval(x); }
  double dual_derivative(double x) const { return dual().derivative(x); }

  // f[x, y]; f'((x+y)/2) when |y - x| <= sqrt(u) max(|x|, |y|).
  // Throws DomainError if x or y is outside the domain.
  double divided_difference(double x, double y) const;

  // Throws DomainError listing every value outside the domain; the index is
  // the 1-based position of the first one.
  void require_in_domain(std::span<const double> values) const;

 private:
  FunctionSpec(FunctionKind kind, double t, double p, bool dual) : kind_(kind), t_(t), p_(p), dual_(dual) {}
  double base_dd(double x, double y) const;

  FunctionKind kind_ = FunctionKind::Identity;
  double t_ = 0.5;
  double p_ = 1.0;
  bool dual_ = false;
};

struct DividedDifferenceTable {
  std::vector<double> lambda;
  Matrix f;  // f_ij = f[lambda_i, lambda_j]
};

DividedDifferenceTable dd_table(const FunctionSpec& spec, std::span<const double> lambda);

}  // namespace pencilfun
