#include "functions.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace pencilfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kDelta = std::sqrt(0x1p-53);

// Closed forms after the dual flag has been folded in.
enum class Form { Log, NegXLogX, Power, ArithMean, HarmMean, PowerMean, Exp, XExpInv, Identity, Constant };

struct Resolved {
  Form form;
  double t;
  double p;
};

Resolved resolve(FunctionKind kind, double t, double p, bool dual) {
  const double te = dual ? 1.0 - t : t;
  switch (kind) {
    case FunctionKind::Log: return {dual ? Form::NegXLogX : Form::Log, t, p};
    case FunctionKind::Power: return {Form::Power, te, p};
    case FunctionKind::Sqrt: return {Form::Power, 0.5, p};
    case FunctionKind::ArithMean: return {Form::ArithMean, te, p};
    case FunctionKind::HarmMean: return {Form::HarmMean, t, p};
    case FunctionKind::PowerMean: return {Form::PowerMean, te, p};
    case FunctionKind::Exp: return {dual ? Form::XExpInv : Form::Exp, t, p};
    case FunctionKind::Identity: return {dual ? Form::Constant : Form::Identity, t, p};
    case FunctionKind::ConstantOne: return {dual ? Form::Identity : Form::Constant, t, p};
  }
  return {Form::Identity, t, p};
}

bool near(double x, double y) { return std::abs(y - x) <= kDelta * std::max(std::abs(x), std::abs(y)); }

// (y^a - x^a) / (y - x) for x, y > 0 without cancellation.
double pow_dd(double x, double y, double a) {
  if (near(x, y)) return a * std::pow(0.5 * (x + y), a - 1.0);
  const double h = y - x;
  if (std::abs(h) <= 0.5 * std::abs(x)) return std::pow(x, a) * std::expm1(a * std::log1p(h / x)) / h;
  return (std::pow(y, a) - std::pow(x, a)) / h;
}

double log_dd(double x, double y) {
  if (near(x, y)) return 2.0 / (x + y);
  const double h = y - x;
  if (std::abs(h) <= 0.5 * std::abs(x)) return std::log1p(h / x) / h;
  return (std::log(y) - std::log(x)) / h;
}

double exp_dd(double x, double y) {
  if (near(x, y)) return std::exp(0.5 * (x + y));
  const double h = y - x;
  return std::exp(x) * std::expm1(h) / h;
}

double power_mean_eval(double x, double t, double p) {
  return std::pow((1.0 - t) + t * std::pow(x, p), 1.0 / p);
}

double eval_form(const Resolved& r, double x) {
  switch (r.form) {
    case Form::Log: return std::log(x);
    case Form::NegXLogX: return -x * std::log(x);
    case Form::Power: return r.t == 0.5 ? std::sqrt(x) : std::pow(x, r.t);
    case Form::ArithMean: return (1.0 - r.t) + r.t * x;
    case Form::HarmMean: return 2.0 * x / (1.0 + x);
    case Form::PowerMean: return power_mean_eval(x, r.t, r.p);
    case Form::Exp: return std::exp(x);
    case Form::XExpInv: return x * std::exp(1.0 / x);
    case Form::Identity: return x;
    case Form::Constant: return 1.0;
  }
  return 0.0;
}

double derivative_form(const Resolved& r, double x) {
  switch (r.form) {
    case Form::Log: return 1.0 / x;
    case Form::NegXLogX: return -std::log(x) - 1.0;
    case Form::Power: return r.t == 0.0 ? 0.0 : r.t * std::pow(x, r.t - 1.0);
    case Form::ArithMean: return r.t;
    case Form::HarmMean: return 2.0 / ((1.0 + x) * (1.0 + x));
    case Form::PowerMean: {
      const double m = (1.0 - r.t) + r.t * std::pow(x, r.p);
      return std::pow(m, 1.0 / r.p - 1.0) * r.t * std::pow(x, r.p - 1.0);
    }
    case Form::Exp: return std::exp(x);
    case Form::XExpInv: return std::exp(1.0 / x) * (1.0 - 1.0 / x);
    case Form::Identity: return 1.0;
    case Form::Constant: return 0.0;
  }
  return 0.0;
}

double format_check(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::BadParameter, std::string(what) + " must be finite");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FunctionSpec FunctionSpec::builtin(std::string_view name, const std::map<std::string, double>& params) {
  FunctionKind kind;
  bool takes_t = false, takes_p = false;
  if (name == "log") {
    kind = FunctionKind::Log;
  } else if (name == "power" || name == "power_t") {
    kind = FunctionKind::Power;
    takes_t = true;
  } else if (name == "sqrt") {
    kind = FunctionKind::Sqrt;
  } else if (name == "arith_mean" || name == "arith_mean_t") {
    kind = FunctionKind::ArithMean;
    takes_t = true;
  } else if (name == "harm_mean") {
    kind = FunctionKind::HarmMean;
  } else if (name == "power_mean" || name == "power_mean_p_t") {
    kind = FunctionKind::PowerMean;
    takes_t = takes_p = true;
  } else if (name == "exp") {
    kind = FunctionKind::Exp;
  } else if (name == "identity") {
    kind = FunctionKind::Identity;
  } else if (name == "constant_one" || name == "one") {
    kind = FunctionKind::ConstantOne;
  } else {
    throw Error(ErrorCode::UnknownFunction, "unknown function '" + std::string(name) + "'");
  }
  double t = 0.5, p = 1.0;
  bool have_p = false;
  for (const auto& [key, value] : params) {
    if (key == "t" && takes_t) {
      t = format_check(value, "t");
    } else if (key == "p" && takes_p) {
      p = format_check(value, "p");
      have_p = true;
    } else {
      throw Error(ErrorCode::BadParameter,
                  "function '" + std::string(name) + "' takes no parameter '" + key + "'");
    }
  }
  if (t < 0.0 || t > 1.0) throw Error(ErrorCode::BadParameter, "t must lie in [0, 1]");
  if (takes_p) {
    if (!have_p) throw Error(ErrorCode::BadParameter, "power_mean needs p");
    if (p == 0.0) throw Error(ErrorCode::BadParameter, "p must be nonzero");
  }
  return FunctionSpec(kind, t, p, false);
}

FunctionSpec FunctionSpec::parse(std::string_view text) {
  text = trim(text);
  if (text.starts_with("dual(") && text.ends_with(")")) {
    return parse(text.substr(5, text.size() - 6)).dual();
  }
  const auto colon = text.find(':');
  const std::string_view name = trim(text.substr(0, colon));
  std::map<std::string, double> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos)
        throw Error(ErrorCode::BadParameter, "expected key=value in '" + std::string(item) + "'");
      const std::string key(trim(item.substr(0, eq)));
      const std::string_view val = trim(item.substr(eq + 1));
      double v = 0.0;
      const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
      if (res.ec != std::errc{} || res.ptr != val.data() + val.size())
        throw Error(ErrorCode::BadParameter, "bad value for '" + key + "': '" + std::string(val) + "'");
      params[key] = v;
    }
  }
  return builtin(name, params);
}

std::string FunctionSpec::name() const {
  std::string base;
  switch (kind_) {
    case FunctionKind::Log: base = "log"; break;
    case FunctionKind::Power: base = "power:t=" + shortest(t_); break;
    case FunctionKind::Sqrt: base = "sqrt"; break;
    case FunctionKind::ArithMean: base = "arith_mean:t=" + shortest(t_); break;
    case FunctionKind::HarmMean: base = "harm_mean"; break;
    case FunctionKind::PowerMean: base = "power_mean:p=" + shortest(p_) + ",t=" + shortest(t_); break;
    case FunctionKind::Exp: base = "exp"; break;
    case FunctionKind::Identity: base = "identity"; break;
    case FunctionKind::ConstantOne: base = "constant_one"; break;
  }
  return dual_ ? "dual(" + base + ")" : base;
}

FunctionSpec FunctionSpec::dual() const { return FunctionSpec(kind_, t_, p_, !dual_); }

Domain FunctionSpec::domain() const {
  switch (resolve(kind_, t_, p_, dual_).form) {
    case Form::ArithMean:
    case Form::Exp:
    case Form::Identity:
    case Form::Constant:
      return {-kInf, kInf};
    default:
      return {0.0, kInf};
  }
}

double FunctionSpec::eval(double x) const { return eval_form(resolve(kind_, t_, p_, dual_), x); }

double FunctionSpec::derivative(double x) const {
  return derivative_form(resolve(kind_, t_, p_, dual_), x);
}

std::optional<double> FunctionSpec::second_derivative(double x) const {
  const Resolved r = resolve(kind_, t_, p_, dual_);
  switch (r.form) {
    case Form::Log: return -1.0 / (x * x);
    case Form::NegXLogX: return -1.0 / x;
    case Form::Power: return r.t * (r.t - 1.0) * std::pow(x, r.t - 2.0);
    case Form::ArithMean: return 0.0;
    case Form::HarmMean: return -4.0 / ((1.0 + x) * (1.0 + x) * (1.0 + x));
    case Form::PowerMean: return std::nullopt;
    case Form::Exp: return std::exp(x);
    case Form::XExpInv: return std::exp(1.0 / x) / (x * x * x);
    case Form::Identity:
    case Form::Constant: return 0.0;
  }
  return std::nullopt;
}

double FunctionSpec::base_dd(double x, double y) const {
  const Resolved r = resolve(kind_, t_, p_, dual_);
  switch (r.form) {
    case Form::Log: return log_dd(x, y);
    case Form::NegXLogX: return -std::log(y) - log_dd(1.0 / x, 1.0 / y) / y;
    case Form::Power:
      if (r.t == 0.5) return 1.0 / (std::sqrt(x) + std::sqrt(y));
      return pow_dd(x, y, r.t);
    case Form::ArithMean: return r.t;
    case Form::HarmMean: return 2.0 / ((1.0 + x) * (1.0 + y));
    case Form::PowerMean: {
      if (r.t == 0.0) return 0.0;
      const double mx = (1.0 - r.t) + r.t * std::pow(x, r.p);
      const double my = (1.0 - r.t) + r.t * std::pow(y, r.p);
      return pow_dd(mx, my, 1.0 / r.p) * r.t * pow_dd(x, y, r.p);
    }
    case Form::Exp: return exp_dd(x, y);
    case Form::XExpInv: return std::exp(1.0 / y) - exp_dd(1.0 / x, 1.0 / y) / y;
    case Form::Identity: return 1.0;
    case Form::Constant: return 0.0;
  }
  return 0.0;
}

double FunctionSpec::divided_difference(double x, double y) const {
  const Domain dom = domain();
  if (!dom.contains(x) || !dom.contains(y)) {
    throw Error(ErrorCode::DomainError, "divided difference argument outside the domain of " + name(), -1,
                {x, y});
  }
  if (near(x, y)) return derivative(0.5 * (x + y));
  return base_dd(x, y);
}

void FunctionSpec::require_in_domain(std::span<const double> values) const {
  const Domain dom = domain();
  std::vector<double> bad;
  long first = -1;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!dom.contains(values[i])) {
      if (first < 0) first = static_cast<long>(i + 1);
      bad.push_back(values[i]);
    }
  if (bad.empty()) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << "eigenvalue";
  if (bad.size() > 1) msg << 's';
  msg << " outside the domain of " << name() << ":";
  for (double v : bad) msg << ' ' << v;
  throw Error(ErrorCode::DomainError, msg.str(), first, std::move(bad));
}

DividedDifferenceTable dd_table(const FunctionSpec& spec, std::span<const double> lambda) {
  spec.require_in_domain(lambda);
  const std::size_t n = lambda.size();
  DividedDifferenceTable table{std::vector<double>(lambda.begin(), lambda.end()), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    table.f(j, j) = spec.derivative(lambda[j]);
    for (std::size_t i = j + 1; i < n; ++i) {
      const double v = spec.divided_difference(lambda[i], lambda[j]);
      table.f(i, j) = v;
      table.f(j, i) = v;
    }
  }
  return table;
}

}  // namespace pencilfun
