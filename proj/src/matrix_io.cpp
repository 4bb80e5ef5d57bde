#include "matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "errors.hpp"

namespace pencilfun {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

[[noreturn]] void parse_error(long line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what, line);
}

// Reads whitespace-separated tokens, skipping blank and comment lines, and
// remembers which line each token came from.
class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  // Next token, or false at end of input.
  bool next(std::string& tok) {
    while (!(ls_ >> tok)) {
      std::string line;
      if (!std::getline(in_, line)) {
        ++line_no_;  // the line where more data was expected
        return false;
      }
      ++line_no_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] == '%') line.clear();
      ls_.clear();
      ls_.str(line);
    }
    return true;
  }
  long line() const noexcept { return line_no_; }
  void set_line(long l) noexcept { line_no_ = l; }

 private:
  std::istream& in_;
  std::istringstream ls_;
  long line_no_ = 0;
};

double parse_double(const std::string& tok, long line) {
  double v = 0.0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (*b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) parse_error(line, "invalid number '" + tok + "'");
  return v;
}

std::size_t parse_size(const std::string& tok, long line) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) parse_error(line, "invalid dimension '" + tok + "'");
  return v;
}

}  // namespace

SymMatrix read_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) parse_error(1, "empty file");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (lower(banner) != "%%matrixmarket") parse_error(1, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix" || lower(format) != "array")
    parse_error(1, "only 'matrix array' files are supported");
  if (lower(field) != "real") parse_error(1, "only real matrices are supported");
  const std::string sym = lower(symmetry);
  if (sym != "symmetric" && sym != "general") parse_error(1, "symmetry must be 'symmetric' or 'general'");

  Tokens toks(in);
  toks.set_line(1);
  std::string tok;
  if (!toks.next(tok)) parse_error(toks.line(), "missing size line");
  const std::size_t rows = parse_size(tok, toks.line());
  if (!toks.next(tok)) parse_error(toks.line(), "missing column count");
  const std::size_t cols = parse_size(tok, toks.line());
  if (rows != cols) throw Error(ErrorCode::ShapeError, "matrix is " + std::to_string(rows) + "x" + std::to_string(cols) + ", not square");
  if (rows == 0) throw Error(ErrorCode::ShapeError, "matrix dimension must be positive");
  const std::size_t n = rows;

  Matrix m(n, n);
  if (sym == "symmetric") {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = j; i < n; ++i) {
        if (!toks.next(tok)) parse_error(toks.line(), "unexpected end of data");
        const double v = parse_double(tok, toks.line());
        m(i, j) = v;
        m(j, i) = v;
      }
  } else {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        if (!toks.next(tok)) parse_error(toks.line(), "unexpected end of data");
        m(i, j) = parse_double(tok, toks.line());
      }
  }
  if (toks.next(tok)) parse_error(toks.line(), "trailing data '" + tok + "'");
  return SymMatrix::from_exact(m);
}

SymMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SymMatrix& a) {
  const std::size_t n = a.n();
  out << "%%MatrixMarket matrix array real symmetric\n" << n << ' ' << n << '\n';
  char buf[40];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", a(i, j));
      out << buf;
    }
}

void write_matrix_market(const std::string& path, const SymMatrix& a) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_matrix_market(out, a);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace pencilfun
