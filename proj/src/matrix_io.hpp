#pragma once

#include <iosfwd>
#include <string>

#include "matrix.hpp"

namespace pencilfun {

// Matrix Market array format. Writing always uses
// `%%MatrixMarket matrix array real symmetric` with the lower triangle in
// column-major order and 17 significant digits, so a round trip is exact.
// Reading also accepts `general` arrays, whose symmetry is then checked.
// Errors: ParseError (with the 1-based line number), ShapeError, IoError.
SymMatrix read_matrix_market(std::istream& in);
SymMatrix read_matrix_market(const std::string& path);
void write_matrix_market(std::ostream& out, const SymMatrix& a);
void write_matrix_market(const std::string& path, const SymMatrix& a);

}  // namespace pencilfun
