#pragma once

#include <iosfwd>
#include <string>

#include "hodgedec/dec.hpp"

namespace hodgedec {

/// Two columns, header `simplex_index,value`, full double round trip.
void write_cochain_csv(std::ostream& out, const Cochain& c);
void write_cochain_csv(const std::string& path, const Cochain& c);

/// Inverse of write_cochain_csv against a fixed complex and degree.
/// Every index must appear exactly once; values must be finite.
Cochain read_cochain_csv(std::istream& in, const SimplicialComplex& complex, int degree);
Cochain read_cochain_csv(const std::string& path, const SimplicialComplex& complex, int degree);

}  // namespace hodgedec
