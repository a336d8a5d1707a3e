#include "hodgedec/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "hodgedec/errors.hpp"

namespace hodgedec {

namespace {

constexpr const char* kHeader = "simplex_index,value";

std::string trim_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

}  // namespace

void write_cochain_csv(std::ostream& out, const Cochain& c) {
  out << kHeader << '\n';
  char buf[40];
  for (Index i = 0; i < c.values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", c.values[i]);
    out << i << ',' << buf << '\n';
  }
  if (!out) throw Error("cochain CSV write failed");
}

void write_cochain_csv(const std::string& path, const Cochain& c) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  write_cochain_csv(f, c);
  f.flush();
  if (!f) throw Error("write failed: " + path);
}

Cochain read_cochain_csv(std::istream& in, const SimplicialComplex& complex, int degree) {
  if (degree < 0 || degree > complex.dim()) {
    throw DegreeOutOfRange("read_cochain_csv: degree " + std::to_string(degree));
  }
  std::string line;
  if (!std::getline(in, line) || trim_cr(line) != kHeader) {
    throw ParseError("cochain CSV: missing header '" + std::string(kHeader) + "'");
  }
  const Index n = complex.num_simplices(degree);
  Cochain c{degree, complex.id(), Eigen::VectorXd::Zero(n)};
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  Index filled = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim_cr(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("cochain CSV line " + std::to_string(lineno) + ": expected 'index,value'");
    }
    char* end = nullptr;
    const std::string idx_str = line.substr(0, comma);
    const long long idx = std::strtoll(idx_str.c_str(), &end, 10);
    if (end == idx_str.c_str() || *end != '\0' || idx < 0 || idx >= n) {
      throw ParseError("cochain CSV line " + std::to_string(lineno) + ": bad simplex index '" +
                       idx_str + "'");
    }
    const std::string val_str = line.substr(comma + 1);
    const double val = std::strtod(val_str.c_str(), &end);
    if (end == val_str.c_str() || *end != '\0' || !std::isfinite(val)) {
      throw ParseError("cochain CSV line " + std::to_string(lineno) + ": bad value '" + val_str +
                       "'");
    }
    if (seen[static_cast<std::size_t>(idx)]) {
      throw ParseError("cochain CSV line " + std::to_string(lineno) + ": duplicate index " +
                       std::to_string(idx));
    }
    seen[static_cast<std::size_t>(idx)] = 1;
    c.values[static_cast<Index>(idx)] = val;
    ++filled;
  }
  if (filled != n) {
    throw ParseError("cochain CSV: " + std::to_string(filled) + " entries for " +
                     std::to_string(n) + " simplices");
  }
  return c;
}

Cochain read_cochain_csv(const std::string& path, const SimplicialComplex& complex, int degree) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open: " + path);
  return read_cochain_csv(f, complex, degree);
}

}  // namespace hodgedec
