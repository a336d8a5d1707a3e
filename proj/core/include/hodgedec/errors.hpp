#pragma once

#include <stdexcept>
#include <string>

namespace hodgedec {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// mesh input --------------------------------------------------------------

struct ParseError : Error {
  using Error::Error;
};

// A codimension-1 simplex with more than two cofaces.
struct NonManifoldError : Error {
  using Error::Error;
};

// Surface admits no consistent orientation of its top simplices.
struct NonOrientableError : Error {
  using Error::Error;
};

// A simplex whose metric volume vanishes (or whose edge lengths violate
// the triangle inequality).
struct DegenerateSimplex : Error {
  using Error::Error;
};

// Input complex has empty boundary where a boundary is required.
struct ClosedInputError : Error {
  using Error::Error;
};

// argument validation -----------------------------------------------------

struct InvalidParameter : Error {
  using Error::Error;
};

struct DegreeOutOfRange : Error {
  using Error::Error;
};

struct DegreeMismatch : Error {
  using Error::Error;
};

struct ComplexMismatch : Error {
  using Error::Error;
};

// spectral / algebraic ----------------------------------------------------

// The eigenvalue threshold separating "kernel" from "non-kernel" falls
// inside a cluster; the null space dimension is not well defined.
struct SpectralGapAmbiguity : Error {
  using Error::Error;
};

// Gram matrix of the mirror-restricted harmonic basis is numerically
// singular; the orthogonal extension coefficients are not determined.
struct SingularGram : Error {
  using Error::Error;
};

// solver ------------------------------------------------------------------

// A simplex interior to no patch, or a vertex where every bump weight
// vanishes.
struct CoverageFailure : Error {
  using Error::Error;
};

struct FactorizationFailure : Error {
  using Error::Error;
};

// Right hand side carries a harmonic component too large for the solve to
// be consistent.
struct CompatibilityViolation : Error {
  using Error::Error;
};

struct NoConvergence : Error {
  using Error::Error;
};

// Measured perturbation-series contraction ratio stayed at or above the
// configured cap.
struct ContractionFailure : Error {
  using Error::Error;
};

// ResidualDivergence lives in solver.hpp: it carries the step report
// accumulated before the blow-up.

}  // namespace hodgedec
