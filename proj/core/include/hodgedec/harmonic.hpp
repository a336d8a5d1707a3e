#pragma once

#include <Eigen/Core>

#include "hodgedec/dec.hpp"

namespace hodgedec {

/**
 * Orthonormal basis of the kernel of the degree-p Hodge Laplacian in the
 * star-weighted inner product. The kernel dimension equals the p-th Betti
 * number of the complex.
 */
struct HarmonicBasis {
  int degree = 0;
  std::uint64_t complex_id = 0;
  Eigen::MatrixXd vectors;          // n_p x K_p, columns orthonormal
  double gram_tolerance = 1e-12;    // singularity threshold for downstream Gram solves
  double lambda_max = 0.0;          // largest-eigenvalue estimate
  double null_threshold = 0.0;      // absolute eigenvalue cutoff used
  double kernel_max = 0.0;          // largest eigenvalue classified as kernel
  double first_nonzero = 0.0;       // smallest eigenvalue kept as nonzero (0 if none)
  double spectral_gap = 0.0;        // first_nonzero / kernel_max, +inf when clean

  Index dimension() const { return vectors.cols(); }
};

/**
 * Extracts the kernel by a symmetric eigensolve of the star-weighted
 * pencil: dense below a size cutoff, shift-inverted subspace iteration
 * above it. Eigenvalues at or below null_tol times the largest eigenvalue
 * count as kernel; the classification must be separated from the kept
 * spectrum by a factor of 1000, otherwise SpectralGapAmbiguity is thrown.
 */
HarmonicBasis harmonic_basis(const Operators& ops, const MetricStar& star, int degree,
                             double null_tol = 1e-8);

/// Orthogonal projection onto the span of the basis.
Cochain harmonic_project(const Cochain& v, const HarmonicBasis& basis, const MetricStar& star);

}  // namespace hodgedec
