#include "hodgedec/harmonic.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace hodgedec {

namespace {

constexpr Index kDenseCutoff = 500;
constexpr double kGapFactor = 1e3;

double weighted_dot(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& s) {
  return a.dot(s.cwiseProduct(b));
}

// Modified Gram-Schmidt in the weighted inner product, re-orthogonalized
// once.
void orthonormalize(Eigen::MatrixXd& X, const Eigen::VectorXd& s) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        X.col(j) -= weighted_dot(X.col(i), X.col(j), s) * X.col(i);
      }
      const double nrm = std::sqrt(std::max(0.0, weighted_dot(X.col(j), X.col(j), s)));
      if (nrm > 0.0) X.col(j) /= nrm;
    }
  }
}

struct Spectrum {
  Eigen::VectorXd values;   // ascending, at least kernel candidates + one more when possible
  Eigen::MatrixXd vectors;  // matching columns, weighted-orthonormal
  double lambda_max = 0.0;
};

// Classifies the low end of the spectrum, enforces the gap, and packs the
// basis.
HarmonicBasis classify(const Spectrum& sp, const Eigen::VectorXd& s, int degree,
                       std::uint64_t complex_id, double null_tol, Index total_dim) {
  HarmonicBasis B;
  B.degree = degree;
  B.complex_id = complex_id;
  B.lambda_max = sp.lambda_max;
  B.null_threshold = null_tol * sp.lambda_max;

  Index K = 0;
  while (K < sp.values.size() && sp.values[K] <= B.null_threshold) ++K;
  B.kernel_max = 0.0;
  for (Index i = 0; i < K; ++i) B.kernel_max = std::max(B.kernel_max, sp.values[i]);
  B.first_nonzero = (K < sp.values.size()) ? sp.values[K] : 0.0;

  if (K > 0 && K < total_dim) {
    if (B.kernel_max <= 0.0) {
      B.spectral_gap = std::numeric_limits<double>::infinity();
    } else {
      B.spectral_gap = B.first_nonzero / B.kernel_max;
      if (B.spectral_gap < kGapFactor) {
        throw SpectralGapAmbiguity(
            "no clear kernel: largest candidate eigenvalue " + std::to_string(B.kernel_max) +
            " vs smallest kept " + std::to_string(B.first_nonzero));
      }
    }
  } else {
    B.spectral_gap = std::numeric_limits<double>::infinity();
  }

  B.vectors = sp.vectors.leftCols(K);
  orthonormalize(B.vectors, s);
  return B;
}

Spectrum dense_spectrum(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& s) {
  const Eigen::VectorXd rsqrt = s.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd C = rsqrt.asDiagonal() * Eigen::MatrixXd(A) * rsqrt.asDiagonal();
  C = 0.5 * (C + C.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
  if (es.info() != Eigen::Success) {
    throw NoConvergence("dense eigensolve failed");
  }
  Spectrum sp;
  sp.values = es.eigenvalues();
  sp.vectors = rsqrt.asDiagonal() * es.eigenvectors();
  sp.lambda_max = std::max(sp.values[sp.values.size() - 1], 0.0);
  return sp;
}

// Shift-inverted subspace iteration on the weighted pencil. Only the low
// end of the spectrum is resolved: kernel candidates to near machine
// accuracy, plus the first kept eigenvalue well enough for the gap test.
Spectrum sparse_spectrum(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& s,
                         int degree, double null_tol) {
  const Index n = A.rows();
  std::mt19937 rng(0x5eedu + static_cast<unsigned>(degree));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto fill_random = [&](auto&& block) {
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
      for (Eigen::Index i = 0; i < block.rows(); ++i) block(i, j) = dist(rng);
    }
  };

  // Largest eigenvalue by power iteration; only used as a scale.
  double lambda_max = 0.0;
  {
    Eigen::VectorXd x(n);
    fill_random(x);
    x /= std::sqrt(weighted_dot(x, x, s));
    for (int it = 0; it < 100; ++it) {
      Eigen::VectorXd y = s.cwiseInverse().cwiseProduct(A * x);
      const double nrm = std::sqrt(weighted_dot(y, y, s));
      if (nrm <= 0.0) break;
      y /= nrm;
      const double lambda = weighted_dot(y, s.cwiseInverse().cwiseProduct(A * y), s);
      if (it > 10 && std::abs(lambda - lambda_max) <= 1e-10 * std::abs(lambda)) {
        lambda_max = lambda;
        break;
      }
      lambda_max = lambda;
      x.swap(y);
    }
    if (!(lambda_max > 0.0)) {
      throw NoConvergence("could not estimate the spectral radius");
    }
  }

  const double tau = null_tol * lambda_max;
  const double sigma = tau;
  Eigen::SparseMatrix<double> shifted = A;
  Eigen::VectorXd sd = sigma * s;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += sd[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(shifted);
  if (solver.info() != Eigen::Success) {
    throw FactorizationFailure("shifted pencil factorization failed");
  }

  const Eigen::VectorXd rsqrt = s.cwiseSqrt().cwiseInverse();
  Index m = std::min<Index>(n, 8);
  while (true) {
    Eigen::MatrixXd X(n, m);
    fill_random(X);
    orthonormalize(X, s);

    Eigen::VectorXd theta;
    Index stable_kernel = -1;
    bool converged = false;
    for (int it = 0; it < 300 && !converged; ++it) {
      Eigen::MatrixXd Y = solver.solve(s.asDiagonal() * X);
      orthonormalize(Y, s);
      Eigen::MatrixXd AY = A * Y;
      Eigen::MatrixXd T = Y.transpose() * AY;
      T = 0.5 * (T + T.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(T);
      theta = small.eigenvalues();
      X = Y * small.eigenvectors();

      Index K = 0;
      while (K < m && theta[K] <= tau) ++K;
      if (K != stable_kernel) {
        stable_kernel = K;
        continue;
      }
      if (K >= m - 1 && m < n) break;  // kernel may exceed the block: grow

      bool ok = true;
      for (Index i = 0; i <= K && i < m; ++i) {
        Eigen::VectorXd r = A * X.col(i) - theta[i] * s.cwiseProduct(X.col(i));
        const double eta = rsqrt.cwiseProduct(r).norm();
        const double bound =
            (i < K) ? 1e-12 * lambda_max : std::max(0.05 * theta[i], 1e-12 * lambda_max);
        ok = ok && (eta <= bound);
      }
      converged = ok;
    }

    if (converged) {
      Spectrum sp;
      sp.values = theta;
      sp.vectors = X;
      sp.lambda_max = lambda_max;
      return sp;
    }
    if (m >= n || m >= 64) {
      throw NoConvergence("subspace iteration did not resolve the low spectrum");
    }
    m = std::min<Index>(n, 2 * m);
  }
}

}  // namespace

HarmonicBasis harmonic_basis(const Operators& ops, const MetricStar& star, int degree,
                             double null_tol) {
  if (ops.complex_id != star.complex_id) {
    throw ComplexMismatch("operators and star live on different complexes");
  }
  if (degree < 0 || degree > ops.dim) {
    throw DegreeOutOfRange("degree " + std::to_string(degree) + " outside [0, " +
                           std::to_string(ops.dim) + "]");
  }
  if (!(null_tol > 0.0) || !(null_tol < 1.0)) {
    throw InvalidParameter("null_tol must lie in (0, 1)");
  }
  const auto& A = ops.laplacian_sym[static_cast<std::size_t>(degree)];
  const auto& s = star.weights[static_cast<std::size_t>(degree)];
  const Index n = A.rows();

  Spectrum sp = (n <= kDenseCutoff) ? dense_spectrum(A, s) : sparse_spectrum(A, s, degree, null_tol);
  return classify(sp, s, degree, ops.complex_id, null_tol, n);
}

Cochain harmonic_project(const Cochain& v, const HarmonicBasis& basis, const MetricStar& star) {
  if (v.complex_id != basis.complex_id || star.complex_id != basis.complex_id) {
    throw ComplexMismatch("projection operands live on different complexes");
  }
  if (v.degree != basis.degree) {
    throw DegreeMismatch("cochain degree " + std::to_string(v.degree) +
                         " does not match basis degree " + std::to_string(basis.degree));
  }
  Cochain out{v.degree, v.complex_id, Eigen::VectorXd::Zero(v.values.size())};
  if (basis.dimension() > 0) {
    const auto& s = star.weights[static_cast<std::size_t>(v.degree)];
    Eigen::VectorXd coeffs = basis.vectors.transpose() * s.cwiseProduct(v.values);
    out.values = basis.vectors * coeffs;
  }
  return out;
}

}  // namespace hodgedec
