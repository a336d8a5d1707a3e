#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

#include "hodgedec/simplicial_complex.hpp"

namespace hodgedec {

/// Real-valued p-cochain: one value per oriented p-simplex.
struct Cochain {
  int degree = 0;
  std::uint64_t complex_id = 0;
  Eigen::VectorXd values;
};

Cochain zero_cochain(const SimplicialComplex& K, int p);
/// Deterministic cochain with independent uniform(-1, 1) entries.
Cochain random_cochain(const SimplicialComplex& K, int p, std::uint64_t seed);

Cochain operator+(const Cochain& a, const Cochain& b);
Cochain operator-(const Cochain& a, const Cochain& b);
Cochain operator*(double s, const Cochain& a);

/// Diagonal Hodge star: per p-simplex the ratio of barycentric dual-cell
/// volume to primal volume. All weights are positive.
struct MetricStar {
  std::uint64_t complex_id = 0;
  std::vector<Eigen::VectorXd> weights;  // [p]
};

/**
 * Builds the diagonal star weights from the complex metric (explicit edge
 * lengths when present, embedded coordinates otherwise). Volumes come
 * from a local isometric embedding of each top simplex, so the result
 * depends only on the intrinsic metric.
 */
MetricStar build_metric_star(const SimplicialComplex& K);

/// Weighted L2 pairing of two cochains of equal degree.
double inner_product(const Cochain& a, const Cochain& b, const MetricStar& star);
double norm(const Cochain& a, const MetricStar& star);

/**
 * Assembled operator matrices for every degree of one complex.
 *
 * `d[p]` is the exterior derivative (transpose of the signed incidence of
 * degree p+1), `codiff[p]` its formal adjoint in the star-weighted inner
 * product, `laplacian[p] = d codiff + codiff d`. `laplacian_sym[p]` is
 * star[p] * laplacian[p], symmetrized; it is the matrix to factor, since
 * self-adjointness holds exactly for it. `vertex_mean[p]` averages a
 * vertex function over the vertices of each p-simplex.
 */
struct Operators {
  std::uint64_t complex_id = 0;
  int dim = 0;
  std::vector<Eigen::SparseMatrix<double>> d;
  std::vector<Eigen::SparseMatrix<double>> codiff;
  std::vector<Eigen::SparseMatrix<double>> laplacian;
  std::vector<Eigen::SparseMatrix<double>> laplacian_sym;
  std::vector<Eigen::SparseMatrix<double>> vertex_mean;
};

Operators build_operators(const SimplicialComplex& K, const MetricStar& star);

/// d: p-cochains to (p+1)-cochains; rejects the top degree.
Cochain exterior_derivative(const Cochain& omega, const Operators& ops);
/// Formal adjoint of d: p-cochains to (p-1)-cochains; rejects degree 0.
Cochain codifferential(const Cochain& omega, const Operators& ops);
Cochain hodge_laplacian(const Cochain& omega, const Operators& ops);

/// Product of a vertex function with a p-cochain by vertex averaging:
/// (chi * u)(s) = mean of chi over the vertices of s, times u(s).
Cochain scalar_multiply(const Cochain& chi, const Cochain& u, const Operators& ops);

}  // namespace hodgedec
