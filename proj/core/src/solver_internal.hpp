#pragma once

#include <Eigen/SparseCholesky>

#include <string>
#include <vector>

#include "hodgedec/solver.hpp"

namespace hodgedec::detail {

// Factorization of one patch's principal submatrix of the symmetrized
// Laplacian. A numerically singular submatrix gets a star-weighted
// Tikhonov shift; solve() then refines against the unshifted matrix, so
// the shift never shows up in the returned residual.
class PatchSolver {
 public:
  void build(const std::vector<Index>& rows, const Eigen::SparseMatrix<double>& lap_sym,
             const Eigen::VectorXd& star_weights, double tikhonov_eps);

  // b indexed like rows(); returns x with the submatrix applied to x
  // matching b up to the refinement floor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  const std::vector<Index>& rows() const { return rows_; }
  bool shifted() const { return shifted_; }

 private:
  std::vector<Index> rows_;
  Eigen::SparseMatrix<double> a_sub_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool shifted_ = false;
};

void check_cochain(const Cochain& c, const Operators& ops, const MetricStar& star,
                   const char* who);
void check_basis(const HarmonicBasis& basis, const Cochain& c, const char* who);
void check_config(const SolverConfig& cfg);

// Subtracts the harmonic component in place; returns its norm.
double deflate_harmonic(Eigen::VectorXd& v, const HarmonicBasis& basis,
                        const Eigen::VectorXd& star_weights);

inline double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& s) {
  return std::sqrt(v.cwiseProduct(s).dot(v));
}

}  // namespace hodgedec::detail
