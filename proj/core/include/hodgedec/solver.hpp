#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hodgedec/cover.hpp"
#include "hodgedec/harmonic.hpp"
#include "hodgedec/simplicial_complex.hpp"

namespace hodgedec {

struct SolverConfig {
  int max_steps = 20;           // cap on correction steps
  double residual_tol = 1e-10;  // relative residual target of the stepping phase
  double coarse_tol = 1e-12;    // relative residual target of the coarse solve
  Index coarse_max_iters = 10000;
  double tikhonov_eps = 1e-10;  // shift for singular patch systems
  bool post_project = true;     // subtract the harmonic part of the final solution
  std::uint64_t rng_seed = 0;
};

/// Diagnostics for one correction step. `residual_norm` is the norm of
/// the residual the step produced; `telescoping_defect` is the norm of
/// L(sum_{j<=k} (-1)^j v_j) - omega - (-1)^k omega_{k+1}, which vanishes
/// by construction up to local solver accuracy; `harmonic_leak` is the
/// relative harmonic component of the produced residual before it is
/// projected away.
struct StepRecord {
  int k = 0;
  double residual_norm = 0.0;
  double telescoping_defect = 0.0;
  double harmonic_leak = 0.0;
};

struct RaisingStepsReport {
  std::vector<StepRecord> steps;
  Index coarse_iters = 0;
  double final_residual = 0.0;      // relative to the input norm
  double contraction_ratio = 0.0;   // max observed step-to-step residual ratio
  double wall_ms = 0.0;
  double wall_ms_local = 0.0;
  double wall_ms_coarse = 0.0;
};

/// Serializes a report; wall_* fields are the only nondeterministic ones.
std::string report_to_json(const RaisingStepsReport& report, int indent = 2);

/// Residual grew by more than a fixed factor in one step. Carries the
/// records accumulated so far.
struct ResidualDivergence : Error {
  RaisingStepsReport report;
  ResidualDivergence(const std::string& what, RaisingStepsReport r)
      : Error(what), report(std::move(r)) {}
};

/**
 * Solves the Laplace system restricted to one patch: the principal
 * submatrix on the patch's degree-p simplices, right hand side restricted
 * there, solution extended by zero. A numerically singular restriction is
 * shifted by tikhonov_eps times the star weights; iterative refinement
 * then removes the shift's effect up to the kernel component.
 */
Cochain local_solve(const CoverPatch& patch, const Cochain& omega, const Operators& ops,
                    const MetricStar& star, const SolverConfig& cfg);

struct CoarseSolveResult {
  Cochain w;
  Index iterations = 0;
  double residual = 0.0;  // relative, measured against the deflated right hand side
};

/**
 * Conjugate gradients on the orthogonal complement of the harmonic space
 * in the star-weighted inner product, re-projecting every iterate.
 * Demands an input with relative harmonic component at most 1e-8.
 */
CoarseSolveResult coarse_solve(const Cochain& omega, const Operators& ops,
                               const MetricStar& star, const HarmonicBasis& basis,
                               const SolverConfig& cfg);

/// Factorization-based reference solve of the same deflated system,
/// through an augmented indefinite system enforcing orthogonality to the
/// harmonic space. Algorithmically independent of the iterative path.
Cochain direct_solve(const Cochain& omega, const Operators& ops, const MetricStar& star,
                     const HarmonicBasis& basis);

struct RaisingStepsResult {
  Cochain u;          // alternating sum of the glued patch solutions
  Cochain residual;   // signed leftover: L(u) = omega + residual
  RaisingStepsReport report;
};

/**
 * Alternating-sign residual correction over the cover: each step solves
 * the current residual on every patch, glues with the partition of unity,
 * and replaces the residual by the glued commutator total. Stops when the
 * residual falls below residual_tol (relative) or after max_steps; a
 * tenfold one-step growth raises ResidualDivergence.
 */
RaisingStepsResult raising_steps(const Cochain& omega, const Cover& cover, const Operators& ops,
                                 const MetricStar& star, const HarmonicBasis& basis,
                                 const SolverConfig& cfg);

struct SolveResult {
  Cochain v;
  RaisingStepsReport report;
};

/// Correction steps followed by a coarse solve of the leftover residual;
/// the difference solves L(v) = omega on the harmonic complement.
SolveResult solve_with_threshold(const Cochain& omega, const Cover& cover, const Operators& ops,
                                 const MetricStar& star, const HarmonicBasis& basis,
                                 const SolverConfig& cfg);

struct NeumannResult {
  Eigen::VectorXd v;
  std::vector<double> gamma_norms;  // norms of the successive right hand sides
  int terms = 0;
};

/**
 * Alternating perturbation series for (L0 + A) v = gamma given a solver
 * for L0: v_k solves the k-th right hand side, which is then replaced by
 * A v_k. Converges when A is a contraction relative to L0; a measured
 * ratio at or above contraction_cap three steps in a row raises
 * ContractionFailure.
 */
NeumannResult neumann_perturbation_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& base_solver,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& perturbation,
    const Eigen::VectorXd& gamma, double contraction_cap, const SolverConfig& cfg,
    int max_terms = 1000);

struct HodgeDecomposition {
  Cochain harmonic;
  Cochain exact;    // image of d applied to the codifferential of the potential
  Cochain coexact;  // codifferential of d applied to the potential
  RaisingStepsReport report;
};

/// Splits omega into harmonic, exact and coexact parts through the
/// potential solving L(u) = omega - harmonic(omega).
HodgeDecomposition hodge_decompose(const Cochain& omega, const Cover& cover,
                                   const Operators& ops, const MetricStar& star,
                                   const HarmonicBasis& basis, const SolverConfig& cfg);

/**
 * Zero-extends a domain cochain over the double and subtracts a harmonic
 * correction supported on the mirror half so the result is orthogonal to
 * every harmonic basis vector. The correction coefficients solve the Gram
 * system of the mirror-restricted basis; a numerically singular Gram
 * matrix raises SingularGram. On the domain the output equals the input.
 */
Cochain extend_orthogonal(const Cochain& omega, const SimplicialComplex& doubled,
                          const DomainEmbedding& embedding, const HarmonicBasis& basis,
                          const MetricStar& doubled_star);

struct DomainSolveConfig {
  SolverConfig solver;
  int radius_hops = 4;
  int overlap_hops = 1;
  double null_tol = 1e-8;
};

struct DomainSolveResult {
  Cochain u;                     // solution restricted to the domain
  RaisingStepsReport report;
  double interior_residual = 0.0;  // residual norm over rows untouched by the mirror half
  double rhs_norm = 0.0;           // norm of the zero-extended right hand side
  Index num_interior = 0;
};

/// Poisson solve on a manifold with boundary: double it, build the
/// harmonic basis of the double, extend the right hand side orthogonally,
/// solve there, restrict back.
DomainSolveResult solve_on_domain(const Cochain& omega, const SimplicialComplex& domain,
                                  const DomainSolveConfig& cfg);

}  // namespace hodgedec
