#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <vector>

#include "hodgedec/solver.hpp"
#include "solver_internal.hpp"

namespace hodgedec {

HodgeDecomposition hodge_decompose(const Cochain& omega, const Cover& cover,
                                   const Operators& ops, const MetricStar& star,
                                   const HarmonicBasis& basis, const SolverConfig& cfg) {
  detail::check_cochain(omega, ops, star, "hodge_decompose");
  detail::check_basis(basis, omega, "hodge_decompose");
  const int p = omega.degree;
  const Index n = omega.values.size();

  HodgeDecomposition out;
  out.harmonic = harmonic_project(omega, basis, star);
  Cochain rem = omega - out.harmonic;

  SolveResult sr = solve_with_threshold(rem, cover, ops, star, basis, cfg);
  out.report = std::move(sr.report);

  if (p >= 1) {
    out.exact = exterior_derivative(codifferential(sr.v, ops), ops);
  } else {
    out.exact = Cochain{p, omega.complex_id, Eigen::VectorXd::Zero(n)};
  }
  if (p < ops.dim) {
    out.coexact = codifferential(exterior_derivative(sr.v, ops), ops);
  } else {
    out.coexact = Cochain{p, omega.complex_id, Eigen::VectorXd::Zero(n)};
  }
  return out;
}

Cochain extend_orthogonal(const Cochain& omega, const SimplicialComplex& doubled,
                          const DomainEmbedding& embedding, const HarmonicBasis& basis,
                          const MetricStar& doubled_star) {
  if (basis.complex_id != doubled.id() || doubled_star.complex_id != doubled.id()) {
    throw ComplexMismatch("extend_orthogonal: basis or star not built on the double");
  }
  const int p = omega.degree;
  if (p < 0 || p > doubled.dim()) {
    throw DegreeOutOfRange("extend_orthogonal: degree " + std::to_string(p));
  }
  if (basis.degree != p) {
    throw DegreeMismatch("extend_orthogonal: basis degree " + std::to_string(basis.degree) +
                         ", cochain degree " + std::to_string(p));
  }
  const auto& dom = embedding.domain_simplices[static_cast<std::size_t>(p)];
  if (omega.values.size() != static_cast<Index>(dom.size())) {
    throw InvalidParameter("extend_orthogonal: cochain length does not match the embedded domain");
  }

  const Index n = doubled.num_simplices(p);
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < dom.size(); ++i) ext[dom[i]] = omega.values[static_cast<Index>(i)];

  const Index K = basis.dimension();
  if (K == 0) return Cochain{p, doubled.id(), std::move(ext)};

  const Eigen::VectorXd& s = doubled_star.weights[static_cast<std::size_t>(p)];
  const Eigen::VectorXd lambda = basis.vectors.transpose() * s.cwiseProduct(ext);

  // Basis restricted to the mirror half (domain rows zeroed); the shared
  // boundary simplices count as domain.
  Eigen::MatrixXd mirror_basis = basis.vectors;
  for (Index idx : dom) mirror_basis.row(idx).setZero();
  const Eigen::MatrixXd gram =
      mirror_basis.transpose() * s.asDiagonal() * mirror_basis;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  lu.setThreshold(basis.gram_tolerance);
  if (lu.rank() < K) {
    std::ostringstream msg;
    msg << "extend_orthogonal: mirror-restricted Gram matrix is singular (rank " << lu.rank()
        << " of " << K << ")";
    throw SingularGram(msg.str());
  }
  const Eigen::VectorXd mu = lu.solve(lambda);
  ext -= mirror_basis * mu;
  return Cochain{p, doubled.id(), std::move(ext)};
}

DomainSolveResult solve_on_domain(const Cochain& omega, const SimplicialComplex& domain,
                                  const DomainSolveConfig& cfg) {
  if (omega.complex_id != domain.id()) {
    throw ComplexMismatch("solve_on_domain: cochain from a different complex");
  }
  const int p = omega.degree;
  if (p < 0 || p > domain.dim()) {
    throw DegreeOutOfRange("solve_on_domain: degree " + std::to_string(p));
  }
  if (omega.values.size() != domain.num_simplices(p)) {
    throw InvalidParameter("solve_on_domain: cochain length does not match the complex");
  }
  if (!domain.has_boundary()) {
    throw ClosedInputError("solve_on_domain: input is closed; solve on it directly");
  }
  detail::check_config(cfg.solver);

  DoubledComplex dbl = riemannian_double(domain);
  const SimplicialComplex& D = dbl.complex;
  const MetricStar star_D = build_metric_star(D);
  const Operators ops_D = build_operators(D, star_D);
  const HarmonicBasis basis_D = harmonic_basis(ops_D, star_D, p, cfg.null_tol);

  Cochain ext = extend_orthogonal(omega, D, dbl.embedding, basis_D, star_D);
  Cover cover_D = build_cover(D, cfg.radius_hops, cfg.overlap_hops, cfg.solver.rng_seed);
  SolveResult sr = solve_with_threshold(ext, cover_D, ops_D, star_D, basis_D, cfg.solver);

  const auto& dom = dbl.embedding.domain_simplices[static_cast<std::size_t>(p)];
  DomainSolveResult out;
  out.u = Cochain{p, domain.id(), Eigen::VectorXd(static_cast<Index>(dom.size()))};
  for (std::size_t i = 0; i < dom.size(); ++i) {
    out.u.values[static_cast<Index>(i)] = sr.v.values[dom[i]];
  }
  out.report = std::move(sr.report);

  const Eigen::VectorXd& s = star_D.weights[static_cast<std::size_t>(p)];
  out.rhs_norm = detail::weighted_norm(ext.values, s);

  // Interior rows: domain rows whose Laplacian stencil never reaches a
  // mirror-side value, so their residual is meaningful for the restriction.
  const Eigen::SparseMatrix<double>& A = ops_D.laplacian_sym[static_cast<std::size_t>(p)];
  const Index n_D = D.num_simplices(p);
  std::vector<char> in_domain(static_cast<std::size_t>(n_D), 0);
  for (Index idx : dom) in_domain[static_cast<std::size_t>(idx)] = 1;
  std::vector<char> interior = in_domain;
  for (Index j = 0; j < A.outerSize(); ++j) {
    if (in_domain[static_cast<std::size_t>(j)]) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
      interior[static_cast<std::size_t>(it.row())] = 0;
    }
  }

  const Eigen::VectorXd r =
      ops_D.laplacian[static_cast<std::size_t>(p)] * sr.v.values - ext.values;
  double acc = 0.0;
  Index count = 0;
  for (Index i = 0; i < n_D; ++i) {
    if (interior[static_cast<std::size_t>(i)]) {
      acc += s[i] * r[i] * r[i];
      ++count;
    }
  }
  out.interior_residual = std::sqrt(acc);
  out.num_interior = count;
  return out;
}

}  // namespace hodgedec
