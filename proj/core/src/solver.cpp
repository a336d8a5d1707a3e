#include "hodgedec/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <sstream>

#include "solver_internal.hpp"

namespace hodgedec {
namespace detail {

void check_cochain(const Cochain& c, const Operators& ops, const MetricStar& star,
                   const char* who) {
  if (c.complex_id != ops.complex_id || star.complex_id != ops.complex_id) {
    throw ComplexMismatch(std::string(who) + ": cochain and operators belong to different complexes");
  }
  if (c.degree < 0 || c.degree > ops.dim) {
    throw DegreeOutOfRange(std::string(who) + ": degree " + std::to_string(c.degree) +
                           " outside [0, " + std::to_string(ops.dim) + "]");
  }
  if (c.values.size() != star.weights[static_cast<std::size_t>(c.degree)].size()) {
    throw InvalidParameter(std::string(who) + ": cochain length does not match the complex");
  }
}

void check_basis(const HarmonicBasis& basis, const Cochain& c, const char* who) {
  if (basis.complex_id != c.complex_id) {
    throw ComplexMismatch(std::string(who) + ": harmonic basis from a different complex");
  }
  if (basis.degree != c.degree) {
    throw DegreeMismatch(std::string(who) + ": harmonic basis degree " +
                         std::to_string(basis.degree) + ", cochain degree " +
                         std::to_string(c.degree));
  }
}

void check_config(const SolverConfig& cfg) {
  if (cfg.max_steps < 1) throw InvalidParameter("max_steps must be at least 1");
  if (!(cfg.residual_tol > 0) || !(cfg.coarse_tol > 0) || !(cfg.tikhonov_eps > 0)) {
    throw InvalidParameter("solver tolerances must be positive");
  }
  if (cfg.coarse_max_iters < 1) throw InvalidParameter("coarse_max_iters must be at least 1");
}

double deflate_harmonic(Eigen::VectorXd& v, const HarmonicBasis& basis,
                        const Eigen::VectorXd& s) {
  if (basis.dimension() == 0) return 0.0;
  Eigen::VectorXd coeffs = basis.vectors.transpose() * s.cwiseProduct(v);
  Eigen::VectorXd h = basis.vectors * coeffs;
  v -= h;
  return weighted_norm(h, s);
}

void PatchSolver::build(const std::vector<Index>& rows, const Eigen::SparseMatrix<double>& lap_sym,
                        const Eigen::VectorXd& star_weights, double tikhonov_eps) {
  rows_ = rows;
  shifted_ = false;
  const Index n_sub = static_cast<Index>(rows_.size());
  if (n_sub == 0) {
    a_sub_.resize(0, 0);
    return;
  }
  std::vector<Index> local(static_cast<std::size_t>(lap_sym.rows()), -1);
  for (Index i = 0; i < n_sub; ++i) local[static_cast<std::size_t>(rows_[i])] = i;

  std::vector<Eigen::Triplet<double>> trips;
  for (Index jl = 0; jl < n_sub; ++jl) {
    const Index jg = rows_[static_cast<std::size_t>(jl)];
    for (Eigen::SparseMatrix<double>::InnerIterator it(lap_sym, jg); it; ++it) {
      const Index il = local[static_cast<std::size_t>(it.row())];
      if (il >= 0) trips.emplace_back(static_cast<int>(il), static_cast<int>(jl), it.value());
    }
  }
  a_sub_.resize(n_sub, n_sub);
  a_sub_.setFromTriplets(trips.begin(), trips.end());

  ldlt_.compute(a_sub_);
  bool singular = ldlt_.info() != Eigen::Success;
  if (!singular) {
    const Eigen::VectorXd d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    singular = !(dmax > 0) || d.minCoeff() <= 0 || dmin <= 1e-12 * dmax;
  }
  if (singular) {
    std::vector<Eigen::Triplet<double>> diag_trips;
    diag_trips.reserve(static_cast<std::size_t>(n_sub));
    for (Index i = 0; i < n_sub; ++i) {
      diag_trips.emplace_back(static_cast<int>(i), static_cast<int>(i),
                              tikhonov_eps * star_weights[rows_[static_cast<std::size_t>(i)]]);
    }
    Eigen::SparseMatrix<double> diag(n_sub, n_sub);
    diag.setFromTriplets(diag_trips.begin(), diag_trips.end());
    Eigen::SparseMatrix<double> shifted = a_sub_ + diag;
    ldlt_.compute(shifted);
    if (ldlt_.info() != Eigen::Success) {
      throw FactorizationFailure("patch system factorization failed even with Tikhonov shift");
    }
    shifted_ = true;
  }
}

Eigen::VectorXd PatchSolver::solve(const Eigen::VectorXd& b) const {
  if (rows_.empty()) return Eigen::VectorXd();
  Eigen::VectorXd x = ldlt_.solve(b);
  const double bn = b.norm();
  if (bn == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b - a_sub_ * x;
  double rn = r.norm();
  for (int pass = 0; pass < 4 && rn > 1e-15 * bn; ++pass) {
    Eigen::VectorXd xc = x + ldlt_.solve(r).eval();
    Eigen::VectorXd rc = b - a_sub_ * xc;
    const double rcn = rc.norm();
    if (rcn >= rn) break;
    x.swap(xc);
    r.swap(rc);
    const bool stalled = rcn > 0.5 * rn;
    rn = rcn;
    if (stalled) break;
  }
  return x;
}

}  // namespace detail

Cochain local_solve(const CoverPatch& patch, const Cochain& omega, const Operators& ops,
                    const MetricStar& star, const SolverConfig& cfg) {
  detail::check_cochain(omega, ops, star, "local_solve");
  detail::check_config(cfg);
  const auto p = static_cast<std::size_t>(omega.degree);
  if (patch.simplices.size() <= p) {
    throw InvalidParameter("local_solve: patch carries no simplex sets at this degree");
  }
  detail::PatchSolver ps;
  ps.build(patch.simplices[p], ops.laplacian_sym[p], star.weights[p], cfg.tikhonov_eps);

  const Eigen::VectorXd rhs_full = star.weights[p].cwiseProduct(omega.values);
  const auto& rows = ps.rows();
  Eigen::VectorXd b(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) b[static_cast<Index>(i)] = rhs_full[rows[i]];

  Cochain u{omega.degree, omega.complex_id,
            Eigen::VectorXd::Zero(omega.values.size())};
  const Eigen::VectorXd x = ps.solve(b);
  for (std::size_t i = 0; i < rows.size(); ++i) u.values[rows[i]] = x[static_cast<Index>(i)];
  return u;
}

CoarseSolveResult coarse_solve(const Cochain& omega, const Operators& ops,
                               const MetricStar& star, const HarmonicBasis& basis,
                               const SolverConfig& cfg) {
  detail::check_cochain(omega, ops, star, "coarse_solve");
  detail::check_basis(basis, omega, "coarse_solve");
  detail::check_config(cfg);

  const auto p = static_cast<std::size_t>(omega.degree);
  const Eigen::SparseMatrix<double>& A = ops.laplacian_sym[p];
  const Eigen::VectorXd& s = star.weights[p];

  CoarseSolveResult out;
  out.w = Cochain{omega.degree, omega.complex_id,
                  Eigen::VectorXd::Zero(omega.values.size())};

  const double wn = detail::weighted_norm(omega.values, s);
  if (wn == 0.0) return out;

  Eigen::VectorXd b = omega.values;
  const double hn = detail::deflate_harmonic(b, basis, s);
  if (hn > 1e-8 * wn) {
    std::ostringstream msg;
    msg << "coarse_solve: input has relative harmonic component " << hn / wn
        << ", above the 1e-08 compatibility bound";
    throw CompatibilityViolation(msg.str());
  }
  const double bn = detail::weighted_norm(b, s);
  if (bn == 0.0) return out;
  const double target = cfg.coarse_tol * bn;

  auto deflate = [&](Eigen::VectorXd& v) {
    if (basis.dimension() > 0) {
      v -= basis.vectors * (basis.vectors.transpose() * s.cwiseProduct(v)).eval();
    }
  };
  auto true_residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r = b - (A * x).cwiseQuotient(s);
    deflate(r);
    return r;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p_dir = r;
  double rs = r.cwiseProduct(s).dot(r);
  Index iters = 0;
  int restarts = 0;
  double final_rel = 0.0;

  while (true) {
    if (std::sqrt(rs) <= target) {
      Eigen::VectorXd tr = true_residual(x);
      const double trn = detail::weighted_norm(tr, s);
      if (trn <= target) {
        final_rel = trn / bn;
        break;
      }
      if (restarts >= 3) {
        std::ostringstream msg;
        msg << "coarse_solve: recurrence/true residual mismatch persists after " << restarts
            << " restarts (relative residual " << trn / bn << ")";
        throw NoConvergence(msg.str());
      }
      ++restarts;
      r = tr;
      p_dir = r;
      rs = r.cwiseProduct(s).dot(r);
      continue;
    }
    if (iters >= cfg.coarse_max_iters) {
      std::ostringstream msg;
      msg << "coarse_solve: no convergence in " << iters << " iterations (relative residual "
          << std::sqrt(rs) / bn << ", target " << cfg.coarse_tol << ")";
      throw NoConvergence(msg.str());
    }
    const Eigen::VectorXd Ap = A * p_dir;
    const double denom = p_dir.dot(Ap);
    if (!(denom > 0)) {
      if (restarts >= 3) {
        throw NoConvergence("coarse_solve: search direction degenerated repeatedly");
      }
      ++restarts;
      r = true_residual(x);
      p_dir = r;
      rs = r.cwiseProduct(s).dot(r);
      continue;
    }
    const double alpha = rs / denom;
    x += alpha * p_dir;
    r -= alpha * Ap.cwiseQuotient(s);
    deflate(r);
    const double rs_next = r.cwiseProduct(s).dot(r);
    p_dir = r + (rs_next / rs) * p_dir;
    rs = rs_next;
    ++iters;
  }

  deflate(x);
  out.w.values = std::move(x);
  out.iterations = iters;
  out.residual = final_rel;
  return out;
}

Cochain direct_solve(const Cochain& omega, const Operators& ops, const MetricStar& star,
                     const HarmonicBasis& basis) {
  detail::check_cochain(omega, ops, star, "direct_solve");
  detail::check_basis(basis, omega, "direct_solve");

  const auto p = static_cast<std::size_t>(omega.degree);
  const Eigen::SparseMatrix<double>& A = ops.laplacian_sym[p];
  const Eigen::VectorXd& s = star.weights[p];
  const Index n = omega.values.size();
  const Index K = basis.dimension();

  Eigen::VectorXd b = omega.values;
  detail::deflate_harmonic(b, basis, s);
  Eigen::VectorXd rhs = s.cwiseProduct(b);

  Eigen::VectorXd x;
  if (K == 0) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) {
      throw FactorizationFailure("direct_solve: factorization of the full system failed");
    }
    x = lu.solve(rhs);
  } else {
    // Augmented system: the multiplier block pins the solution to the
    // orthogonal complement of the harmonic space.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * static_cast<std::size_t>(n * K));
    for (Index j = 0; j < A.outerSize(); ++j) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, j); it; ++it) {
        trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
      }
    }
    for (Index j = 0; j < K; ++j) {
      const Eigen::VectorXd q = s.cwiseProduct(basis.vectors.col(j));
      for (Index i = 0; i < n; ++i) {
        if (q[i] != 0.0) {
          trips.emplace_back(static_cast<int>(i), static_cast<int>(n + j), q[i]);
          trips.emplace_back(static_cast<int>(n + j), static_cast<int>(i), q[i]);
        }
      }
    }
    Eigen::SparseMatrix<double> kkt(n + K, n + K);
    kkt.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs_aug = Eigen::VectorXd::Zero(n + K);
    rhs_aug.head(n) = rhs;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(kkt);
    if (lu.info() != Eigen::Success) {
      throw FactorizationFailure("direct_solve: factorization of the augmented system failed");
    }
    x = lu.solve(rhs_aug).head(n);
  }

  detail::deflate_harmonic(x, basis, s);
  return Cochain{omega.degree, omega.complex_id, std::move(x)};
}

NeumannResult neumann_perturbation_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& base_solver,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& perturbation,
    const Eigen::VectorXd& gamma, double contraction_cap, const SolverConfig& cfg,
    int max_terms) {
  if (!(contraction_cap > 0)) throw InvalidParameter("contraction cap must be positive");
  if (max_terms < 1) throw InvalidParameter("max_terms must be at least 1");
  if (!(cfg.residual_tol > 0)) throw InvalidParameter("residual_tol must be positive");

  NeumannResult out;
  out.v = Eigen::VectorXd::Zero(gamma.size());
  const double g0 = gamma.norm();
  out.gamma_norms.push_back(g0);
  if (g0 == 0.0) return out;

  Eigen::VectorXd g = gamma;
  double gn_prev = g0;
  double sign = 1.0;
  int bad = 0;
  for (int k = 0; k < max_terms; ++k) {
    const Eigen::VectorXd vk = base_solver(g);
    if (vk.size() != gamma.size()) {
      throw InvalidParameter("neumann_perturbation_solve: base solver changed the dimension");
    }
    out.v += sign * vk;
    Eigen::VectorXd gnext = perturbation(vk);
    if (gnext.size() != gamma.size()) {
      throw InvalidParameter("neumann_perturbation_solve: perturbation changed the dimension");
    }
    const double gn = gnext.norm();
    out.gamma_norms.push_back(gn);
    out.terms = k + 1;
    if (gn <= cfg.residual_tol * g0) return out;
    const double ratio =
        gn_prev > 0 ? gn / gn_prev : std::numeric_limits<double>::infinity();
    bad = ratio >= contraction_cap ? bad + 1 : 0;
    if (bad >= 3) {
      std::ostringstream msg;
      msg << "perturbation series is not contracting: ratio " << ratio << " >= cap "
          << contraction_cap << " for 3 consecutive terms (after " << out.terms << " terms)";
      throw ContractionFailure(msg.str());
    }
    g.swap(gnext);
    gn_prev = gn;
    sign = -sign;
  }
  std::ostringstream msg;
  msg << "perturbation series: residual " << gn_prev / g0 << " of the input after " << max_terms
      << " terms, target " << cfg.residual_tol;
  throw NoConvergence(msg.str());
}

}  // namespace hodgedec
