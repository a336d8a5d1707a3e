#include <json.hpp>

#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "hodgedec/solver.hpp"
#include "solver_internal.hpp"

namespace hodgedec {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

RaisingStepsResult raising_steps(const Cochain& omega, const Cover& cover, const Operators& ops,
                                 const MetricStar& star, const HarmonicBasis& basis,
                                 const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  detail::check_cochain(omega, ops, star, "raising_steps");
  detail::check_basis(basis, omega, "raising_steps");
  detail::check_config(cfg);
  if (cover.complex_id != ops.complex_id) {
    throw ComplexMismatch("raising_steps: cover built on a different complex");
  }
  if (cover.patches.empty() || cover.chi.size() != cover.patches.size()) {
    throw InvalidParameter("raising_steps: cover has no patches or mismatched weights");
  }

  const auto p = static_cast<std::size_t>(omega.degree);
  const Eigen::SparseMatrix<double>& A = ops.laplacian_sym[p];
  const Eigen::SparseMatrix<double>& L = ops.laplacian[p];
  const Eigen::VectorXd& s = star.weights[p];
  const Index n = omega.values.size();
  const std::size_t num_patches = cover.patches.size();

  RaisingStepsResult out;
  out.u = Cochain{omega.degree, omega.complex_id, Eigen::VectorXd::Zero(n)};
  out.residual = Cochain{omega.degree, omega.complex_id, Eigen::VectorXd::Zero(n)};

  const double wn = detail::weighted_norm(omega.values, s);
  if (wn == 0.0) {
    out.report.wall_ms = ms_since(t0);
    return out;
  }
  {
    Eigen::VectorXd probe = omega.values;
    const double hn = detail::deflate_harmonic(probe, basis, s);
    if (hn > 1e-8 * wn) {
      std::ostringstream msg;
      msg << "raising_steps: input has relative harmonic component " << hn / wn
          << ", above the 1e-08 compatibility bound";
      throw CompatibilityViolation(msg.str());
    }
  }

  // Per-patch data reused across steps: the factorized submatrix and the
  // partition weight averaged onto degree-p simplices.
  std::vector<detail::PatchSolver> solvers(num_patches);
  std::vector<Eigen::VectorXd> chi_p(num_patches);
  for (std::size_t j = 0; j < num_patches; ++j) {
    solvers[j].build(cover.patches[j].simplices[p], A, s, cfg.tikhonov_eps);
    chi_p[j] = ops.vertex_mean[p] * cover.chi[j].values;
  }

  Eigen::VectorXd u_total = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd omega_k = omega.values;
  double omega_k_norm = wn;
  double sign = 1.0;
  double last_sign = 1.0;
  RaisingStepsReport report;

  std::vector<Eigen::VectorXd> u_loc(num_patches);
  for (int k = 0; k < cfg.max_steps; ++k) {
    const auto t_local = Clock::now();
    const Eigen::VectorXd rhs_full = s.cwiseProduct(omega_k);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long jj = 0; jj < static_cast<long long>(num_patches); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      const auto& rows = solvers[j].rows();
      Eigen::VectorXd b(static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) b[static_cast<Index>(i)] = rhs_full[rows[i]];
      u_loc[j] = solvers[j].solve(b);
    }
    report.wall_ms_local += ms_since(t_local);

    // Patch-index-ordered reductions keep runs bit-reproducible.
    Eigen::VectorXd v_k = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd chi_su = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd uj_full(n);
    for (std::size_t j = 0; j < num_patches; ++j) {
      const auto& rows = solvers[j].rows();
      uj_full.setZero();
      for (std::size_t i = 0; i < rows.size(); ++i) uj_full[rows[i]] = u_loc[j][static_cast<Index>(i)];
      const Eigen::VectorXd s_j = L * uj_full;
      v_k += chi_p[j].cwiseProduct(uj_full);
      chi_su += chi_p[j].cwiseProduct(s_j);
    }
    Eigen::VectorXd omega_next = L * v_k - chi_su;

    const double raw_norm = detail::weighted_norm(omega_next, s);
    const double leak = detail::deflate_harmonic(omega_next, basis, s);
    const double leak_rel = raw_norm > 0 ? leak / raw_norm : 0.0;
    const double next_norm = detail::weighted_norm(omega_next, s);

    u_total += sign * v_k;
    const Eigen::VectorXd defect_vec = L * u_total - omega.values - sign * omega_next;
    const double defect = detail::weighted_norm(defect_vec, s);

    report.steps.push_back({k, next_norm, defect, leak_rel});
    const double ratio = next_norm / omega_k_norm;
    if (ratio > report.contraction_ratio) report.contraction_ratio = ratio;

    last_sign = sign;
    omega_k = std::move(omega_next);
    omega_k_norm = next_norm;
    report.final_residual = omega_k_norm / wn;

    if (next_norm <= cfg.residual_tol * wn) break;
    if (ratio > 10.0) {
      report.wall_ms = ms_since(t0);
      std::ostringstream msg;
      msg << "raising_steps: residual grew by factor " << ratio << " at step " << k
          << "; the cover does not contract";
      throw ResidualDivergence(msg.str(), std::move(report));
    }
    sign = -sign;
  }

  out.u.values = std::move(u_total);
  out.residual.values = last_sign * omega_k;
  report.wall_ms = ms_since(t0);
  out.report = std::move(report);
  return out;
}

SolveResult solve_with_threshold(const Cochain& omega, const Cover& cover, const Operators& ops,
                                 const MetricStar& star, const HarmonicBasis& basis,
                                 const SolverConfig& cfg) {
  const auto t0 = Clock::now();
  RaisingStepsResult rs = raising_steps(omega, cover, ops, star, basis, cfg);

  const auto t_coarse = Clock::now();
  CoarseSolveResult cs = coarse_solve(rs.residual, ops, star, basis, cfg);
  const double coarse_ms = std::chrono::duration<double, std::milli>(Clock::now() - t_coarse).count();

  SolveResult out;
  out.v = rs.u - cs.w;
  const auto p = static_cast<std::size_t>(omega.degree);
  const Eigen::VectorXd& s = star.weights[p];
  if (cfg.post_project) {
    detail::deflate_harmonic(out.v.values, basis, s);
  }

  out.report = std::move(rs.report);
  out.report.coarse_iters = cs.iterations;
  out.report.wall_ms_coarse = coarse_ms;

  const double wn = detail::weighted_norm(omega.values, s);
  if (wn > 0) {
    const Eigen::VectorXd r = ops.laplacian[p] * out.v.values - omega.values;
    out.report.final_residual = detail::weighted_norm(r, s) / wn;
  } else {
    out.report.final_residual = 0.0;
  }
  out.report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return out;
}

std::string report_to_json(const RaisingStepsReport& report, int indent) {
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const StepRecord& st : report.steps) {
    steps.push_back({{"k", st.k},
                     {"residual_norm", st.residual_norm},
                     {"telescoping_defect", st.telescoping_defect},
                     {"harmonic_leak", st.harmonic_leak}});
  }
  nlohmann::ordered_json j{{"steps", std::move(steps)},
                           {"coarse_iters", report.coarse_iters},
                           {"final_residual", report.final_residual},
                           {"contraction_ratio", report.contraction_ratio},
                           {"wall_ms", report.wall_ms},
                           {"wall_ms_local", report.wall_ms_local},
                           {"wall_ms_coarse", report.wall_ms_coarse}};
  return j.dump(indent);
}

}  // namespace hodgedec
