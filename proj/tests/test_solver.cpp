#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>
#include <vector>

#include "hodgedec/cover.hpp"
#include "hodgedec/dec.hpp"
#include "hodgedec/harmonic.hpp"
#include "hodgedec/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace hodgedec;

namespace {

struct Setup {
  SimplicialComplex K;
  MetricStar star;
  Operators ops;
};

Setup make(SimplicialComplex K) {
  auto star = build_metric_star(K);
  auto ops = build_operators(K, star);
  return {std::move(K), std::move(star), std::move(ops)};
}

Cochain deflated_random(const Setup& s, const HarmonicBasis& basis, int p, std::uint64_t seed) {
  auto w = random_cochain(s.K, p, seed);
  return w + (-1.0) * harmonic_project(w, basis, s.star);
}

std::vector<int> hops_from(const SimplicialComplex& K, Index seed) {
  auto adj = K.vertex_adjacency();
  std::vector<int> dist(static_cast<std::size_t>(K.num_vertices()), -1);
  std::queue<Index> q;
  dist[static_cast<std::size_t>(seed)] = 0;
  q.push(seed);
  while (!q.empty()) {
    Index v = q.front();
    q.pop();
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

// A legal partition of unity that flips between 0 and 1 on neighboring
// vertices across the whole overlap band. The patch solves are fine; the
// gluing is as rough as the support constraint allows.
Cover checkerboard_cover(const SimplicialComplex& K, Index seed_a, Index seed_b, int radius) {
  Cover cover;
  cover.complex_id = K.id();
  cover.radius_hops = radius;
  cover.overlap_hops = 1;
  cover.patches = build_patches(K, {seed_a, seed_b}, radius, 1);
  auto da = hops_from(K, seed_a);
  auto db = hops_from(K, seed_b);
  Cochain chi0 = zero_cochain(K, 0);
  Cochain chi1 = zero_cochain(K, 0);
  for (Index v = 0; v < K.num_vertices(); ++v) {
    double c;
    if (da[static_cast<std::size_t>(v)] >= radius) {
      c = 0.0;
    } else if (db[static_cast<std::size_t>(v)] >= radius) {
      c = 1.0;
    } else {
      c = v % 2 == 0 ? 1.0 : 0.0;
    }
    chi0.values[v] = c;
    chi1.values[v] = 1.0 - c;
  }
  cover.chi = {chi0, chi1};
  return cover;
}

}  // namespace

TEST_CASE("local solve of the zero right hand side is zero") {
  auto s = make(generate_torus(8, 8));
  auto cover = build_cover(s.K, 2, 1, 0);
  SolverConfig cfg;
  auto u = local_solve(cover.patches[0], zero_cochain(s.K, 1), s.ops, s.star, cfg);
  CHECK(u.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("local solve matches a dense restriction oracle") {
  auto s = make(generate_torus(8, 8));
  auto cover = build_cover(s.K, 2, 1, 0);
  SolverConfig cfg;
  for (int p = 0; p <= 2; ++p) {
    const auto& patch = cover.patches[0];
    const auto& rows = patch.simplices[static_cast<std::size_t>(p)];
    REQUIRE(!rows.empty());
    auto omega = random_cochain(s.K, p, 60 + static_cast<std::uint64_t>(p));
    auto u = local_solve(patch, omega, s.ops, s.star, cfg);

    const Index m = static_cast<Index>(rows.size());
    Eigen::MatrixXd A_full = Eigen::MatrixXd(s.ops.laplacian_sym[static_cast<std::size_t>(p)]);
    Eigen::MatrixXd A_sub(m, m);
    Eigen::VectorXd b(m);
    for (Index i = 0; i < m; ++i) {
      b[i] = s.star.weights[static_cast<std::size_t>(p)][rows[static_cast<std::size_t>(i)]] *
             omega.values[rows[static_cast<std::size_t>(i)]];
      for (Index j = 0; j < m; ++j) {
        A_sub(i, j) = A_full(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
      }
    }
    Eigen::VectorXd x = A_sub.fullPivLu().solve(b);
    double err = 0;
    for (Index i = 0; i < m; ++i) {
      err = std::max(err, std::abs(u.values[rows[static_cast<std::size_t>(i)]] - x[i]));
    }
    CHECK(err <= 1e-10 * std::max(1.0, x.cwiseAbs().maxCoeff()));
    // Zero extension outside the patch.
    std::vector<char> inside(static_cast<std::size_t>(s.K.num_simplices(p)), 0);
    for (Index r : rows) inside[static_cast<std::size_t>(r)] = 1;
    for (Index i = 0; i < s.K.num_simplices(p); ++i) {
      if (!inside[static_cast<std::size_t>(i)]) CHECK(u.values[i] == 0.0);
    }
  }
}

TEST_CASE("local solve handles a singular whole-manifold patch") {
  auto s = make(generate_torus(8, 8));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 99, 1, 0);
  REQUIRE(cover.patches.size() == 1);
  SolverConfig cfg;
  auto omega = deflated_random(s, basis, 1, 71);
  auto u = local_solve(cover.patches[0], omega, s.ops, s.star, cfg);
  const auto& A = s.ops.laplacian_sym[1];
  Eigen::VectorXd rhs = s.star.weights[1].cwiseProduct(omega.values);
  CHECK((A * u.values - rhs).norm() <= 1e-9 * rhs.norm());
}

TEST_CASE("coarse solve recovers a manufactured potential") {
  auto s = make(generate_torus(8, 8));
  SolverConfig cfg;
  for (int p = 0; p <= 2; ++p) {
    auto basis = harmonic_basis(s.ops, s.star, p);
    auto v = deflated_random(s, basis, p, 80 + static_cast<std::uint64_t>(p));
    auto omega = hodge_laplacian(v, s.ops);
    auto res = coarse_solve(omega, s.ops, s.star, basis, cfg);
    CHECK(res.iterations > 0);
    CHECK(res.residual <= cfg.coarse_tol);
    auto lw = hodge_laplacian(res.w, s.ops);
    CHECK(norm(lw + (-1.0) * omega, s.star) <= 10 * cfg.coarse_tol * norm(omega, s.star));
    CHECK(norm(res.w + (-1.0) * v, s.star) <= 1e-8 * norm(v, s.star));
    CHECK(norm(harmonic_project(res.w, basis, s.star), s.star) <=
          1e-10 * std::max(1.0, norm(res.w, s.star)));
  }
}

TEST_CASE("coarse solve edge cases") {
  auto s = make(generate_torus(8, 8));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  SolverConfig cfg;

  auto zero = coarse_solve(zero_cochain(s.K, 1), s.ops, s.star, basis, cfg);
  CHECK(zero.iterations == 0);
  CHECK(zero.w.values.cwiseAbs().maxCoeff() == 0.0);

  Cochain h = zero_cochain(s.K, 1);
  h.values = basis.vectors.col(0);
  CHECK_THROWS_AS(coarse_solve(h, s.ops, s.star, basis, cfg), CompatibilityViolation);

  SolverConfig tight = cfg;
  tight.coarse_max_iters = 1;
  auto omega = deflated_random(s, basis, 1, 90);
  CHECK_THROWS_AS(coarse_solve(omega, s.ops, s.star, basis, tight), NoConvergence);

  SolverConfig bad = cfg;
  bad.max_steps = 0;
  CHECK_THROWS_AS(coarse_solve(omega, s.ops, s.star, basis, bad), InvalidParameter);
  bad = cfg;
  bad.coarse_tol = 0.0;
  CHECK_THROWS_AS(coarse_solve(omega, s.ops, s.star, basis, bad), InvalidParameter);

  auto other = make(fixtures::icosahedron());
  auto foreign = random_cochain(other.K, 1, 91);
  CHECK_THROWS_AS(coarse_solve(foreign, s.ops, s.star, basis, cfg), ComplexMismatch);
  auto basis0 = harmonic_basis(s.ops, s.star, 0);
  CHECK_THROWS_AS(coarse_solve(omega, s.ops, s.star, basis0, cfg), DegreeMismatch);
}

TEST_CASE("direct and iterative coarse solves agree") {
  auto s = make(generate_torus(8, 8));
  SolverConfig cfg;
  for (int p = 0; p <= 2; ++p) {
    auto basis = harmonic_basis(s.ops, s.star, p);
    auto omega = deflated_random(s, basis, p, 100 + static_cast<std::uint64_t>(p));
    auto it = coarse_solve(omega, s.ops, s.star, basis, cfg);
    auto dr = direct_solve(omega, s.ops, s.star, basis);
    CHECK(norm(it.w + (-1.0) * dr, s.star) <= 1e-8 * std::max(1.0, norm(dr, s.star)));
    auto ld = hodge_laplacian(dr, s.ops);
    CHECK(norm(ld + (-1.0) * omega, s.star) <= 1e-8 * norm(omega, s.star));
  }
}

TEST_CASE("raising steps with one global patch converge in one step") {
  auto s = make(generate_torus(8, 8));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 99, 1, 0);
  REQUIRE(cover.patches.size() == 1);
  SolverConfig cfg;
  auto omega = deflated_random(s, basis, 1, 110);
  auto rs = raising_steps(omega, cover, s.ops, s.star, basis, cfg);
  REQUIRE(rs.report.steps.size() == 1);
  // One bump equal to one everywhere: the produced residual cancels exactly.
  CHECK(rs.report.steps[0].residual_norm == 0.0);
  CHECK(rs.report.final_residual == 0.0);
  CHECK(rs.residual.values.cwiseAbs().maxCoeff() == 0.0);
  const double wn = norm(omega, s.star);
  CHECK(rs.report.steps[0].telescoping_defect <= 1e-10 * wn);
  auto lu = hodge_laplacian(rs.u, s.ops);
  CHECK(norm(lu + (-1.0) * omega, s.star) <= 1e-9 * wn);
}

TEST_CASE("raising steps on the zero input do nothing") {
  auto s = make(generate_torus(8, 8));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 4, 1, 0);
  SolverConfig cfg;
  auto rs = raising_steps(zero_cochain(s.K, 1), cover, s.ops, s.star, basis, cfg);
  CHECK(rs.report.steps.empty());
  CHECK(rs.u.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(rs.residual.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("raising steps reject incompatible inputs") {
  auto s = make(generate_torus(8, 8));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  REQUIRE(basis.dimension() == 2);
  auto cover = build_cover(s.K, 4, 1, 0);
  SolverConfig cfg;
  Cochain h = zero_cochain(s.K, 1);
  h.values = basis.vectors.col(1);
  auto omega = deflated_random(s, basis, 1, 120);
  Cochain mixed = omega + 0.5 * h;
  CHECK_THROWS_AS(raising_steps(mixed, cover, s.ops, s.star, basis, cfg),
                  CompatibilityViolation);
}

TEST_CASE("raising steps hold the telescoping identity on a real cover") {
  auto s = make(generate_torus(16, 16));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 4, 1, 7);
  REQUIRE(cover.patches.size() > 1);
  SolverConfig cfg;
  cfg.max_steps = 80;
  auto omega = deflated_random(s, basis, 1, 130);
  const double wn = norm(omega, s.star);
  auto rs = raising_steps(omega, cover, s.ops, s.star, basis, cfg);
  REQUIRE(!rs.report.steps.empty());

  double prev = wn;
  for (std::size_t i = 0; i < rs.report.steps.size(); ++i) {
    const auto& st = rs.report.steps[i];
    CHECK(st.k == static_cast<int>(i));
    CHECK(st.telescoping_defect <= 1e-10 * (wn + st.residual_norm));
    CHECK(st.harmonic_leak <= 1e-2);
    CHECK(st.residual_norm < prev);  // genuinely contracting cover
    prev = st.residual_norm;
  }
  CHECK(rs.report.contraction_ratio < 1.0);
  CHECK(rs.report.steps.size() < 80);  // reached the tolerance before the cap
  CHECK(rs.report.final_residual <= cfg.residual_tol);

  // The returned pair satisfies the signed identity.
  auto lu = hodge_laplacian(rs.u, s.ops);
  auto gap = lu + (-1.0) * omega + (-1.0) * rs.residual;
  CHECK(norm(gap, s.star) <= 1e-9 * wn);
}

TEST_CASE("raising steps stop at the step cap without error") {
  auto s = make(generate_torus(16, 16));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 4, 1, 7);
  SolverConfig cfg;
  cfg.max_steps = 2;
  auto omega = deflated_random(s, basis, 1, 140);
  auto rs = raising_steps(omega, cover, s.ops, s.star, basis, cfg);
  CHECK(rs.report.steps.size() == 2);
  CHECK(rs.report.final_residual > 0.0);
  auto lu = hodge_laplacian(rs.u, s.ops);
  auto gap = lu + (-1.0) * omega + (-1.0) * rs.residual;
  CHECK(norm(gap, s.star) <= 1e-9 * norm(omega, s.star));
}

// One correction step assembled from the public pieces; linear in omega.
Cochain one_step_residual(const Cochain& omega, const Cover& cover, const Operators& ops,
                          const MetricStar& star, const HarmonicBasis& basis,
                          const SolverConfig& cfg) {
  Cochain v{omega.degree, omega.complex_id, Eigen::VectorXd::Zero(omega.values.size())};
  Cochain csu = v;
  for (std::size_t j = 0; j < cover.patches.size(); ++j) {
    auto uj = local_solve(cover.patches[j], omega, ops, star, cfg);
    v = v + scalar_multiply(cover.chi[j], uj, ops);
    csu = csu + scalar_multiply(cover.chi[j], hodge_laplacian(uj, ops), ops);
  }
  auto next = hodge_laplacian(v, ops) + (-1.0) * csu;
  return next + (-1.0) * harmonic_project(next, basis, star);
}

TEST_CASE("raising steps diverge on an adversarial cover") {
  auto s = make(generate_torus(12, 12));
  auto basis = harmonic_basis(s.ops, s.star, 0);
  auto cover = checkerboard_cover(s.K, 0, 6 * 12 + 6, 7);

  // Still a partition of unity with admissible supports.
  for (Index v = 0; v < s.K.num_vertices(); ++v) {
    CHECK(cover.chi[0].values[v] + cover.chi[1].values[v] == 1.0);
  }
  for (int j = 0; j < 2; ++j) {
    for (Index v = 0; v < s.K.num_vertices(); ++v) {
      if (cover.chi[static_cast<std::size_t>(j)].values[v] > 0) {
        REQUIRE(cover.patches[static_cast<std::size_t>(j)]
                    .hop_distance[static_cast<std::size_t>(v)] >= 0);
      }
    }
  }

  // The step map is linear; aim at its top singular vector in the weighted
  // norm. The checkerboard gluing amplifies it far past the growth guard.
  SolverConfig cfg;
  const Index n = s.K.num_simplices(0);
  const Eigen::VectorXd& w = s.star.weights[0];
  Eigen::MatrixXd T(n, n);
  for (Index j = 0; j < n; ++j) {
    Cochain e = zero_cochain(s.K, 0);
    e.values[j] = 1.0;
    T.col(j) = one_step_residual(e, cover, s.ops, s.star, basis, cfg).values;
  }
  Eigen::VectorXd rt = w.cwiseSqrt();
  Eigen::MatrixXd Tw = rt.asDiagonal() * T * rt.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Tw, Eigen::ComputeThinV);
  REQUIRE(svd.singularValues()[0] > 10.5);

  Cochain omega = zero_cochain(s.K, 0);
  omega.values = rt.cwiseInverse().asDiagonal() * svd.matrixV().col(0);
  omega = omega + (-1.0) * harmonic_project(omega, basis, s.star);
  const double wn = norm(omega, s.star);

  bool diverged = false;
  try {
    raising_steps(omega, cover, s.ops, s.star, basis, cfg);
  } catch (const ResidualDivergence& e) {
    diverged = true;
    REQUIRE(!e.report.steps.empty());
    CHECK(e.report.contraction_ratio > 10.0);
    double bound = wn;
    for (const auto& st : e.report.steps) {
      // Gluing may explode; the algebraic identity still holds each step.
      CHECK(st.telescoping_defect <= 1e-10 * (bound + st.residual_norm));
      bound = std::max(bound, st.residual_norm);
    }
  }
  CHECK(diverged);
}

TEST_CASE("threshold solve matches the direct factorization") {
  auto s = make(generate_torus(8, 8));
  SolverConfig cfg;
  auto cover = build_cover(s.K, 4, 1, 0);
  for (int p = 0; p <= 2; ++p) {
    auto basis = harmonic_basis(s.ops, s.star, p);
    auto omega = deflated_random(s, basis, p, 160 + static_cast<std::uint64_t>(p));
    auto sol = solve_with_threshold(omega, cover, s.ops, s.star, basis, cfg);
    auto ref = direct_solve(omega, s.ops, s.star, basis);
    CHECK(norm(sol.v + (-1.0) * ref, s.star) <= 1e-6 * std::max(1.0, norm(ref, s.star)));
    CHECK(sol.report.final_residual <= 1e-8);
    CHECK(norm(harmonic_project(sol.v, basis, s.star), s.star) <=
          1e-10 * std::max(1.0, norm(sol.v, s.star)));
  }
}

TEST_CASE("threshold solve reproduces a manufactured solution") {
  auto s = make(generate_torus(16, 16));
  auto basis = harmonic_basis(s.ops, s.star, 1);
  auto cover = build_cover(s.K, 4, 1, 0);
  SolverConfig cfg;
  auto w = deflated_random(s, basis, 1, 170);
  auto omega = hodge_laplacian(w, s.ops);
  auto sol = solve_with_threshold(omega, cover, s.ops, s.star, basis, cfg);
  CHECK(norm(sol.v + (-1.0) * w, s.star) <= 1e-6 * norm(w, s.star));
  CHECK(sol.report.coarse_iters > 0);
}

TEST_CASE("report serialization is stable and complete") {
  RaisingStepsReport rep;
  rep.steps.push_back({0, 0.5, 1e-12, 1e-9});
  rep.coarse_iters = 3;
  rep.final_residual = 1e-11;
  rep.contraction_ratio = 0.25;
  rep.wall_ms = 12.5;
  auto text = report_to_json(rep);
  CHECK(text.find("\"steps\"") != std::string::npos);
  CHECK(text.find("\"residual_norm\": 0.5") != std::string::npos);
  CHECK(text.find("\"telescoping_defect\"") != std::string::npos);
  CHECK(text.find("\"harmonic_leak\"") != std::string::npos);
  CHECK(text.find("\"coarse_iters\": 3") != std::string::npos);
  CHECK(text.find("\"final_residual\"") != std::string::npos);
  CHECK(text.find("\"contraction_ratio\": 0.25") != std::string::npos);
  CHECK(text.find("\"wall_ms\"") != std::string::npos);
  // Key order is fixed.
  CHECK(text.find("\"steps\"") < text.find("\"coarse_iters\""));
  CHECK(text.find("\"coarse_iters\"") < text.find("\"final_residual\""));
}

TEST_CASE("perturbation series on a scalar contraction") {
  SolverConfig cfg;
  Eigen::VectorXd gamma = Eigen::VectorXd::LinSpaced(10, 1.0, 2.0);

  auto identity = [](const Eigen::VectorXd& x) { return x; };

  SUBCASE("zero perturbation ends after one term") {
    auto res = neumann_perturbation_solve(
        identity, [](const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()).eval(); },
        gamma, 1.0, cfg);
    CHECK(res.terms == 1);
    CHECK((res.v - gamma).norm() == 0.0);
  }

  SUBCASE("halving perturbation halves every term exactly") {
    auto res = neumann_perturbation_solve(
        identity, [](const Eigen::VectorXd& x) { return (0.5 * x).eval(); }, gamma, 1.0, cfg);
    REQUIRE(res.gamma_norms.size() >= 3);
    for (std::size_t k = 0; k + 1 < res.gamma_norms.size(); ++k) {
      CHECK(res.gamma_norms[k + 1] == 0.5 * res.gamma_norms[k]);
    }
    // Limit of the alternating series: gamma / (1 + 1/2).
    CHECK((res.v - gamma * (2.0 / 3.0)).norm() <= 1e-9 * gamma.norm());
  }

  SUBCASE("expanding perturbation fails fast") {
    CHECK_THROWS_AS(neumann_perturbation_solve(
                        identity, [](const Eigen::VectorXd& x) { return (1.2 * x).eval(); },
                        gamma, 1.0, cfg),
                    ContractionFailure);
    try {
      neumann_perturbation_solve(
          identity, [](const Eigen::VectorXd& x) { return (1.2 * x).eval(); }, gamma, 1.0, cfg);
    } catch (const ContractionFailure& e) {
      CHECK(std::string(e.what()).find("3 consecutive") != std::string::npos);
    }
  }

  SUBCASE("slow contraction exhausts the term budget") {
    CHECK_THROWS_AS(neumann_perturbation_solve(
                        identity, [](const Eigen::VectorXd& x) { return (0.9 * x).eval(); },
                        gamma, 1.0, cfg, 3),
                    NoConvergence);
  }

  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(neumann_perturbation_solve(identity, identity, gamma, 0.0, cfg),
                    InvalidParameter);
    CHECK_THROWS_AS(neumann_perturbation_solve(identity, identity, gamma, 1.0, cfg, 0),
                    InvalidParameter);
    auto shrink = [](const Eigen::VectorXd& x) { return x.head(x.size() - 1).eval(); };
    CHECK_THROWS_AS(neumann_perturbation_solve(shrink, identity, gamma, 1.0, cfg),
                    InvalidParameter);
  }
}

TEST_CASE("perturbation series against a dense oracle") {
  SolverConfig cfg;
  const Index n = 50;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd M(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) M(i, j) = unif(rng);
  }
  M *= 0.3 / M.norm();  // Frobenius bound keeps the spectral norm under 0.3
  Eigen::VectorXd gamma(n);
  for (Index i = 0; i < n; ++i) gamma[i] = unif(rng);

  auto res = neumann_perturbation_solve(
      [](const Eigen::VectorXd& x) { return x; },
      [&](const Eigen::VectorXd& x) { return (M * x).eval(); }, gamma, 1.0, cfg);
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) + M;
  Eigen::VectorXd exact = sys.fullPivLu().solve(gamma);
  CHECK((res.v - exact).norm() <= 1e-8 * exact.norm());
  // Ratios stay under the Frobenius bound once the series settles.
  CHECK(res.gamma_norms.back() <= cfg.residual_tol * res.gamma_norms.front());
}
