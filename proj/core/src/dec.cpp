#include "hodgedec/dec.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

namespace hodgedec {

namespace {

void check_pair(const Cochain& a, const Cochain& b) {
  if (a.complex_id != b.complex_id) {
    throw ComplexMismatch("cochains live on different complexes");
  }
  if (a.degree != b.degree) {
    throw DegreeMismatch("cochain degrees " + std::to_string(a.degree) + " and " +
                         std::to_string(b.degree) + " differ");
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Eigen::SparseMatrix<double> symmetrized(const Eigen::SparseMatrix<double>& M) {
  Eigen::SparseMatrix<double> Mt = M.transpose();
  return 0.5 * (M + Mt);
}

}  // namespace

Cochain zero_cochain(const SimplicialComplex& K, int p) {
  return Cochain{p, K.id(), Eigen::VectorXd::Zero(K.num_simplices(p))};
}

Cochain random_cochain(const SimplicialComplex& K, int p, std::uint64_t seed) {
  Cochain c = zero_cochain(K, p);
  std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Index i = 0; i < c.values.size(); ++i) c.values[i] = dist(rng);
  return c;
}

Cochain operator+(const Cochain& a, const Cochain& b) {
  check_pair(a, b);
  return Cochain{a.degree, a.complex_id, a.values + b.values};
}

Cochain operator-(const Cochain& a, const Cochain& b) {
  check_pair(a, b);
  return Cochain{a.degree, a.complex_id, a.values - b.values};
}

Cochain operator*(double s, const Cochain& a) {
  return Cochain{a.degree, a.complex_id, s * a.values};
}

MetricStar build_metric_star(const SimplicialComplex& K) {
  if (!K.is_orientable()) {
    throw NonOrientableError("metric star needs an orientable complex");
  }
  const int dim = K.dim();
  const std::size_t arity = static_cast<std::size_t>(dim) + 1;

  auto length2 = [&K](std::int32_t a, std::int32_t b) {
    const double l = K.edge_length(K.edge_index(a, b));
    return l * l;
  };

  // Gram matrix of the edge vectors out of tuple[0], from edge lengths.
  auto gram = [&](const std::vector<std::int32_t>& tup) {
    const int k = static_cast<int>(tup.size()) - 1;
    Eigen::MatrixXd G(k, k);
    for (int i = 1; i <= k; ++i) {
      const double l0i = length2(tup[0], tup[static_cast<std::size_t>(i)]);
      for (int j = i; j <= k; ++j) {
        const double l0j = length2(tup[0], tup[static_cast<std::size_t>(j)]);
        const double lij =
            (i == j) ? 0.0 : length2(tup[static_cast<std::size_t>(i)], tup[static_cast<std::size_t>(j)]);
        G(i - 1, j - 1) = G(j - 1, i - 1) = 0.5 * (l0i + l0j - lij);
      }
    }
    return G;
  };

  // Unsigned p-volume of a simplex given as vertex tuple.
  auto primal_volume = [&](const std::vector<std::int32_t>& tup) {
    const int k = static_cast<int>(tup.size()) - 1;
    if (k == 0) return 1.0;
    if (k == 1) return std::sqrt(length2(tup[0], tup[1]));
    const double det = gram(tup).determinant();
    if (!(det > 0.0)) {
      throw DegenerateSimplex("simplex with vanishing metric volume");
    }
    return std::sqrt(det) / factorial(k);
  };

  MetricStar star;
  star.complex_id = K.id();
  star.weights.resize(arity);
  std::vector<Eigen::VectorXd> primal(arity), dual(arity);
  for (int p = 0; p <= dim; ++p) {
    const Index np = K.num_simplices(p);
    primal[static_cast<std::size_t>(p)].resize(np);
    for (Index i = 0; i < np; ++i) {
      primal[static_cast<std::size_t>(p)][i] = primal_volume(K.simplex(p, i).vertices);
    }
    dual[static_cast<std::size_t>(p)] = Eigen::VectorXd::Zero(np);
  }

  // Dual volumes accumulate over barycentric chain simplices inside each
  // top simplex, computed in a local isometric embedding.
  const std::uint32_t full = (1u << arity) - 1u;
  std::vector<Eigen::VectorXd> bary(static_cast<std::size_t>(full) + 1);
  std::vector<std::int32_t> sub;
  for (const Simplex& T : K.simplices(dim)) {
    const auto& tup = T.vertices;
    Eigen::MatrixXd G = gram(tup);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
      throw DegenerateSimplex("top simplex has a degenerate metric");
    }
    Eigen::MatrixXd L = llt.matrixL();  // row i-1: local coordinates of tup[i]

    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
      int count = 0;
      for (std::size_t i = 0; i < arity; ++i) {
        if (mask & (1u << i)) {
          if (i > 0) b += L.row(static_cast<Eigen::Index>(i) - 1).transpose();
          ++count;
        }
      }
      bary[mask] = b / count;
    }

    // For every face and every ascending chain of vertex insertions up to
    // the full tuple, add the volume of the simplex of barycenters.
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      int count = 0;
      sub.clear();
      for (std::size_t i = 0; i < arity; ++i) {
        if (mask & (1u << i)) {
          sub.push_back(tup[i]);
          ++count;
        }
      }
      const int p = count - 1;
      const int codim = dim - p;
      const Index global = *K.find_simplex(p, sub);
      if (codim == 0) {
        dual[static_cast<std::size_t>(p)][global] += 1.0;
        continue;
      }
      // Chains: permutations of the missing vertices. Edge vectors of the
      // barycenter simplex go from bary[mask] to each partial union.
      std::vector<std::size_t> missing;
      for (std::size_t i = 0; i < arity; ++i) {
        if (!(mask & (1u << i))) missing.push_back(i);
      }
      std::sort(missing.begin(), missing.end());
      double total = 0.0;
      do {
        Eigen::MatrixXd M(dim, codim);
        std::uint32_t acc = mask;
        for (int s = 0; s < codim; ++s) {
          acc |= (1u << missing[static_cast<std::size_t>(s)]);
          M.col(s) = bary[acc] - bary[mask];
        }
        const double g = (M.transpose() * M).determinant();
        total += g > 0.0 ? std::sqrt(g) : 0.0;
      } while (std::next_permutation(missing.begin(), missing.end()));
      dual[static_cast<std::size_t>(p)][global] += total / factorial(codim);
    }
  }

  for (int p = 0; p <= dim; ++p) {
    const Index np = K.num_simplices(p);
    auto& w = star.weights[static_cast<std::size_t>(p)];
    w.resize(np);
    for (Index i = 0; i < np; ++i) {
      const double pv = primal[static_cast<std::size_t>(p)][i];
      const double dv = dual[static_cast<std::size_t>(p)][i];
      if (!(pv > 0.0) || !(dv > 0.0)) {
        throw DegenerateSimplex("nonpositive star weight in dimension " + std::to_string(p));
      }
      w[i] = dv / pv;
    }
  }
  return star;
}

double inner_product(const Cochain& a, const Cochain& b, const MetricStar& star) {
  check_pair(a, b);
  if (a.complex_id != star.complex_id) {
    throw ComplexMismatch("cochain and star live on different complexes");
  }
  // a*b first, so the result is bitwise symmetric in a and b.
  const auto& w = star.weights[static_cast<std::size_t>(a.degree)];
  return (w.array() * (a.values.array() * b.values.array())).sum();
}

double norm(const Cochain& a, const MetricStar& star) {
  return std::sqrt(std::max(0.0, inner_product(a, a, star)));
}

Operators build_operators(const SimplicialComplex& K, const MetricStar& star) {
  if (star.complex_id != K.id()) {
    throw ComplexMismatch("star was built for a different complex");
  }
  const int dim = K.dim();
  const std::size_t arity = static_cast<std::size_t>(dim) + 1;
  Operators ops;
  ops.complex_id = K.id();
  ops.dim = dim;
  ops.d.resize(arity);
  ops.codiff.resize(arity);
  ops.laplacian.resize(arity);
  ops.laplacian_sym.resize(arity);
  ops.vertex_mean.resize(arity);

  for (int p = 0; p < dim; ++p) {
    ops.d[static_cast<std::size_t>(p)] =
        K.boundary_operator(p + 1).transpose().cast<double>();
  }
  for (int p = 1; p <= dim; ++p) {
    const auto& sl = star.weights[static_cast<std::size_t>(p - 1)];
    const auto& sp = star.weights[static_cast<std::size_t>(p)];
    Eigen::SparseMatrix<double> dt = ops.d[static_cast<std::size_t>(p - 1)].transpose();
    ops.codiff[static_cast<std::size_t>(p)] =
        sl.cwiseInverse().asDiagonal() * dt * Eigen::SparseMatrix<double>(sp.asDiagonal());
  }
  for (int p = 0; p <= dim; ++p) {
    const auto& sp = star.weights[static_cast<std::size_t>(p)];
    Eigen::SparseMatrix<double> sym(K.num_simplices(p), K.num_simplices(p));
    if (p < dim) {
      const auto& d = ops.d[static_cast<std::size_t>(p)];
      const auto& su = star.weights[static_cast<std::size_t>(p + 1)];
      sym = symmetrized(Eigen::SparseMatrix<double>(
          d.transpose() * Eigen::SparseMatrix<double>(su.asDiagonal()) * d));
    }
    if (p > 0) {
      const auto& dl = ops.d[static_cast<std::size_t>(p - 1)];
      const auto& sl = star.weights[static_cast<std::size_t>(p - 1)];
      Eigen::SparseMatrix<double> half =
          Eigen::SparseMatrix<double>(sp.asDiagonal()) * dl *
          Eigen::SparseMatrix<double>(sl.cwiseInverse().asDiagonal()) * dl.transpose() *
          Eigen::SparseMatrix<double>(sp.asDiagonal());
      sym = sym + symmetrized(half);
    }
    ops.laplacian_sym[static_cast<std::size_t>(p)] = sym;
    ops.laplacian[static_cast<std::size_t>(p)] = sp.cwiseInverse().asDiagonal() * sym;
  }
  for (int p = 0; p <= dim; ++p) {
    std::vector<Eigen::Triplet<double>> trip;
    const auto& list = K.simplices(p);
    trip.reserve(list.size() * (static_cast<std::size_t>(p) + 1));
    const double w = 1.0 / (p + 1);
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::int32_t v : list[i].vertices) {
        trip.emplace_back(static_cast<int>(i), v, w);
      }
    }
    Eigen::SparseMatrix<double> M(K.num_simplices(p), K.num_vertices());
    M.setFromTriplets(trip.begin(), trip.end());
    ops.vertex_mean[static_cast<std::size_t>(p)] = std::move(M);
  }
  return ops;
}

namespace {

void check_operand(const Cochain& omega, const Operators& ops) {
  if (omega.complex_id != ops.complex_id) {
    throw ComplexMismatch("cochain and operators live on different complexes");
  }
  if (omega.degree < 0 || omega.degree > ops.dim) {
    throw DegreeOutOfRange("cochain degree " + std::to_string(omega.degree) + " outside [0, " +
                           std::to_string(ops.dim) + "]");
  }
}

}  // namespace

Cochain exterior_derivative(const Cochain& omega, const Operators& ops) {
  check_operand(omega, ops);
  if (omega.degree >= ops.dim) {
    throw DegreeOutOfRange("exterior derivative undefined for degree " +
                           std::to_string(omega.degree) + " on a " + std::to_string(ops.dim) +
                           "-complex");
  }
  return Cochain{omega.degree + 1, omega.complex_id,
                 ops.d[static_cast<std::size_t>(omega.degree)] * omega.values};
}

Cochain codifferential(const Cochain& omega, const Operators& ops) {
  check_operand(omega, ops);
  if (omega.degree == 0) {
    throw DegreeOutOfRange("codifferential vanishes identically on degree 0");
  }
  return Cochain{omega.degree - 1, omega.complex_id,
                 ops.codiff[static_cast<std::size_t>(omega.degree)] * omega.values};
}

Cochain hodge_laplacian(const Cochain& omega, const Operators& ops) {
  check_operand(omega, ops);
  return Cochain{omega.degree, omega.complex_id,
                 ops.laplacian[static_cast<std::size_t>(omega.degree)] * omega.values};
}

Cochain scalar_multiply(const Cochain& chi, const Cochain& u, const Operators& ops) {
  check_operand(u, ops);
  if (chi.degree != 0) {
    throw DegreeMismatch("scalar factor must be a vertex function");
  }
  if (chi.complex_id != u.complex_id) {
    throw ComplexMismatch("cochains live on different complexes");
  }
  Eigen::VectorXd mean = ops.vertex_mean[static_cast<std::size_t>(u.degree)] * chi.values;
  return Cochain{u.degree, u.complex_id, mean.cwiseProduct(u.values)};
}

}  // namespace hodgedec
