#include "hodgedec/simplicial_complex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace hodgedec {

namespace {

std::uint64_t next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

// Sorts a tiny tuple in place, returning the permutation parity.
int sort_parity(std::vector<std::int32_t>& v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) {
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  }
  return sign;
}

std::string tuple_string(const std::vector<std::int32_t>& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace

Index SimplicialComplex::num_simplices(int p) const {
  return static_cast<Index>(simplices(p).size());
}

const std::vector<Simplex>& SimplicialComplex::simplices(int p) const {
  if (p < 0 || p > dim_) {
    throw DegreeOutOfRange("simplex degree " + std::to_string(p) + " outside [0, " +
                           std::to_string(dim_) + "]");
  }
  return simplices_[static_cast<std::size_t>(p)];
}

const Eigen::SparseMatrix<int>& SimplicialComplex::boundary_operator(int p) const {
  if (p < 1 || p > dim_) {
    throw DegreeOutOfRange("boundary operator degree " + std::to_string(p) +
                           " outside [1, " + std::to_string(dim_) + "]");
  }
  return boundary_[static_cast<std::size_t>(p)];
}

std::optional<Index> SimplicialComplex::find_simplex(
    int p, const std::vector<std::int32_t>& sorted_tuple) const {
  if (p < 0 || p > dim_) return std::nullopt;
  const auto& map = index_[static_cast<std::size_t>(p)];
  auto it = map.find(sorted_tuple);
  if (it == map.end()) return std::nullopt;
  return it->second;
}

Index SimplicialComplex::edge_index(std::int32_t a, std::int32_t b) const {
  auto found = find_simplex(1, {std::min(a, b), std::max(a, b)});
  if (!found) {
    throw InvalidParameter("no edge " + tuple_string({std::min(a, b), std::max(a, b)}));
  }
  return *found;
}

int SimplicialComplex::euler_characteristic() const {
  int chi = 0;
  int sign = 1;
  for (int p = 0; p <= dim_; ++p, sign = -sign) {
    chi += sign * static_cast<int>(num_simplices(p));
  }
  return chi;
}

double SimplicialComplex::edge_length(Index e) const {
  if (e < 0 || e >= num_simplices(1)) {
    throw InvalidParameter("edge index out of range");
  }
  if (has_explicit_edge_lengths()) return edge_lengths_[e];
  const auto& t = simplices_[1][static_cast<std::size_t>(e)].vertices;
  return (vertices_[static_cast<std::size_t>(t[0])] - vertices_[static_cast<std::size_t>(t[1])])
      .norm();
}

void SimplicialComplex::set_edge_lengths(const Eigen::VectorXd& lengths) {
  if (lengths.size() != num_simplices(1)) {
    throw InvalidParameter("edge length vector has size " + std::to_string(lengths.size()) +
                           ", expected " + std::to_string(num_simplices(1)));
  }
  for (Index e = 0; e < lengths.size(); ++e) {
    if (!(lengths[e] > 0.0) || !std::isfinite(lengths[e])) {
      throw InvalidParameter("edge lengths must be positive and finite");
    }
  }
  edge_lengths_ = lengths;
}

std::vector<std::vector<Index>> SimplicialComplex::vertex_adjacency() const {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(num_vertices()));
  for (const Simplex& e : simplices(1)) {
    adj[static_cast<std::size_t>(e.vertices[0])].push_back(e.vertices[1]);
    adj[static_cast<std::size_t>(e.vertices[1])].push_back(e.vertices[0]);
  }
  return adj;
}

SimplicialComplex build_complex(std::vector<Eigen::Vector3d> vertices,
                                const std::vector<std::vector<std::int32_t>>& top_simplices) {
  if (vertices.empty()) throw InvalidParameter("complex needs at least one vertex");
  if (top_simplices.empty()) throw InvalidParameter("complex needs at least one top simplex");

  const std::size_t arity = top_simplices.front().size();
  if (arity < 2) throw InvalidParameter("top simplices need at least two vertices");
  const int dim = static_cast<int>(arity) - 1;
  const auto nv = static_cast<std::int32_t>(vertices.size());

  // Top tuples: sort, remember input-orientation parity, reject degenerates.
  std::vector<Simplex> tops;
  tops.reserve(top_simplices.size());
  std::set<std::vector<std::int32_t>> seen;
  for (const auto& winding : top_simplices) {
    if (winding.size() != arity) {
      throw InvalidParameter("mixed top-simplex arity: expected " + std::to_string(arity) +
                             " vertices, got " + std::to_string(winding.size()));
    }
    Simplex s;
    s.vertices = winding;
    for (std::int32_t v : s.vertices) {
      if (v < 0 || v >= nv) {
        throw InvalidParameter("vertex index " + std::to_string(v) + " out of range");
      }
    }
    s.orientation = sort_parity(s.vertices);
    for (std::size_t i = 1; i < s.vertices.size(); ++i) {
      if (s.vertices[i] == s.vertices[i - 1]) {
        throw InvalidParameter("top simplex " + tuple_string(winding) + " repeats a vertex");
      }
    }
    if (!seen.insert(s.vertices).second) {
      throw InvalidParameter("duplicate top simplex " + tuple_string(s.vertices));
    }
    tops.push_back(std::move(s));
  }

  SimplicialComplex K;
  K.id_ = next_id();
  K.dim_ = dim;
  K.vertices_ = std::move(vertices);
  K.simplices_.resize(arity);
  K.index_.resize(arity);
  K.boundary_.resize(arity);

  // Lower simplices, lexicographically on sorted tuples. Vertices keep
  // their input indices.
  for (std::int32_t v = 0; v < nv; ++v) {
    K.simplices_[0].push_back(Simplex{{v}, 1});
    K.index_[0][{v}] = v;
  }
  for (int p = 1; p < dim; ++p) {
    std::set<std::vector<std::int32_t>> faces;
    std::vector<std::int32_t> face(static_cast<std::size_t>(p) + 1);
    std::vector<int> pick(static_cast<std::size_t>(p) + 1);
    for (const Simplex& t : tops) {
      // all (p+1)-subsets of the sorted top tuple
      for (std::size_t i = 0; i <= static_cast<std::size_t>(p); ++i) pick[i] = static_cast<int>(i);
      while (true) {
        for (std::size_t i = 0; i <= static_cast<std::size_t>(p); ++i) {
          face[i] = t.vertices[static_cast<std::size_t>(pick[i])];
        }
        faces.insert(face);
        int i = p;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == static_cast<int>(arity) - (p + 1 - i)) {
          --i;
        }
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j <= p; ++j) {
          pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
      }
    }
    auto& list = K.simplices_[static_cast<std::size_t>(p)];
    auto& map = K.index_[static_cast<std::size_t>(p)];
    for (const auto& f : faces) {
      map[f] = static_cast<Index>(list.size());
      list.push_back(Simplex{f, 1});
    }
  }
  K.simplices_[static_cast<std::size_t>(dim)] = std::move(tops);
  {
    auto& map = K.index_[static_cast<std::size_t>(dim)];
    const auto& list = K.simplices_[static_cast<std::size_t>(dim)];
    for (std::size_t i = 0; i < list.size(); ++i) map[list[i].vertices] = static_cast<Index>(i);
  }

  // Boundary operators below the top dimension: all orientations are the
  // canonical sorted ones, so the face coefficient is (-1)^i.
  for (int p = 1; p < dim; ++p) {
    const auto& list = K.simplices_[static_cast<std::size_t>(p)];
    std::vector<Eigen::Triplet<int>> trip;
    trip.reserve(list.size() * arity);
    std::vector<std::int32_t> face;
    for (std::size_t j = 0; j < list.size(); ++j) {
      const auto& tup = list[j].vertices;
      int sign = 1;
      for (std::size_t i = 0; i < tup.size(); ++i, sign = -sign) {
        face = tup;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        trip.emplace_back(static_cast<int>(K.index_[static_cast<std::size_t>(p - 1)].at(face)),
                          static_cast<int>(j), sign);
      }
    }
    Eigen::SparseMatrix<int> B(K.num_simplices(p - 1), K.num_simplices(p));
    B.setFromTriplets(trip.begin(), trip.end());
    K.boundary_[static_cast<std::size_t>(p)] = std::move(B);
  }

  // Facet cofaces; manifold condition.
  auto& top_list = K.simplices_[static_cast<std::size_t>(dim)];
  const auto& facet_map = K.index_[static_cast<std::size_t>(dim - 1)];
  const Index nfacet = K.num_simplices(dim - 1);
  // per facet: (top index, coefficient of the facet in d(top) before any flip)
  std::vector<std::vector<std::pair<Index, int>>> cofaces(static_cast<std::size_t>(nfacet));
  {
    std::vector<std::int32_t> face;
    for (std::size_t j = 0; j < top_list.size(); ++j) {
      const auto& tup = top_list[j].vertices;
      int sign = top_list[j].orientation;
      for (std::size_t i = 0; i < tup.size(); ++i, sign = -sign) {
        face = tup;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        const Index f = facet_map.at(face);
        auto& c = cofaces[static_cast<std::size_t>(f)];
        if (c.size() == 2) {
          throw NonManifoldError("facet " + tuple_string(face) + " has more than two cofaces");
        }
        c.emplace_back(static_cast<Index>(j), sign);
      }
    }
  }

  // Orientation: flip top simplices so adjacent ones induce opposite
  // coefficients on their shared facet. A conflict marks the complex
  // non-orientable and the input orientations stand.
  {
    std::vector<int> flip(top_list.size(), 0);
    bool orientable = true;
    for (std::size_t start = 0; start < top_list.size() && orientable; ++start) {
      if (flip[start] != 0) continue;
      flip[start] = 1;
      std::deque<Index> queue{static_cast<Index>(start)};
      while (!queue.empty() && orientable) {
        const Index t = queue.front();
        queue.pop_front();
        const auto& tup = top_list[static_cast<std::size_t>(t)].vertices;
        std::vector<std::int32_t> face;
        for (std::size_t i = 0; i < tup.size(); ++i) {
          face = tup;
          face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
          const auto& c = cofaces[static_cast<std::size_t>(facet_map.at(face))];
          if (c.size() != 2) continue;
          for (const auto& [other, coeff_other] : c) {
            if (other == t) continue;
            int coeff_t = 0;
            for (const auto& [tt, cc] : c) {
              if (tt == t) coeff_t = cc;
            }
            const int want = -flip[static_cast<std::size_t>(t)] * coeff_t * coeff_other;
            if (flip[static_cast<std::size_t>(other)] == 0) {
              flip[static_cast<std::size_t>(other)] = want;
              queue.push_back(other);
            } else if (flip[static_cast<std::size_t>(other)] != want) {
              orientable = false;
            }
          }
        }
      }
    }
    K.orientable_ = orientable;
    if (orientable) {
      for (std::size_t j = 0; j < top_list.size(); ++j) {
        top_list[j].orientation *= flip[j];
      }
    }
  }

  // Top boundary operator with the final orientations.
  {
    std::vector<Eigen::Triplet<int>> trip;
    trip.reserve(top_list.size() * arity);
    std::vector<std::int32_t> face;
    for (std::size_t j = 0; j < top_list.size(); ++j) {
      const auto& tup = top_list[j].vertices;
      int sign = top_list[j].orientation;
      for (std::size_t i = 0; i < tup.size(); ++i, sign = -sign) {
        face = tup;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(i));
        trip.emplace_back(static_cast<int>(facet_map.at(face)), static_cast<int>(j), sign);
      }
    }
    Eigen::SparseMatrix<int> B(nfacet, K.num_simplices(dim));
    B.setFromTriplets(trip.begin(), trip.end());
    K.boundary_[static_cast<std::size_t>(dim)] = std::move(B);
  }

  // Boundary facets and the closure of the boundary.
  for (Index f = 0; f < nfacet; ++f) {
    if (cofaces[static_cast<std::size_t>(f)].size() == 1) K.boundary_facets_.push_back(f);
  }
  K.boundary_closure_.assign(arity, {});
  for (int p = 0; p <= dim; ++p) {
    K.boundary_closure_[static_cast<std::size_t>(p)]
        .assign(static_cast<std::size_t>(K.num_simplices(p)), false);
  }
  {
    std::vector<std::int32_t> face(1);
    for (Index f : K.boundary_facets_) {
      const auto& tup = K.simplices_[static_cast<std::size_t>(dim - 1)]
                            [static_cast<std::size_t>(f)].vertices;
      // mark every sub-tuple of the facet
      const std::size_t m = tup.size();
      for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<std::int32_t> sub;
        for (std::size_t i = 0; i < m; ++i) {
          if (mask & (1u << i)) sub.push_back(tup[i]);
        }
        const int p = static_cast<int>(sub.size()) - 1;
        const Index idx = K.index_[static_cast<std::size_t>(p)].at(sub);
        K.boundary_closure_[static_cast<std::size_t>(p)][static_cast<std::size_t>(idx)] = true;
      }
    }
  }

  return K;
}

SimplicialComplex generate_torus(int m, int n) {
  if (m < 3 || n < 3) {
    throw InvalidParameter("torus grid needs m, n >= 3, got " + std::to_string(m) + "x" +
                           std::to_string(n));
  }
  std::vector<Eigen::Vector3d> vertices;
  vertices.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      vertices.emplace_back(static_cast<double>(i), static_cast<double>(j), 0.0);
    }
  }
  auto at = [n](int i, int j) { return static_cast<std::int32_t>(i * n + j); };
  std::vector<std::vector<std::int32_t>> tops;
  tops.reserve(2u * static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::int32_t v00 = at(i, j);
      const std::int32_t v10 = at((i + 1) % m, j);
      const std::int32_t v01 = at(i, (j + 1) % n);
      const std::int32_t v11 = at((i + 1) % m, (j + 1) % n);
      tops.push_back({v00, v10, v11});
      tops.push_back({v00, v11, v01});
    }
  }
  SimplicialComplex K = build_complex(std::move(vertices), tops);

  // Explicit flat metric; the planar coordinates misreport lengths across
  // the periodic seam.
  Eigen::VectorXd lengths(K.num_simplices(1));
  for (Index e = 0; e < K.num_simplices(1); ++e) {
    const auto& t = K.simplex(1, e).vertices;
    const int ia = t[0] / n, ja = t[0] % n;
    const int ib = t[1] / n, jb = t[1] % n;
    const int dx = std::min(std::abs(ia - ib), m - std::abs(ia - ib));
    const int dy = std::min(std::abs(ja - jb), n - std::abs(ja - jb));
    lengths[e] = std::sqrt(static_cast<double>(dx * dx + dy * dy));
  }
  K.set_edge_lengths(lengths);
  return K;
}

DoubledComplex riemannian_double(const SimplicialComplex& domain) {
  if (!domain.has_boundary()) {
    throw ClosedInputError("input complex is closed; the double needs a nonempty boundary");
  }
  if (!domain.is_orientable()) {
    throw NonOrientableError("cannot double a non-orientable complex");
  }
  const int dim = domain.dim();
  const auto& on_boundary = domain.boundary_closure();

  // An interior simplex carried entirely by boundary vertices would give
  // two copies with identical vertex tuples; such inputs are rejected.
  for (int p = 1; p <= dim; ++p) {
    for (Index i = 0; i < domain.num_simplices(p); ++i) {
      if (on_boundary[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)]) continue;
      const auto& tup = domain.simplex(p, i).vertices;
      bool all_bd = true;
      for (std::int32_t v : tup) {
        all_bd = all_bd && on_boundary[0][static_cast<std::size_t>(v)];
      }
      if (all_bd) {
        throw InvalidParameter(
            "interior simplex " + tuple_string(tup) +
            " has all vertices on the boundary; the double would not be simplicial");
      }
    }
  }

  const Index nv = domain.num_vertices();
  std::vector<std::int32_t> mirror_vertex(static_cast<std::size_t>(nv));
  std::vector<Eigen::Vector3d> vertices = domain.vertex_positions();
  for (Index v = 0; v < nv; ++v) {
    if (on_boundary[0][static_cast<std::size_t>(v)]) {
      mirror_vertex[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(v);
    } else {
      mirror_vertex[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(vertices.size());
      vertices.push_back(domain.vertex_positions()[static_cast<std::size_t>(v)]);
    }
  }
  const auto total_vertices = static_cast<std::int32_t>(vertices.size());
  std::vector<std::int32_t> unmirror(static_cast<std::size_t>(total_vertices));
  for (std::int32_t v = 0; v < static_cast<std::int32_t>(nv); ++v) {
    unmirror[static_cast<std::size_t>(v)] = v;
    unmirror[static_cast<std::size_t>(mirror_vertex[static_cast<std::size_t>(v)])] = v;
  }

  // Copy one keeps its windings, the mirror copy gets reversed ones.
  std::vector<std::vector<std::int32_t>> tops;
  tops.reserve(2u * static_cast<std::size_t>(domain.num_simplices(dim)));
  auto oriented_tuple = [](const Simplex& s) {
    std::vector<std::int32_t> t = s.vertices;
    if (s.orientation < 0) std::swap(t[0], t[1]);
    return t;
  };
  for (const Simplex& s : domain.simplices(dim)) {
    tops.push_back(oriented_tuple(s));
  }
  for (const Simplex& s : domain.simplices(dim)) {
    std::vector<std::int32_t> t = oriented_tuple(s);
    for (auto& v : t) v = mirror_vertex[static_cast<std::size_t>(v)];
    std::swap(t[0], t[1]);
    tops.push_back(std::move(t));
  }

  DoubledComplex result{build_complex(std::move(vertices), tops), {}};
  SimplicialComplex& D = result.complex;
  if (D.has_boundary() || !D.is_orientable()) {
    throw Error("internal: double is not a closed oriented complex");
  }

  DomainEmbedding& E = result.embedding;
  E.domain_simplices.resize(static_cast<std::size_t>(dim) + 1);
  E.mirror_map.resize(static_cast<std::size_t>(dim) + 1);
  for (int p = 0; p <= dim; ++p) {
    auto& dom = E.domain_simplices[static_cast<std::size_t>(p)];
    dom.reserve(static_cast<std::size_t>(domain.num_simplices(p)));
    for (Index i = 0; i < domain.num_simplices(p); ++i) {
      auto found = D.find_simplex(p, domain.simplex(p, i).vertices);
      if (!found) throw Error("internal: domain simplex missing from the double");
      dom.push_back(*found);
    }
    auto& mir = E.mirror_map[static_cast<std::size_t>(p)];
    mir.resize(static_cast<std::size_t>(D.num_simplices(p)));
    for (Index i = 0; i < D.num_simplices(p); ++i) {
      std::vector<std::int32_t> t = D.simplex(p, i).vertices;
      for (auto& v : t) {
        const std::int32_t orig = unmirror[static_cast<std::size_t>(v)];
        v = (v == orig) ? mirror_vertex[static_cast<std::size_t>(orig)] : orig;
      }
      std::sort(t.begin(), t.end());
      auto found = D.find_simplex(p, t);
      if (!found) throw Error("internal: mirror image missing from the double");
      mir[static_cast<std::size_t>(i)] = *found;
    }
    // count check: each boundary-closure simplex is shared once
    Index nbd = 0;
    for (bool b : on_boundary[static_cast<std::size_t>(p)]) nbd += b ? 1 : 0;
    if (D.num_simplices(p) != 2 * domain.num_simplices(p) - nbd) {
      throw Error("internal: double has wrong simplex count in dimension " + std::to_string(p));
    }
  }

  // Both copies inherit the domain metric.
  Eigen::VectorXd lengths(D.num_simplices(1));
  for (Index e = 0; e < D.num_simplices(1); ++e) {
    const auto& t = D.simplex(1, e).vertices;
    const std::int32_t a = unmirror[static_cast<std::size_t>(t[0])];
    const std::int32_t b = unmirror[static_cast<std::size_t>(t[1])];
    lengths[e] = domain.edge_length(domain.edge_index(a, b));
  }
  D.set_edge_lengths(lengths);

  return result;
}

}  // namespace hodgedec
