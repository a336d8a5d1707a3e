#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hodgedec/errors.hpp"

namespace hodgedec {

using Index = Eigen::Index;

/// One oriented p-simplex. The vertex tuple is stored sorted ascending;
/// `orientation` is +1 when the intended orientation is the sorted order
/// and -1 when it is an odd permutation of it.
struct Simplex {
  std::vector<std::int32_t> vertices;
  int orientation = 1;
};

/**
 * Oriented simplicial complex of arbitrary top dimension with embedded
 * vertex coordinates.
 *
 * All lower-dimensional simplices are enumerated (lexicographically on
 * their sorted vertex tuples) and the signed boundary operators are
 * assembled over the integers at construction time. Instances are built
 * through `build_complex`, `generate_torus`, `riemannian_double` or the
 * mesh loaders, and are immutable afterwards; concurrent reads are safe.
 *
 * An optional per-edge length vector overrides lengths derived from the
 * coordinates, so a complex can carry an intrinsic flat metric that no
 * 3d embedding realizes (the generated torus does this).
 */
class SimplicialComplex {
 public:
  std::uint64_t id() const { return id_; }
  int dim() const { return dim_; }

  Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
  Index num_simplices(int p) const;
  const std::vector<Eigen::Vector3d>& vertex_positions() const { return vertices_; }
  const std::vector<Simplex>& simplices(int p) const;
  const Simplex& simplex(int p, Index i) const { return simplices(p)[static_cast<std::size_t>(i)]; }

  /// Signed incidence matrix taking p-chains to (p-1)-chains, 1 <= p <= dim.
  const Eigen::SparseMatrix<int>& boundary_operator(int p) const;

  /// Index of the p-simplex with the given sorted vertex tuple, if present.
  std::optional<Index> find_simplex(int p, const std::vector<std::int32_t>& sorted_tuple) const;
  Index edge_index(std::int32_t a, std::int32_t b) const;

  bool is_orientable() const { return orientable_; }

  int euler_characteristic() const;

  /// Indices of codimension-1 simplices with exactly one coface.
  const std::vector<Index>& boundary_facets() const { return boundary_facets_; }
  bool has_boundary() const { return !boundary_facets_.empty(); }
  /// Marks per dimension which simplices lie in the closure of the boundary.
  const std::vector<std::vector<bool>>& boundary_closure() const { return boundary_closure_; }

  bool has_explicit_edge_lengths() const { return edge_lengths_.size() > 0; }
  /// Length of edge e: explicit if set, Euclidean otherwise.
  double edge_length(Index e) const;
  void set_edge_lengths(const Eigen::VectorXd& lengths);

  /// Vertex-to-vertex adjacency derived from the edge list.
  std::vector<std::vector<Index>> vertex_adjacency() const;

 private:
  friend SimplicialComplex build_complex(std::vector<Eigen::Vector3d> vertices,
                                         const std::vector<std::vector<std::int32_t>>& top_simplices);
  SimplicialComplex() = default;

  std::uint64_t id_ = 0;
  int dim_ = 0;
  bool orientable_ = true;
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::vector<Simplex>> simplices_;            // [p]
  std::vector<Eigen::SparseMatrix<int>> boundary_;         // [p], valid for p >= 1
  std::vector<std::map<std::vector<std::int32_t>, Index>> index_;  // [p] tuple -> index
  std::vector<Index> boundary_facets_;
  std::vector<std::vector<bool>> boundary_closure_;
  Eigen::VectorXd edge_lengths_;
};

/**
 * Builds a complex from vertex coordinates and top-simplex vertex windings
 * (each winding has dim+1 entries and fixes the simplex orientation).
 *
 * Enumerates every face, assembles boundary operators, checks that each
 * codimension-1 simplex has at most two cofaces, and propagates a
 * consistent orientation across each connected component where one
 * exists; otherwise the complex is flagged non-orientable and the input
 * orientations are kept.
 */
SimplicialComplex build_complex(std::vector<Eigen::Vector3d> vertices,
                                const std::vector<std::vector<std::int32_t>>& top_simplices);

/// Flat triangulated torus on an m-by-n periodic grid (m, n >= 3):
/// m*n vertices, 3mn edges, 2mn triangles, each grid square split along
/// its diagonal. Carries explicit edge lengths of the flat metric.
SimplicialComplex generate_torus(int m, int n);

/**
 * Identification of a domain inside its double.
 *
 * `domain_simplices[p][i]` is the index, inside the doubled complex, of
 * the i-th p-simplex of the original domain. `mirror_map[p]` is the
 * involution swapping the two copies; simplices in the boundary closure
 * are its fixed points.
 */
struct DomainEmbedding {
  std::vector<std::vector<Index>> domain_simplices;
  std::vector<std::vector<Index>> mirror_map;
};

struct DoubledComplex {
  SimplicialComplex complex;
  DomainEmbedding embedding;
};

/**
 * Closed double of a manifold with boundary: two isometric copies glued
 * along the boundary, the second copy carrying reversed orientation.
 * Requires a nonempty boundary and an orientable input.
 */
DoubledComplex riemannian_double(const SimplicialComplex& domain);

}  // namespace hodgedec
