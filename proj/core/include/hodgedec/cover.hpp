#pragma once

#include <vector>

#include "hodgedec/dec.hpp"

namespace hodgedec {

/// One patch: the simplices spanned by a BFS vertex ball around a seed,
/// together with the sub-ball whose closed star stays inside the patch.
struct CoverPatch {
  Index seed = -1;
  std::vector<Index> hop_distance;           // per vertex; -1 means farther than radius
  std::vector<std::vector<Index>> simplices;  // [p], ascending indices
  std::vector<std::vector<Index>> interior;   // [p], ascending indices
};

struct Cover {
  std::uint64_t complex_id = 0;
  int radius_hops = 0;
  int overlap_hops = 0;
  std::vector<CoverPatch> patches;
  std::vector<Cochain> chi;  // partition of unity, one vertex function per patch
};

/// Patches around the given seed vertices: the patch takes every simplex
/// all of whose vertices lie within radius hops of the seed, the interior
/// those within radius - overlap hops.
std::vector<CoverPatch> build_patches(const SimplicialComplex& K,
                                      const std::vector<Index>& seeds, int radius_hops,
                                      int overlap_hops);

/// Normalized squared-hat bump weights on the patch vertex balls. Every
/// vertex must carry at least one positive weight, and each weight's
/// support stays inside its patch.
std::vector<Cochain> partition_of_unity(const SimplicialComplex& K,
                                        const std::vector<CoverPatch>& patches, int radius_hops);

/**
 * Full cover construction: seeds by farthest-point sampling on the vertex
 * graph (initial seed from the given RNG seed) until every vertex lies
 * within radius - overlap hops of a seed, then extra seeds until every
 * simplex is interior to some patch, then the partition of unity.
 * Requires radius_hops >= 2 * overlap_hops >= 2.
 */
Cover build_cover(const SimplicialComplex& K, int radius_hops, int overlap_hops,
                  std::uint64_t rng_seed = 0);

/// Bump commutator against the Laplacian: B(chi, u) = L(chi u) - chi L(u).
/// Vanishes wherever chi is locally constant; its total over a partition
/// of unity applied to a fixed u vanishes identically.
Cochain commutator(const Cochain& chi, const Cochain& u, const Operators& ops);

}  // namespace hodgedec
