#include "hodgedec/cover.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>
#include <string>

namespace hodgedec {

namespace {

// BFS hop distances from one source, truncated at max_depth.
std::vector<Index> bfs(const std::vector<std::vector<Index>>& adj, Index source,
                       Index max_depth) {
  std::vector<Index> dist(adj.size(), -1);
  dist[static_cast<std::size_t>(source)] = 0;
  std::deque<Index> queue{source};
  while (!queue.empty()) {
    const Index v = queue.front();
    queue.pop_front();
    const Index dv = dist[static_cast<std::size_t>(v)];
    if (dv >= max_depth) continue;
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dv + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

std::vector<CoverPatch> build_patches(const SimplicialComplex& K,
                                      const std::vector<Index>& seeds, int radius_hops,
                                      int overlap_hops) {
  if (seeds.empty()) throw InvalidParameter("patch construction needs at least one seed");
  if (radius_hops < 2 * overlap_hops || overlap_hops < 1) {
    throw InvalidParameter("need radius_hops >= 2 * overlap_hops >= 2");
  }
  const auto adj = K.vertex_adjacency();
  const int dim = K.dim();
  const Index inner = radius_hops - overlap_hops;

  std::vector<CoverPatch> patches;
  patches.reserve(seeds.size());
  for (Index seed : seeds) {
    if (seed < 0 || seed >= K.num_vertices()) {
      throw InvalidParameter("seed vertex out of range");
    }
    CoverPatch patch;
    patch.seed = seed;
    patch.hop_distance = bfs(adj, seed, radius_hops);
    patch.simplices.resize(static_cast<std::size_t>(dim) + 1);
    patch.interior.resize(static_cast<std::size_t>(dim) + 1);
    for (int p = 0; p <= dim; ++p) {
      const auto& list = K.simplices(p);
      for (std::size_t i = 0; i < list.size(); ++i) {
        Index worst = 0;
        for (std::int32_t v : list[i].vertices) {
          const Index d = patch.hop_distance[static_cast<std::size_t>(v)];
          worst = (d < 0) ? std::numeric_limits<Index>::max() : std::max(worst, d);
          if (worst == std::numeric_limits<Index>::max()) break;
        }
        if (worst <= radius_hops) {
          patch.simplices[static_cast<std::size_t>(p)].push_back(static_cast<Index>(i));
          if (worst <= inner) {
            patch.interior[static_cast<std::size_t>(p)].push_back(static_cast<Index>(i));
          }
        }
      }
    }
    patches.push_back(std::move(patch));
  }
  return patches;
}

std::vector<Cochain> partition_of_unity(const SimplicialComplex& K,
                                        const std::vector<CoverPatch>& patches,
                                        int radius_hops) {
  const Index nv = K.num_vertices();
  const std::size_t N = patches.size();
  std::vector<Cochain> chi(N);
  for (std::size_t j = 0; j < N; ++j) {
    chi[j] = Cochain{0, K.id(), Eigen::VectorXd::Zero(nv)};
  }
  for (Index v = 0; v < nv; ++v) {
    double sum = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const Index d = patches[j].hop_distance[static_cast<std::size_t>(v)];
      if (d < 0 || d >= radius_hops) continue;
      const double t = 1.0 - static_cast<double>(d) / radius_hops;
      const double w = t * t;
      chi[j].values[v] = w;
      sum += w;
    }
    if (!(sum > 0.0)) {
      throw CoverageFailure("vertex " + std::to_string(v) + " carries no bump weight");
    }
    for (std::size_t j = 0; j < N; ++j) chi[j].values[v] /= sum;
    // pin the pointwise sum to one exactly
    for (int rounds = 0; rounds < 2; ++rounds) {
      double total = 0.0;
      std::size_t largest = 0;
      for (std::size_t j = 0; j < N; ++j) {
        total += chi[j].values[v];
        if (chi[j].values[v] > chi[largest].values[v]) largest = j;
      }
      if (total == 1.0) break;
      chi[largest].values[v] += 1.0 - total;
    }
  }
  return chi;
}

Cover build_cover(const SimplicialComplex& K, int radius_hops, int overlap_hops,
                  std::uint64_t rng_seed) {
  if (radius_hops < 2 * overlap_hops || overlap_hops < 1) {
    throw InvalidParameter("need radius_hops >= 2 * overlap_hops >= 2");
  }
  const auto adj = K.vertex_adjacency();
  const Index nv = K.num_vertices();
  const int dim = K.dim();

  std::mt19937 rng(static_cast<std::mt19937::result_type>(rng_seed));
  std::uniform_int_distribution<Index> pick(0, nv - 1);
  std::vector<Index> seeds{pick(rng)};

  // Farthest-point sampling until the inner balls cover every vertex.
  const Index inner = radius_hops - overlap_hops;
  std::vector<Index> nearest = bfs(adj, seeds[0], nv);
  auto absorb = [&](Index seed) {
    const auto d = bfs(adj, seed, nv);
    for (Index v = 0; v < nv; ++v) {
      if (d[static_cast<std::size_t>(v)] >= 0 &&
          (nearest[static_cast<std::size_t>(v)] < 0 ||
           d[static_cast<std::size_t>(v)] < nearest[static_cast<std::size_t>(v)])) {
        nearest[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(v)];
      }
    }
  };
  while (true) {
    Index farthest = -1;
    Index worst = inner;
    for (Index v = 0; v < nv; ++v) {
      const Index d = nearest[static_cast<std::size_t>(v)];
      if (d < 0 || d > worst) {
        worst = (d < 0) ? std::numeric_limits<Index>::max() : d;
        farthest = v;
      }
    }
    if (farthest < 0) break;
    seeds.push_back(farthest);
    absorb(farthest);
  }

  // A simplex can straddle two inner balls without lying in either; top
  // up with seeds until every simplex is interior somewhere.
  std::vector<CoverPatch> patches;
  while (true) {
    patches = build_patches(K, seeds, radius_hops, overlap_hops);
    std::vector<std::vector<char>> covered(static_cast<std::size_t>(dim) + 1);
    for (int p = 0; p <= dim; ++p) {
      covered[static_cast<std::size_t>(p)]
          .assign(static_cast<std::size_t>(K.num_simplices(p)), 0);
    }
    for (const auto& patch : patches) {
      for (int p = 0; p <= dim; ++p) {
        for (Index i : patch.interior[static_cast<std::size_t>(p)]) {
          covered[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] = 1;
        }
      }
    }
    Index missing_vertex = -1;
    for (int p = 0; p <= dim && missing_vertex < 0; ++p) {
      const auto& flags = covered[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < flags.size(); ++i) {
        if (!flags[i]) {
          missing_vertex = K.simplex(p, static_cast<Index>(i)).vertices[0];
          break;
        }
      }
    }
    if (missing_vertex < 0) break;
    if (static_cast<Index>(seeds.size()) >= nv) {
      throw CoverageFailure("could not cover every simplex with patch interiors");
    }
    seeds.push_back(missing_vertex);
    absorb(missing_vertex);
  }

  Cover cover;
  cover.complex_id = K.id();
  cover.radius_hops = radius_hops;
  cover.overlap_hops = overlap_hops;
  cover.chi = partition_of_unity(K, patches, radius_hops);
  cover.patches = std::move(patches);
  return cover;
}

Cochain commutator(const Cochain& chi, const Cochain& u, const Operators& ops) {
  Cochain prod = scalar_multiply(chi, u, ops);
  Cochain left = hodge_laplacian(prod, ops);
  Cochain right = scalar_multiply(chi, hodge_laplacian(u, ops), ops);
  return left - right;
}

}  // namespace hodgedec
