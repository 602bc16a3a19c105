#pragma once

#include "nrpca/core.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace nrpca {

/// Union-find with path compression and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t count);

  std::size_t find(std::size_t x);
  /// Returns true when x and y were in different sets.
  bool unite(std::size_t x, std::size_t y);
  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t components_;
};

/// Bipartite graph on pixel vertices 0..m-1 and frame vertices m..m+n-1.
/// An edge (h, k) joins pixel h to frame vertex m + k. Indices are 0-based.
class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t m, std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::size_t pixel_vertices() const { return m_; }
  std::size_t frame_vertices() const { return n_; }
  std::size_t vertex_count() const { return m_ + n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// Validates and deduplicates the edge set.
BipartiteGraph build_graph(const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::size_t m,
                           std::size_t n);

struct DegreeStats {
  std::size_t max_degree = 0;
  std::size_t min_degree = 0;
  /// 0-based vertex (pixels first, then frames) attaining each extreme.
  std::size_t max_vertex = 0;
  std::size_t min_vertex = 0;
  std::vector<std::size_t> degrees;
};

DegreeStats degree_stats(const BipartiteGraph& g);
bool is_connected(const BipartiteGraph& g);

/// Graphs with edge set F or B of the given per-frame sets.
BipartiteGraph foreground_graph(const PerFrameSets& sets);
BipartiteGraph background_graph(const PerFrameSets& sets);

/// Degree extremes without materializing edges. Per-vertex degrees are only
/// filled when `with_degrees` is set.
DegreeStats foreground_degree_stats(const PerFrameSets& sets, bool with_degrees = false);
DegreeStats background_degree_stats(const PerFrameSets& sets, bool with_degrees = false);

/// Connectivity of the background graph, scanning the bitmap directly.
bool background_graph_connected(const PerFrameSets& sets);

/// Largest frame count accepted by the exhaustive checker.
inline constexpr std::size_t kExhaustiveMaxFrames = 20;

/// Exhaustive background-connectivity test: every pixel is background in some
/// frame, and for every split of the frames into two nonempty groups the
/// unions of their background pixel sets intersect. Only complementary
/// splits are enumerated; any cover K1 u K2 = K has unions that contain the
/// unions of a complementary split (K1, K \ K1), so the reduction is exact.
/// Throws InputError above kExhaustiveMaxFrames frames.
bool background_connected_exhaustive(const PerFrameSets& sets);

/// Per-frame containment of foreground sets: F_inner(k) subset of F_outer(k).
bool is_embedded(const PerFrameSets& inner, const PerFrameSets& outer);

}  // namespace nrpca
