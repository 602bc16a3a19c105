#include "nrpca/graphs.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

namespace nrpca {

DisjointSets::DisjointSets(std::size_t count) : parent_(count), size_(count, 1), components_(count) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) {
    const std::size_t next = parent_[x];
    parent_[x] = root;
    x = next;
  }
  return root;
}

bool DisjointSets::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (size_[x] < size_[y]) std::swap(x, y);
  parent_[y] = x;
  size_[x] += size_[y];
  --components_;
  return true;
}

BipartiteGraph::BipartiteGraph(std::size_t m, std::size_t n,
                               std::vector<std::pair<std::size_t, std::size_t>> edges)
    : m_(m), n_(n), edges_(std::move(edges)) {}

BipartiteGraph build_graph(const std::vector<std::pair<std::size_t, std::size_t>>& edges, std::size_t m,
                           std::size_t n) {
  for (const auto& [h, k] : edges) {
    if (h >= m || k >= n) {
      throw InputError("edge (" + std::to_string(h) + ", " + std::to_string(k) +
                       ") lies outside the measurement set");
    }
  }
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  return {m, n, std::move(sorted)};
}

namespace {

DegreeStats extremes(std::vector<std::size_t> degrees, bool keep) {
  DegreeStats s;
  if (degrees.empty()) return s;
  const auto [lo, hi] = std::minmax_element(degrees.begin(), degrees.end());
  s.min_degree = *lo;
  s.max_degree = *hi;
  s.min_vertex = static_cast<std::size_t>(lo - degrees.begin());
  s.max_vertex = static_cast<std::size_t>(hi - degrees.begin());
  if (keep) s.degrees = std::move(degrees);
  return s;
}

}  // namespace

DegreeStats degree_stats(const BipartiteGraph& g) {
  std::vector<std::size_t> degrees(g.vertex_count(), 0);
  for (const auto& [h, k] : g.edges()) {
    ++degrees[h];
    ++degrees[g.pixel_vertices() + k];
  }
  return extremes(std::move(degrees), true);
}

bool is_connected(const BipartiteGraph& g) {
  DisjointSets ds(g.vertex_count());
  for (const auto& [h, k] : g.edges()) {
    ds.unite(h, g.pixel_vertices() + k);
  }
  return ds.components() == 1;
}

BipartiteGraph foreground_graph(const PerFrameSets& sets) {
  return {sets.pixels(), sets.frames(), sets.foreground_entries()};
}

BipartiteGraph background_graph(const PerFrameSets& sets) {
  return {sets.pixels(), sets.frames(), sets.background_entries()};
}

DegreeStats foreground_degree_stats(const PerFrameSets& sets, bool with_degrees) {
  std::vector<std::size_t> degrees(sets.pixels() + sets.frames());
  for (std::size_t h = 0; h < sets.pixels(); ++h) degrees[h] = sets.foreground_at_pixel(h);
  for (std::size_t k = 0; k < sets.frames(); ++k) {
    degrees[sets.pixels() + k] = sets.foreground_in_frame(k);
  }
  return extremes(std::move(degrees), with_degrees);
}

DegreeStats background_degree_stats(const PerFrameSets& sets, bool with_degrees) {
  std::vector<std::size_t> degrees(sets.pixels() + sets.frames());
  for (std::size_t h = 0; h < sets.pixels(); ++h) {
    degrees[h] = sets.frames() - sets.foreground_at_pixel(h);
  }
  for (std::size_t k = 0; k < sets.frames(); ++k) {
    degrees[sets.pixels() + k] = sets.pixels() - sets.foreground_in_frame(k);
  }
  return extremes(std::move(degrees), with_degrees);
}

bool background_graph_connected(const PerFrameSets& sets) {
  const std::size_t m = sets.pixels();
  DisjointSets ds(m + sets.frames());
  for (std::size_t k = 0; k < sets.frames(); ++k) {
    for (std::size_t h = 0; h < m; ++h) {
      if (sets.is_background(h, k)) ds.unite(h, m + k);
    }
    if (ds.components() == 1) return true;
  }
  return ds.components() == 1;
}

bool background_connected_exhaustive(const PerFrameSets& sets) {
  const std::size_t n = sets.frames();
  const std::size_t m = sets.pixels();
  if (n > kExhaustiveMaxFrames) {
    throw InputError("exhaustive background check is limited to " + std::to_string(kExhaustiveMaxFrames) +
                     " frames");
  }
  const std::size_t words = (m + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> per_frame(n, Bits(words, 0));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t h = 0; h < m; ++h) {
      if (sets.is_background(h, k)) per_frame[k][h / 64] |= std::uint64_t{1} << (h % 64);
    }
  }
  auto union_of = [&](std::uint64_t mask, Bits& out) {
    std::fill(out.begin(), out.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
      if ((mask >> k) & 1U) {
        for (std::size_t w = 0; w < words; ++w) out[w] |= per_frame[k][w];
      }
    }
  };

  // Condition 1: every pixel is background somewhere.
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  Bits u1(words), u2(words);
  union_of(all, u1);
  for (std::size_t h = 0; h < m; ++h) {
    if (!((u1[h / 64] >> (h % 64)) & 1U)) return false;
  }

  // Condition 2 over complementary splits; fixing frame 0 in the first group
  // visits each unordered split once.
  for (std::uint64_t mask = 1; mask < all; mask += 2) {
    union_of(mask, u1);
    union_of(all & ~mask, u2);
    bool meet = false;
    for (std::size_t w = 0; w < words && !meet; ++w) meet = (u1[w] & u2[w]) != 0;
    if (!meet) return false;
  }
  return true;
}

bool is_embedded(const PerFrameSets& inner, const PerFrameSets& outer) {
  if (!(inner.geometry() == outer.geometry())) {
    throw InputError("embedding requires identical geometries");
  }
  for (std::size_t k = 0; k < inner.frames(); ++k) {
    for (std::size_t h = 0; h < inner.pixels(); ++h) {
      if (inner.is_foreground(h, k) && !outer.is_foreground(h, k)) return false;
    }
  }
  return true;
}

}  // namespace nrpca
