#pragma once

#include "nrpca/core.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace nrpca::test {

// The two 2x2 frames of the running example.
inline std::vector<Frame> example_frames() {
  Frame a(2, 2), b(2, 2);
  a << 256, 1, 256, 1;
  b << 1, 256, 256, 256;
  return {a, b};
}

inline DataMatrix example_matrix() {
  return assemble_data_matrix(example_frames(), FrameGeometry(2, 2, 2), 1.0, 256.0);
}

// F = {(3,1),(4,1),(1,2)} in 1-based (h, k).
inline PerFrameSets example_sets() {
  return sets_from_foreground(FrameGeometry(2, 2, 2), {{2, 0}, {3, 0}, {0, 1}});
}

// Background 256 everywhere with ||u|| = ||v||: 4 (256/t)^2 = 2 t^2.
inline Decomposition example_solution() {
  const double t = 16.0 * std::pow(2.0, 0.25);
  return Decomposition{Vector::Constant(4, 256.0 / t), Vector::Constant(2, t), 1.0};
}

inline PerFrameSets random_sets(const FrameGeometry& g, double density, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(density);
  PerFrameSets s(g);
  for (std::size_t k = 0; k < g.frames(); ++k) {
    for (std::size_t h = 0; h < g.pixels(); ++h) {
      if (coin(rng)) s.set_foreground(h, k);
    }
  }
  return s;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(NRPCA_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace nrpca::test
