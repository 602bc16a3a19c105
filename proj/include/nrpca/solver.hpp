#pragma once

#include "nrpca/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrpca {

/// Raised when the iteration produces a non-finite objective.
class SolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  double lambda = 1.0;
  double learning_rate = 1e-4;
  double momentum = 0.9;
  std::size_t iterations = 5000;
  /// Sampled entries per step; 0 means the full m*n sum.
  std::size_t batch = 0;
  std::uint64_t seed = 0;
  /// Scale of the half-normal draw for u0.
  double init_scale = 1.0;
  /// Step size reached at the last iteration. The step is constant until
  /// decay_start * iterations, then decays geometrically to this value.
  /// Setting it equal to learning_rate gives a constant step.
  double final_learning_rate = 1e-8;
  double decay_start = 0.6;
  /// Record the objective every `trace_stride` iterations.
  std::size_t trace_stride = 1;

  /// Throws InputError on out-of-range values.
  void validate() const;
};

/// Index pair (h, k) of a sampled data-matrix entry.
using SampleEntry = std::pair<std::size_t, std::size_t>;

/// ||X - u v^T||_1 + lambda |u^T u - v^T v|.
double objective(const DataMatrix& X, const Vector& u, const Vector& v, double lambda);

struct Subgradient {
  Vector g_u;
  Vector g_v;
};

/// Subgradient of the objective with sign(0) = 0. Without a sample the data
/// term sums all entries; with a sample it sums the sampled entries scaled by
/// m*n / |sample|. The regularizer term is always exact.
Subgradient subgradient(const DataMatrix& X, const Vector& u, const Vector& v, double lambda,
                        std::optional<std::span<const SampleEntry>> sample = std::nullopt);

struct SolveResult {
  Decomposition w;
  std::vector<double> objective_trace;
  std::size_t iterations_run = 0;
  bool converged = false;
  double final_objective = 0.0;
};

/// Step size used at iteration t (0-based).
double step_size(const SolverConfig& config, std::size_t t);

/// Projected heavy-ball subgradient descent from u0 = |N(0, init_scale^2)|,
/// v0 = 1:
///   velocity <- momentum * velocity - step * g
///   w        <- max(0, w + velocity)
/// Deterministic for a fixed seed.
SolveResult solve(const DataMatrix& X, const SolverConfig& config);

struct MultiRestartResult {
  std::vector<SolveResult> results;
  std::vector<std::uint64_t> seeds;
  /// Seeds whose solve failed, with the diagnostic.
  std::vector<std::pair<std::uint64_t, std::string>> failures;
  std::size_t reference = 0;  // index into results with the lowest final objective
  double max_relative_distance = 0.0;
};

/// N solves with seeds config.seed, config.seed + 1, ...; distances are
/// measured against the run with the lowest final objective. Runs in
/// parallel on up to `threads` workers (0 = default_thread_count()).
MultiRestartResult multi_restart(const DataMatrix& X, std::size_t restarts, const SolverConfig& config,
                                 std::size_t threads = 0);

/// NRPCA_THREADS when set, otherwise the hardware concurrency.
std::size_t default_thread_count();

}  // namespace nrpca
