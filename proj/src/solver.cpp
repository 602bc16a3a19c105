#include "nrpca/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace nrpca {

namespace {

inline double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

void check_dims(const DataMatrix& X, const Vector& u, const Vector& v) {
  if (static_cast<std::size_t>(u.size()) != X.rows() || static_cast<std::size_t>(v.size()) != X.cols()) {
    throw InputError("u and v do not match the data matrix dimensions");
  }
}

double regularizer_gap(const Vector& u, const Vector& v) { return u.squaredNorm() - v.squaredNorm(); }

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda >= 0.0)) throw InputError("lambda must be nonnegative");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw InputError("momentum must lie in [0, 1)");
  if (iterations == 0) throw InputError("iterations must be positive");
  if (!(init_scale > 0.0)) throw InputError("init scale must be positive");
  if (!(final_learning_rate > 0.0 && final_learning_rate <= learning_rate)) {
    throw InputError("final learning rate must lie in (0, learning_rate]");
  }
  if (!(decay_start >= 0.0 && decay_start <= 1.0)) throw InputError("decay start must lie in [0, 1]");
  if (trace_stride == 0) throw InputError("trace stride must be positive");
}

double objective(const DataMatrix& X, const Vector& u, const Vector& v, double lambda) {
  check_dims(X, u, v);
  const Matrix& values = X.values();
  double data = 0.0;
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    const double vk = v(k);
    const double* col = values.col(k).data();
    for (Eigen::Index h = 0; h < values.rows(); ++h) {
      data += std::abs(col[h] - u(h) * vk);
    }
  }
  return data + lambda * std::abs(regularizer_gap(u, v));
}

Subgradient subgradient(const DataMatrix& X, const Vector& u, const Vector& v, double lambda,
                        std::optional<std::span<const SampleEntry>> sample) {
  check_dims(X, u, v);
  Subgradient g{Vector::Zero(u.size()), Vector::Zero(v.size())};
  const Matrix& values = X.values();
  if (!sample) {
    for (Eigen::Index k = 0; k < values.cols(); ++k) {
      const double vk = v(k);
      const double* col = values.col(k).data();
      double gk = 0.0;
      for (Eigen::Index h = 0; h < values.rows(); ++h) {
        const double s = sign(u(h) * vk - col[h]);
        g.g_u(h) += s * vk;
        gk += s * u(h);
      }
      g.g_v(k) = gk;
    }
  } else if (!sample->empty()) {
    const double scale = static_cast<double>(X.rows() * X.cols()) / static_cast<double>(sample->size());
    for (const auto& [h, k] : *sample) {
      const auto hi = static_cast<Eigen::Index>(h);
      const auto ki = static_cast<Eigen::Index>(k);
      const double s = scale * sign(u(hi) * v(ki) - values(hi, ki));
      g.g_u(hi) += s * v(ki);
      g.g_v(ki) += s * u(hi);
    }
  }
  const double r = lambda * sign(regularizer_gap(u, v));
  g.g_u += 2.0 * r * u;
  g.g_v -= 2.0 * r * v;
  return g;
}

double step_size(const SolverConfig& config, std::size_t t) {
  const auto start = static_cast<std::size_t>(config.decay_start * static_cast<double>(config.iterations));
  if (t < start || config.final_learning_rate == config.learning_rate) return config.learning_rate;
  const std::size_t span = config.iterations - start;
  if (span <= 1) return config.final_learning_rate;
  const double progress = static_cast<double>(t - start) / static_cast<double>(span - 1);
  return config.learning_rate * std::pow(config.final_learning_rate / config.learning_rate, progress);
}

SolveResult solve(const DataMatrix& X, const SolverConfig& config) {
  config.validate();
  if (X.values().size() > 0 && X.values().minCoeff() < 0.0) {
    throw InputError("data matrix must be nonnegative");
  }
  const std::size_t m = X.rows();
  const std::size_t n = X.cols();
  const Matrix& values = X.values();

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, config.init_scale);
  Vector u(static_cast<Eigen::Index>(m));
  for (Eigen::Index h = 0; h < u.size(); ++h) u(h) = std::abs(normal(rng));
  Vector v = Vector::Ones(static_cast<Eigen::Index>(n));
  Vector vel_u = Vector::Zero(u.size());
  Vector vel_v = Vector::Zero(v.size());

  const bool full = config.batch == 0;
  std::uniform_int_distribution<std::size_t> pick(0, m * n - 1);
  std::vector<SampleEntry> sample(full ? 0 : config.batch);

  const std::size_t tail_start = config.iterations - std::max<std::size_t>(1, config.iterations / 10);
  double tail_objective = std::numeric_limits<double>::quiet_NaN();

  SolveResult result;
  result.objective_trace.reserve(config.iterations / config.trace_stride + 1);
  Vector g_u(u.size());
  Vector g_v(v.size());

  for (std::size_t t = 0; t < config.iterations; ++t) {
    const bool record = t % config.trace_stride == 0 || t == tail_start;
    double f = std::numeric_limits<double>::quiet_NaN();
    if (full) {
      // One pass gives both the objective and the data-term subgradient.
      g_u.setZero();
      double data = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double vk = v(static_cast<Eigen::Index>(k));
        const double* col = values.col(static_cast<Eigen::Index>(k)).data();
        const double* up = u.data();
        double* gup = g_u.data();
        double gk = 0.0;
        for (std::size_t h = 0; h < m; ++h) {
          const double r = up[h] * vk - col[h];
          const double s = sign(r);
          data += std::abs(r);
          gup[h] += s * vk;
          gk += s * up[h];
        }
        g_v(static_cast<Eigen::Index>(k)) = gk;
      }
      const double gap = regularizer_gap(u, v);
      f = data + config.lambda * std::abs(gap);
      const double reg = config.lambda * sign(gap);
      g_u += 2.0 * reg * u;
      g_v -= 2.0 * reg * v;
    } else {
      for (auto& e : sample) {
        const std::size_t idx = pick(rng);
        e = {idx % m, idx / m};
      }
      Subgradient g = subgradient(X, u, v, config.lambda, std::span<const SampleEntry>(sample));
      g_u = std::move(g.g_u);
      g_v = std::move(g.g_v);
      if (record) f = objective(X, u, v, config.lambda);
    }

    if (record) {
      if (!std::isfinite(f)) {
        throw SolverDiverged("objective became non-finite at iteration " + std::to_string(t) +
                             "; lower the learning rate");
      }
      if (t % config.trace_stride == 0) result.objective_trace.push_back(f);
      if (t == tail_start) tail_objective = f;
    }

    const double step = step_size(config, t);
    vel_u = config.momentum * vel_u - step * g_u;
    vel_v = config.momentum * vel_v - step * g_v;
    u = (u + vel_u).cwiseMax(0.0);
    v = (v + vel_v).cwiseMax(0.0);
    if (!std::isfinite(u.sum()) || !std::isfinite(v.sum())) {
      throw SolverDiverged("iterate became non-finite at iteration " + std::to_string(t) +
                           "; lower the learning rate");
    }
  }

  result.iterations_run = config.iterations;
  result.final_objective = objective(X, u, v, config.lambda);
  if (!std::isfinite(result.final_objective)) {
    throw SolverDiverged("final objective is non-finite; lower the learning rate");
  }
  const double denom = std::max(std::abs(tail_objective), 1e-12);
  result.converged = std::abs(result.final_objective - tail_objective) / denom < 1e-4;
  result.w = Decomposition{std::move(u), std::move(v), config.lambda};
  return result;
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("NRPCA_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && value > 0) return static_cast<std::size_t>(value);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

MultiRestartResult multi_restart(const DataMatrix& X, std::size_t restarts, const SolverConfig& config,
                                 std::size_t threads) {
  if (restarts < 2) throw InputError("multi-restart needs at least 2 runs");
  config.validate();
  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, restarts);

  std::vector<std::optional<SolveResult>> slots(restarts);
  std::vector<std::string> errors(restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < restarts; i = next++) {
      SolverConfig c = config;
      c.seed = config.seed + i;
      try {
        slots[i] = solve(X, c);
      } catch (const SolverDiverged& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  MultiRestartResult out;
  for (std::size_t i = 0; i < restarts; ++i) {
    if (slots[i]) {
      out.seeds.push_back(config.seed + i);
      out.results.push_back(std::move(*slots[i]));
    } else {
      out.failures.emplace_back(config.seed + i, errors[i]);
    }
  }
  if (out.results.empty()) {
    out.max_relative_distance = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  for (std::size_t i = 1; i < out.results.size(); ++i) {
    if (out.results[i].final_objective < out.results[out.reference].final_objective) out.reference = i;
  }
  const Vector ref = out.results[out.reference].w.stacked();
  const double ref_norm = ref.norm();
  for (const auto& r : out.results) {
    const double d = (r.w.stacked() - ref).norm();
    out.max_relative_distance = std::max(out.max_relative_distance, ref_norm > 0.0 ? d / ref_norm : d);
  }
  return out;
}

}  // namespace nrpca
