#include "helpers.hpp"

#include "nrpca/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace nrpca;

namespace {

DataMatrix scalar(double x) { return DataMatrix(FrameGeometry(1, 1, 1), Matrix::Constant(1, 1, x), 0.0, 10.0); }

DataMatrix random_matrix(const FrameGeometry& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> draw(1.0, 9.0);
  Matrix values(static_cast<Eigen::Index>(g.pixels()), static_cast<Eigen::Index>(g.frames()));
  for (Eigen::Index i = 0; i < values.size(); ++i) values.data()[i] = draw(rng);
  return DataMatrix(g, values, 0.0, 10.0);
}

}  // namespace

TEST_CASE("objective values") {
  Vector u(2), v(3);
  u << 1, 2;
  v << 3, 1, 2;
  // ||u||^2 = 5, ||v||^2 = 14.
  CHECK(objective(DataMatrix(FrameGeometry(2, 1, 3), u * v.transpose(), 0.0, 10.0), u, v, 2.0) == 18.0);

  const Vector a = Vector::Constant(2, 1.0);
  const Vector b = (Vector(2) << 1.0, 1.0).finished();
  CHECK(objective(DataMatrix(FrameGeometry(2, 1, 2), Matrix::Ones(2, 2), 0.0, 1.0), a, b, 1.0) == 0.0);

  const DataMatrix Z(FrameGeometry(1, 1, 2), Matrix::Zero(1, 2), 0.0, 1.0);
  CHECK(objective(Z, Vector::Zero(1), (Vector(2) << 1, 0).finished(), 3.5) == 3.5);

  const DataMatrix X = test::example_matrix();
  const Decomposition w = test::example_solution();
  CHECK(objective(X, w.u, w.v, 1.0) == doctest::Approx(765.0));

  CHECK_THROWS_AS(objective(X, Vector::Ones(3), w.v, 1.0), InputError);
}

TEST_CASE("subgradient sign conventions") {
  // d/du |2 - u v| at u = v = 1 is -1.
  const Subgradient g = subgradient(scalar(2.0), Vector::Ones(1), Vector::Ones(1), 0.0);
  CHECK(g.g_u(0) == -1.0);
  CHECK(g.g_v(0) == -1.0);

  // Exact, balanced fit: zero is a valid subgradient.
  Vector u = (Vector(2) << 3, 4).finished();
  Vector v = (Vector(2) << 5, 0).finished();  // ||u|| = ||v|| = 5
  const DataMatrix X(FrameGeometry(2, 1, 2), u * v.transpose(), 0.0, 100.0);
  const Subgradient z = subgradient(X, u, v, 1.0);
  CHECK(z.g_u.isZero());
  CHECK(z.g_v.isZero());
}

TEST_CASE("subgradient matches finite differences at smooth points") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> draw(0.5, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const FrameGeometry g(3, 2, 5);
    const DataMatrix X = random_matrix(g, rng);
    Vector u(6), v(5);
    for (auto& x : u) x = draw(rng);
    for (auto& x : v) x = draw(rng);
    const double lambda = 0.7;
    const Subgradient s = subgradient(X, u, v, lambda);
    Vector analytic(11);
    analytic << s.g_u, s.g_v;
    Vector numeric(11);
    const double step = 1e-6;
    for (Eigen::Index i = 0; i < 11; ++i) {
      Vector up = u, vp = v, um = u, vm = v;
      if (i < 6) {
        up(i) += step;
        um(i) -= step;
      } else {
        vp(i - 6) += step;
        vm(i - 6) -= step;
      }
      numeric(i) = (objective(X, up, vp, lambda) - objective(X, um, vm, lambda)) / (2 * step);
    }
    CHECK((analytic - numeric).norm() / analytic.norm() < 1e-5);
  }
}

TEST_CASE("stochastic data-term gradient is unbiased") {
  std::mt19937_64 rng(42);
  const FrameGeometry g(3, 2, 4);
  const DataMatrix X = random_matrix(g, rng);
  const Vector u = (Vector(6) << 1.1, 2.3, 0.7, 1.9, 2.8, 1.4).finished();
  const Vector v = (Vector(4) << 2.1, 1.3, 3.2, 0.9).finished();
  const Subgradient full = subgradient(X, u, v, 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, 23);
  Vector mean_u = Vector::Zero(6), mean_v = Vector::Zero(4);
  const int samples = 10000;
  std::vector<SampleEntry> batch(32);
  for (int s = 0; s < samples; ++s) {
    for (auto& e : batch) {
      const std::size_t idx = pick(rng);
      e = {idx % 6, idx / 6};
    }
    const Subgradient sg = subgradient(X, u, v, 0.0, std::span<const SampleEntry>(batch));
    mean_u += sg.g_u;
    mean_v += sg.g_v;
  }
  mean_u /= samples;
  mean_v /= samples;
  Vector a(10), b(10);
  a << mean_u, mean_v;
  b << full.g_u, full.g_v;
  CHECK((a - b).norm() / b.norm() < 1e-2);

  // Exact expectation over single-entry samples drawn uniformly.
  Vector exact_u = Vector::Zero(6), exact_v = Vector::Zero(4);
  for (std::size_t idx = 0; idx < 24; ++idx) {
    const std::vector<SampleEntry> one{{idx % 6, idx / 6}};
    const Subgradient sg = subgradient(X, u, v, 0.0, std::span<const SampleEntry>(one));
    exact_u += sg.g_u / 24.0;
    exact_v += sg.g_v / 24.0;
  }
  CHECK((exact_u - full.g_u).norm() < 1e-12);
  CHECK((exact_v - full.g_v).norm() < 1e-12);
}

TEST_CASE("regularizer term is applied in full for sampled gradients") {
  const DataMatrix X = scalar(2.0);
  const std::vector<SampleEntry> none;
  const Subgradient g = subgradient(X, Vector::Constant(1, 3.0), Vector::Ones(1), 1.0, std::span<const SampleEntry>(none));
  CHECK(g.g_u(0) == 6.0);
  CHECK(g.g_v(0) == -2.0);
}

TEST_CASE("scaling invariance of the data term") {
  std::mt19937_64 rng(43);
  const FrameGeometry g(4, 2, 6);
  const DataMatrix X = random_matrix(g, rng);
  Vector u = Vector::Constant(8, 1.5), v = Vector::Constant(6, 2.0);
  u(3) = 2.5;
  const double base = objective(X, u, v, 0.0);
  for (double a : {0.25, 0.5, 2.0, 8.0}) CHECK(objective(X, a * u, v / a, 0.0) == base);
  for (double a : {0.3, 1.7, 3.1}) CHECK(objective(X, a * u, v / a, 0.0) == doctest::Approx(base).epsilon(1e-12));

  // Balanced point: any rescaling raises the regularized objective.
  const Decomposition b = balance(Decomposition{u, v, 1.0});
  const double at = objective(X, b.u, b.v, 1.0);
  for (double a : {0.5, 0.9, 1.1, 2.0}) CHECK(objective(X, a * b.u, b.v / a, 1.0) > at);
}

TEST_CASE("step schedule") {
  SolverConfig c;
  CHECK(step_size(c, 0) == c.learning_rate);
  CHECK(step_size(c, 2999) == c.learning_rate);
  CHECK(step_size(c, 4999) == doctest::Approx(c.final_learning_rate));
  for (std::size_t t = 3000; t + 1 < 5000; ++t) CHECK(step_size(c, t + 1) < step_size(c, t));
  c.final_learning_rate = c.learning_rate;
  CHECK(step_size(c, 4999) == c.learning_rate);
}

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    SolverConfig x;
    mutate(x);
    CHECK_THROWS_AS(x.validate(), InputError);
  };
  bad([](SolverConfig& x) { x.learning_rate = 0; });
  bad([](SolverConfig& x) { x.momentum = 1.0; });
  bad([](SolverConfig& x) { x.lambda = -1; });
  bad([](SolverConfig& x) { x.iterations = 0; });
  bad([](SolverConfig& x) { x.final_learning_rate = 1.0; });
  bad([](SolverConfig& x) { x.trace_stride = 0; });
  bad([](SolverConfig& x) { x.init_scale = 0; });
}

TEST_CASE("1x1 problem converges to the balanced root") {
  // Grid search confirms the unique minimizer of |4 - uv| + |u^2 - v^2| on [0,5]^2.
  double best = std::numeric_limits<double>::infinity();
  double bu = 0, bv = 0;
  for (int i = 0; i <= 500; ++i) {
    for (int j = 0; j <= 500; ++j) {
      const double a = i * 0.01, b = j * 0.01;
      const double f = std::abs(4 - a * b) + std::abs(a * a - b * b);
      if (f < best) {
        best = f;
        bu = a;
        bv = b;
      }
    }
  }
  REQUIRE(bu == doctest::Approx(2.0));
  REQUIRE(bv == doctest::Approx(2.0));

  const SolveResult r = solve(scalar(4.0), SolverConfig{});
  CHECK(std::abs(r.w.u(0) - 2.0) < 1e-2);
  CHECK(std::abs(r.w.v(0) - 2.0) < 1e-2);
  CHECK(r.final_objective < 1e-2);
}

TEST_CASE("zero data drives the iterate to zero") {
  const DataMatrix Z(FrameGeometry(2, 2, 3), Matrix::Zero(4, 3), 0.0, 1.0);
  const SolveResult r = solve(Z, SolverConfig{});
  CHECK(r.final_objective < 1e-2);
  CHECK(r.w.u.maxCoeff() * r.w.v.maxCoeff() < 1e-2);
}

TEST_CASE("iterates stay nonnegative and the run is deterministic") {
  std::mt19937_64 rng(44);
  const DataMatrix X = random_matrix(FrameGeometry(3, 3, 9), rng);
  SolverConfig c;
  c.iterations = 800;
  c.learning_rate = 1e-2;
  c.final_learning_rate = 1e-4;
  c.seed = 7;
  const SolveResult a = solve(X, c);
  const SolveResult b = solve(X, c);
  CHECK(a.w.u.minCoeff() >= 0.0);
  CHECK(a.w.v.minCoeff() >= 0.0);
  CHECK(a.w.u == b.w.u);
  CHECK(a.w.v == b.w.v);
  CHECK(a.objective_trace == b.objective_trace);
  CHECK(a.objective_trace.size() == 800);
  c.seed = 8;
  CHECK_FALSE(solve(X, c).w.u == a.w.u);

  c.batch = 5;
  const SolveResult s1 = solve(X, c), s2 = solve(X, c);
  CHECK(s1.w.u == s2.w.u);
  CHECK(s1.w.u.minCoeff() >= 0.0);

  c.batch = 0;
  c.trace_stride = 100;
  CHECK(solve(X, c).objective_trace.size() == 8);
}

TEST_CASE("objective trend is non-increasing with a small step") {
  Matrix values(4, 2);
  values << 3, 4, 5, 3, 4, 6, 2, 3;
  const DataMatrix X(FrameGeometry(2, 2, 2), values, 0.0, 10.0);
  SolverConfig c;
  c.learning_rate = 1e-6;
  c.final_learning_rate = 1e-6;
  c.iterations = 20000;
  const SolveResult r = solve(X, c);
  const auto& tr = r.objective_trace;
  double window = 0.0;
  for (std::size_t i = 0; i < 100; ++i) window += tr[i];
  double prev = window;
  for (std::size_t i = 100; i < tr.size(); ++i) {
    window += tr[i] - tr[i - 100];
    REQUIRE(window <= prev + 1e-9 * std::abs(prev));
    prev = window;
  }
  CHECK(tr.back() < tr.front());
}

TEST_CASE("divergence is reported") {
  SolverConfig c;
  c.learning_rate = 1e300;
  c.final_learning_rate = 1e300;
  c.iterations = 50;
  CHECK_THROWS_AS(solve(scalar(4.0), c), SolverDiverged);
}

TEST_CASE("multi-restart on the 1x1 problem") {
  const MultiRestartResult r = multi_restart(scalar(4.0), 10, SolverConfig{}, 2);
  CHECK(r.results.size() == 10);
  CHECK(r.failures.empty());
  CHECK(r.max_relative_distance < 1e-3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(r.seeds[i] == i);
  CHECK_THROWS_AS(multi_restart(scalar(4.0), 1, SolverConfig{}), InputError);

  const MultiRestartResult serial = multi_restart(scalar(4.0), 4, SolverConfig{}, 1);
  const MultiRestartResult parallel = multi_restart(scalar(4.0), 4, SolverConfig{}, 3);
  for (std::size_t i = 0; i < 4; ++i) CHECK(serial.results[i].w.u == parallel.results[i].w.u);
}
