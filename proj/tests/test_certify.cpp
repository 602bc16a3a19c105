#include "helpers.hpp"

#include "nrpca/certify.hpp"
#include "nrpca/synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace nrpca;

TEST_CASE("necessary conditions on the example are tight") {
  const NecessaryConditions n = check_necessary(test::example_sets());
  CHECK(n.object_size.foreground == 3);
  CHECK(n.object_size.bound == 3);
  CHECK(n.object_size.tight);
  CHECK(n.all_pass());
}

TEST_CASE("necessary condition witnesses") {
  PerFrameSets covered(FrameGeometry(2, 3, 4));
  for (std::size_t h = 0; h < 6; ++h) covered.set_foreground(h, 2);
  const NecessaryConditions a = check_necessary(covered);
  CHECK_FALSE(a.frame_connectivity.pass);
  CHECK(a.frame_connectivity.witness_frame == 2);
  CHECK(a.pixel_connectivity.pass);

  PerFrameSets stuck(FrameGeometry(2, 3, 4));
  for (std::size_t k = 0; k < 4; ++k) stuck.set_foreground(4, k);
  const NecessaryConditions b = check_necessary(stuck);
  CHECK(b.frame_connectivity.pass);
  CHECK_FALSE(b.pixel_connectivity.pass);
  CHECK(b.pixel_connectivity.witness_pixel == 4);
}

TEST_CASE("necessary conditions follow from connectivity") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const PerFrameSets s = test::random_sets(FrameGeometry(2, 3, 4), 0.5, rng);
    if (background_graph_connected(s)) CHECK(check_necessary(s).all_pass());
  }
}

TEST_CASE("max relative object size") {
  CHECK(max_relative_object_size(FrameGeometry(3, 4, 1)) == 0.0);
  CHECK(max_relative_object_size(FrameGeometry(1, 1, 9)) == 0.0);
  const double big = max_relative_object_size(FrameGeometry(1000, 1000, 5));
  CHECK(std::abs(big - 4.0) / 4.0 < 0.01);
  const double ex = max_relative_object_size(FrameGeometry(2, 2, 2));
  CHECK(ex == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("common background pixel") {
  SUBCASE("example has pixel 2 in both frames") {
    const CommonPixelVerdict v = check_common_background_pixel(test::example_sets());
    CHECK(v.pass);
    CHECK(v.witness_pixel == 1);
  }
  SUBCASE("object never reaching the corner") {
    const FrameGeometry g(4, 4, 16);
    RectangleSpec r;
    r.p_m = 2;
    r.p_n = 2;
    r.speed_x = 1.0;
    const PerFrameSets s = rectangle_footprint(g, r, 0, 0, Boundary::kExit);
    const CommonPixelVerdict v = check_common_background_pixel(s);
    CHECK(v.pass);
    CHECK(v.witness_pixel == 2);  // (3, 1): first pixel below the object's rows
  }
  SUBCASE("3x3 sweep covering every pixel once") {
    const FrameGeometry g(3, 3, 9);
    PerFrameSets s(g);
    for (std::size_t k = 0; k < 9; ++k) s.set_foreground(k, k);
    const CommonPixelVerdict v = check_common_background_pixel(s);
    CHECK_FALSE(v.pass);
    CHECK(v.every_pixel_uncovered);
    CHECK_FALSE(v.witness_pixel.has_value());
    CHECK(background_graph_connected(s));
  }
}

TEST_CASE("common pixel implies a connected background graph") {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<std::size_t> md(1, 4), nd(1, 8);
  std::size_t applicable = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const FrameGeometry g(md(rng), md(rng), nd(rng));
    const PerFrameSets s = test::random_sets(g, 0.3, rng);
    if (check_common_background_pixel(s).pass) {
      ++applicable;
      REQUIRE(background_graph_connected(s));
    }
  }
  CHECK(applicable > 50);
}

TEST_CASE("condition number") {
  CHECK(condition_number(Decomposition{Vector::Ones(3), Vector::Ones(2), 1.0}) == 1.0);
  CHECK(condition_number(Decomposition{(Vector(2) << 2, 4).finished(), Vector::Ones(1), 1.0}) == 4.0);
  CHECK_THROWS_AS(condition_number(Decomposition{(Vector(2) << 0, 4).finished(), Vector::Ones(1), 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(condition_number(Decomposition{(Vector(2) << 1e-12, 4).finished(), Vector::Ones(1), 1.0}),
                  std::domain_error);

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> draw(std::sqrt(5000.0), std::sqrt(5255.0));
  Vector u(25);
  for (auto& x : u) x = draw(rng);
  u(0) = std::sqrt(5000.0);
  const Decomposition w{u, Vector::Constant(25, std::sqrt(5000.0)), 1.0};
  CHECK(condition_number(w) <= 1.051);
}

TEST_CASE("condition number bound") {
  CHECK(condition_number_bound(5000.0, 5255.0) == 1.051);
  for (double dx : {1.0, 100.0, 5000.0}) {
    CHECK(condition_number_bound(dx, 255.0 + dx) == doctest::Approx(1.0 + 255.0 / dx));
  }
  CHECK(condition_number_bound(7.0, 7.0) == 1.0);
  CHECK_THROWS(condition_number_bound(0.0, 1.0));
  CHECK_THROWS(condition_number_bound(-1.0, 1.0));
}

TEST_CASE("kappa respects the interval bound on exact constant-v backgrounds") {
  std::mt19937_64 rng(34);
  for (double dx : {10.0, 100.0, 1000.0, 5000.0}) {
    SceneSpec spec;
    spec.geometry = FrameGeometry(5, 5, 25);
    spec.x_black = dx;
    spec.x_white = dx + 255.0;
    spec.rect.p_m = 0;
    spec.v0 = 3.0;
    const Scene scene = generate(spec, rng());
    const Decomposition w = balance(scene.background);
    CHECK(condition_number(w) <= condition_number_bound(dx, dx + 255.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("compute_c") {
  SUBCASE("unit data") {
    const DataMatrix X(FrameGeometry(2, 1, 3), Matrix::Ones(2, 3), 0.5, 2.0);
    const CParameter c = compute_c(X, Decomposition{Vector::Ones(2), Vector::Ones(3), 1.0}, 1e-6);
    CHECK(c.block_minimum == 1.0);
    CHECK(c.w_min == 1.0);
    CHECK(c.c == doctest::Approx(1.0 - 1e-6).epsilon(1e-15));
  }
  SUBCASE("interval data approaches one as the margin vanishes") {
    Vector u = (Vector(4) << 70.0, 71.0, 72.5, 70.5).finished();
    const double v0 = 70.0;
    const Matrix values = u * Vector::Constant(4, v0).transpose();
    const DataMatrix X(FrameGeometry(2, 2, 4), values, values.minCoeff(), values.maxCoeff());
    const Decomposition w{u, Vector::Constant(4, v0), 1.0};
    double last = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-8, 0.0}) {
      const double c = compute_c(X, w, eps).c;
      CHECK(c >= last);
      last = c;
    }
    CHECK(last == 1.0);
  }
  SUBCASE("a dark pixel sets c from the cross block") {
    Matrix values(3, 2);
    values << 0.5, 4.0, 4.0, 4.0, 4.0, 4.0;
    const DataMatrix X(FrameGeometry(3, 1, 2), values, 0.1, 10.0);
    const Decomposition w{Vector::Constant(3, 2.0), Vector::Constant(2, 2.0), 1.0};
    const CParameter c = compute_c(X, w, 1e-6);
    // Brute force over the lifted 5x5 matrix [[u u^T, X], [X^T, v v^T]].
    const Vector s = w.stacked();
    double brute = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < 5; ++a) {
      for (Eigen::Index b = 0; b < 5; ++b) {
        double entry = 0.0;
        if (a < 3 && b < 3) entry = s(a) * s(b);
        else if (a >= 3 && b >= 3) entry = s(a) * s(b);
        else if (a < 3) entry = values(a, b - 3);
        else entry = values(b, a - 3);
        brute = std::min(brute, entry);
      }
    }
    CHECK(c.block_minimum == brute);
    CHECK(c.c == doctest::Approx((1.0 - 1e-6) * 0.5 / 4.0));
    CHECK(c.c < 1.0);
  }
  SUBCASE("invalid inputs") {
    const DataMatrix X(FrameGeometry(1, 1, 1), Matrix::Ones(1, 1), 0.5, 2.0);
    CHECK_THROWS_AS(compute_c(X, Decomposition{Vector::Zero(1), Vector::Ones(1), 1.0}), std::domain_error);
    const DataMatrix Z(FrameGeometry(1, 1, 1), Matrix::Zero(1, 1), 0.0, 2.0);
    CHECK_THROWS_AS(compute_c(Z, Decomposition{Vector::Ones(1), Vector::Ones(1), 1.0}), std::domain_error);
  }
}

TEST_CASE("check_identifiability") {
  const IdentifiabilityVerdict v = check_identifiability(19352, 271, 1.05, 1.0);
  CHECK(v.rhs == doctest::Approx(48.0 * std::pow(1.05, 4) * 271.0).epsilon(1e-12));
  CHECK(v.rhs == doctest::Approx(15811.3053).epsilon(1e-9));
  CHECK(v.pass);

  CHECK(check_identifiability(1, 0, 1.0, 1.0).pass);
  CHECK(check_identifiability(0, 0, 1.0, 1.0).rhs == 0.0);
  CHECK_FALSE(check_identifiability(0, 0, 1.0, 1.0).pass);
  CHECK_FALSE(check_identifiability(48, 1, 1.0, 1.0).pass);
  CHECK(check_identifiability(49, 1, 1.0, 1.0).pass);
  CHECK(check_identifiability(100, 1, 1.0, 0.5).rhs == 192.0);

  CHECK_THROWS_AS(check_identifiability(10, 1, 1.0, 0.0), InputError);
  CHECK_THROWS_AS(check_identifiability(10, 1, 1.0, 1.5), InputError);
  CHECK_THROWS_AS(check_identifiability(10, 1, 0.9, 1.0), InputError);
}

TEST_CASE("rectangle identifiability") {
  RectangleSpec r;
  r.p_m = 9;
  r.p_n = 11;
  r.p_f = 99;
  CHECK(rectangle_identifiability(r, FrameGeometry(70, 70, 4900)).pass);
  r.p_f = 100;
  CHECK_FALSE(rectangle_identifiability(r, FrameGeometry(70, 70, 4900)).pass);

  RectangleSpec one;
  CHECK_FALSE(rectangle_identifiability(one, FrameGeometry(7, 7, 49)).pass);

  // Estimates from the campus recording after balancing to 211 x 93.
  const FrameGeometry field(211, 93, 19623);
  RectangleSpec est;
  est.p_m = 14;
  est.p_n = 14;  // ~ d_m d_n / 100
  est.p_f = 19623 / 72;
  const RectangleVerdict v = rectangle_identifiability(est, field);
  CHECK(v.frames_ok);
  CHECK(v.area_ok);
  CHECK(v.pass);

  CHECK_THROWS_AS(rectangle_identifiability(one, FrameGeometry(4, 4, 10)), InputError);
}

TEST_CASE("rectangle inequalities agree with the raw inequality on closed-form degrees") {
  for (std::size_t d : {49, 50, 64, 99, 100, 147, 196, 200}) {
    // A 1 x d frame lets every area 1..d be a p_m x p_n rectangle.
    const FrameGeometry g(1, d, d);
    RectangleSpec r;
    r.p_m = 1;
    for (std::size_t pf = 1; pf <= d; ++pf) {
      for (std::size_t area = 1; area <= d; ++area) {
        const double delta = static_cast<double>(std::min(d - pf, d - area));
        const double Delta = static_cast<double>(std::max(pf, area));
        const bool raw = check_identifiability(delta, Delta, 1.0, 1.0).pass;
        r.p_n = area;
        r.p_f = pf;
        REQUIRE(raw == rectangle_identifiability(r, g).pass);
      }
    }
  }
}

TEST_CASE("constant trajectory obscurement") {
  RectangleSpec r;
  r.p_m = 3;
  r.p_n = 10;
  r.speed_x = 2.0;
  CHECK(pf_constant_trajectory(r, 100).p_f == 5);
  r.speed_x = 3.0;
  CHECK(pf_constant_trajectory(r, 100).p_f == 4);
  r.speed_y = 1.0;
  CHECK(pf_constant_trajectory(r, 100).p_f == 3);

  RectangleSpec field;
  field.p_n = 135;        // d_n / 8 with d_n = 1080
  field.speed_x = 2.16;   // d_n / 500
  field.p_m = 274;
  CHECK(pf_constant_trajectory(field, 19623).p_f == 63);

  RectangleSpec still;
  const TrajectoryObscurement s = pf_constant_trajectory(still, 12);
  CHECK(s.p_f == 12);
  CHECK_FALSE(s.travel_premise);
  CHECK_FALSE(s.warning.empty());

  RectangleSpec slow;
  slow.p_n = 10;
  slow.speed_x = 1.0;
  const TrajectoryObscurement t = pf_constant_trajectory(slow, 8);
  CHECK_FALSE(t.travel_premise);
}

TEST_CASE("constant trajectory formula matches a simulated sweep") {
  const FrameGeometry g(6, 40, 30);
  RectangleSpec r;
  r.p_m = 3;
  r.p_n = 10;
  r.speed_x = 2.0;
  const PerFrameSets s = rectangle_footprint(g, r, 0, 0, Boundary::kExit);
  CHECK(count_max_obscurement(s) == 5);
  CHECK(pf_constant_trajectory(r, 30).p_f == 5);
}

TEST_CASE("a posteriori certificate on the example") {
  const DataMatrix X = test::example_matrix();
  const Decomposition w = test::example_solution();
  const CertificateReport r = certify(X, w);
  REQUIRE(r.necessary);
  CHECK(r.necessary->object_size.tight);
  CHECK(*r.background_connected);
  CHECK(r.common_pixel->pass);
  CHECK(r.foreground_degrees->max_degree == 2);
  CHECK(r.background_degrees->min_degree == 1);
  REQUIRE(r.identifiability_raw);
  CHECK(r.identifiability_raw->lhs == 1.0);
  CHECK_FALSE(r.identifiability_raw->pass);
  CHECK_FALSE(r.pass());
  CHECK(*r.kappa_bound == 256.0);
}

TEST_CASE("a priori certificate") {
  RectangleSpec r;
  r.p_m = 9;
  r.p_n = 11;
  r.speed_x = 1.0;
  const CertificateReport rep = certify_a_priori(r, FrameGeometry(70, 70, 4900));
  REQUIRE(rep.trajectory);
  CHECK(rep.trajectory->p_f == 11);
  CHECK(rep.rectangle->p_f == 11);
  CHECK(rep.identifiability_rectangle->pass);
  CHECK_FALSE(rep.necessary.has_value());
  CHECK(rep.pass());

  RectangleSpec still;
  still.p_m = 2;
  still.p_n = 2;
  const FrameGeometry g(10, 10, 100);
  const PerFrameSets footprint = rectangle_footprint(g, still, 3, 3, Boundary::kExit);
  const CertificateReport bad = certify_a_priori(still, g, &footprint);
  CHECK_FALSE(bad.necessary->pixel_connectivity.pass);
  CHECK(bad.necessary->pixel_connectivity.witness_pixel == 3 * 10 + 3);
  CHECK_FALSE(bad.pass());

  const CertificateReport unbalanced = certify_a_priori(r, FrameGeometry(70, 70, 100));
  CHECK_FALSE(unbalanced.error.empty());
  CHECK_FALSE(unbalanced.pass());
}
