#include "nrpca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

namespace nrpca {

PerFrameSets rectangle_footprint(const FrameGeometry& geometry, const RectangleSpec& rect,
                                 std::size_t start_row, std::size_t start_col, Boundary boundary) {
  if (rect.speed_x < 0.0 || rect.speed_y < 0.0) {
    throw InputError("object speeds must be nonnegative");
  }
  if (rect.p_m > 0 && rect.p_n > 0 &&
      (start_row + rect.p_m > geometry.rows() || start_col + rect.p_n > geometry.cols())) {
    throw InputError("initial rectangle does not fit inside the frame");
  }
  PerFrameSets sets(geometry);
  const std::size_t rows = geometry.rows();
  const std::size_t cols = geometry.cols();
  for (std::size_t k = 0; k < geometry.frames(); ++k) {
    const double kd = static_cast<double>(k);
    const auto top = start_row + static_cast<std::size_t>(std::llround(kd * rect.speed_y));
    const auto left = start_col + static_cast<std::size_t>(std::llround(kd * rect.speed_x));
    for (std::size_t dj = 0; dj < rect.p_n; ++dj) {
      std::size_t j = left + dj;
      if (boundary == Boundary::kWrap) {
        j %= cols;
      } else if (j >= cols) {
        break;
      }
      for (std::size_t di = 0; di < rect.p_m; ++di) {
        std::size_t i = top + di;
        if (boundary == Boundary::kWrap) {
          i %= rows;
        } else if (i >= rows) {
          break;
        }
        sets.set_foreground(j * rows + i, k);
      }
    }
  }
  return sets;
}

std::size_t count_max_obscurement(const PerFrameSets& sets) {
  std::size_t best = 0;
  for (std::size_t h = 0; h < sets.pixels(); ++h) best = std::max(best, sets.foreground_at_pixel(h));
  return best;
}

Scene generate(const SceneSpec& spec, std::uint64_t seed) {
  const FrameGeometry& g = spec.geometry;
  if (!(spec.x_black <= spec.x_white)) throw InputError("x_black must not exceed x_white");
  if (!(spec.v0 > 0.0)) throw InputError("v0 must be positive");
  if (!(spec.object_contrast > 0.0)) throw InputError("object contrast must be positive");

  const auto m = static_cast<Eigen::Index>(g.pixels());
  Vector u(m);
  if (spec.u) {
    if (spec.u->size() != m) throw InputError("background pattern has the wrong length");
    u = *spec.u;
    for (Eigen::Index h = 0; h < m; ++h) {
      const double x = u(h) * spec.v0;
      if (!(x >= spec.x_black && x <= spec.x_white)) {
        throw InputError("background pattern leaves the intensity interval at pixel " +
                         std::to_string(h + 1));
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    const double lo = spec.x_black / spec.v0;
    const double hi = spec.x_white / spec.v0;
    if (spec.integral_background) {
      std::uniform_int_distribution<long long> draw(static_cast<long long>(std::ceil(lo)),
                                                    static_cast<long long>(std::floor(hi)));
      for (Eigen::Index h = 0; h < m; ++h) u(h) = static_cast<double>(draw(rng));
    } else {
      std::uniform_real_distribution<double> draw(lo, hi);
      for (Eigen::Index h = 0; h < m; ++h) u(h) = draw(rng);
    }
  }

  Scene scene{Video{}, rectangle_footprint(g, spec.rect, spec.start_row, spec.start_col, spec.boundary), 0,
              Decomposition{u, Vector::Constant(static_cast<Eigen::Index>(g.frames()), spec.v0), 1.0}};
  scene.true_pf = count_max_obscurement(scene.truth);
  scene.video.x_black = spec.x_black;
  scene.video.x_white = spec.x_white;
  scene.video.frames.reserve(g.frames());

  const Frame background = Eigen::Map<const Matrix>(u.data(), static_cast<Eigen::Index>(g.rows()),
                                                    static_cast<Eigen::Index>(g.cols())) *
                           spec.v0;
  for (std::size_t k = 0; k < g.frames(); ++k) {
    Frame f = background;
    for (std::size_t h = 0; h < g.pixels(); ++h) {
      if (!scene.truth.is_foreground(h, k)) continue;
      const auto i = static_cast<Eigen::Index>(h % g.rows());
      const auto j = static_cast<Eigen::Index>(h / g.rows());
      const double b = f(i, j);
      double x = b + spec.object_contrast;
      if (x > spec.x_white) x = b - spec.object_contrast;
      if (x < spec.x_black) {
        throw InputError("object contrast does not fit inside the intensity interval");
      }
      f(i, j) = x;
    }
    scene.video.frames.push_back(std::move(f));
  }
  return scene;
}

SceneSpec certified_scene(const FrameGeometry& geometry) {
  if (!geometry.balanced()) {
    throw InputError("certified scenes need d_f == d_m*d_n");
  }
  const std::size_t d = geometry.frames();
  const std::size_t max_area = (d - 1) / 49;  // largest integer strictly below d / 49
  const std::size_t max_pf = (d - 1) / 49;
  if (max_area == 0 || max_pf == 0) {
    throw InputError("no rectangle satisfies p_f < d/49 and p_m*p_n < d/49 at d = " + std::to_string(d) +
                     " (the smallest feasible d is 50)");
  }
  for (std::size_t area = max_area; area >= 1; --area) {
    std::vector<std::pair<std::size_t, std::size_t>> shapes;
    for (std::size_t pm = 1; pm <= area; ++pm) {
      if (area % pm != 0) continue;
      const std::size_t pn = area / pm;
      // Rows below the object stay background, giving a common pixel.
      if (pm < geometry.rows() && pn <= geometry.cols()) shapes.emplace_back(pm, pn);
    }
    std::stable_sort(shapes.begin(), shapes.end(), [](const auto& a, const auto& b) {
      const auto da = a.first > a.second ? a.first - a.second : a.second - a.first;
      const auto db = b.first > b.second ? b.first - b.second : b.second - b.first;
      if (da != db) return da < db;
      return a.first < b.first;
    });
    for (const auto& [pm, pn] : shapes) {
      for (std::size_t speed = 1; speed <= geometry.cols(); ++speed) {
        if ((pn + speed - 1) / speed > max_pf) continue;
        SceneSpec spec;
        spec.geometry = geometry;
        spec.rect.p_m = pm;
        spec.rect.p_n = pn;
        spec.rect.speed_x = static_cast<double>(speed);
        spec.rect.speed_y = 0.0;
        const PerFrameSets footprint = rectangle_footprint(geometry, spec.rect, 0, 0, Boundary::kExit);
        RectangleSpec measured = spec.rect;
        measured.p_f = std::max<std::size_t>(1, count_max_obscurement(footprint));
        if (check_common_background_pixel(footprint).pass &&
            rectangle_identifiability(measured, geometry).pass) {
          spec.rect.p_f = measured.p_f;
          return spec;
        }
        break;
      }
    }
  }
  throw InputError("no certified rectangle found for this geometry");
}

}  // namespace nrpca
