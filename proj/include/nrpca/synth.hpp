#pragma once

#include "nrpca/certify.hpp"
#include "nrpca/core.hpp"

#include <cstdint>
#include <optional>

namespace nrpca {

enum class Boundary { kExit, kWrap };

struct SceneSpec {
  FrameGeometry geometry{1, 1, 1};
  double x_black = 5000.0;
  double x_white = 5255.0;
  /// Constant per-frame scaling of the background.
  double v0 = 1.0;
  /// Explicit background pattern (m entries). Drawn uniformly in
  /// [x_black / v0, x_white / v0] when absent.
  std::optional<Vector> u;
  /// Draw the random pattern from integers so that u * v0 is integral when
  /// v0 == 1 (needed for lossless 16-bit graymap export).
  bool integral_background = false;
  /// Rectangle size and speeds. p_f is ignored; the generator counts it.
  RectangleSpec rect;
  /// 0-based top-left corner in the first frame.
  std::size_t start_row = 0;
  std::size_t start_col = 0;
  /// Minimum intensity difference between object and background.
  double object_contrast = 10.0;
  Boundary boundary = Boundary::kExit;
};

struct Scene {
  Video video;
  PerFrameSets truth;
  /// Exhaustive maximum number of frames any pixel is covered.
  std::size_t true_pf = 0;
  /// The generating background (u, v0 * 1_n).
  Decomposition background;
};

/// Per-frame object coverage of a moving rectangle. The top-left corner in
/// frame k is (start_row + round(k * speed_y), start_col + round(k * speed_x)).
PerFrameSets rectangle_footprint(const FrameGeometry& geometry, const RectangleSpec& rect,
                                 std::size_t start_row, std::size_t start_col, Boundary boundary);

/// Maximum over pixels of the frames in which each is foreground.
std::size_t count_max_obscurement(const PerFrameSets& sets);

/// Renders a scene. Object pixels are background + contrast, or background −
/// contrast where the former would exceed x_white.
Scene generate(const SceneSpec& spec, std::uint64_t seed);

/// A scene description whose generated video passes both the common
/// background pixel test and rectangle identifiability. Picks the largest
/// admissible rectangle (closest to square, wider than tall on ties) moving
/// right at the slowest admissible integer speed from the top-left corner.
/// Requires d_f == d_m d_n; throws InputError when no rectangle qualifies.
SceneSpec certified_scene(const FrameGeometry& geometry);

}  // namespace nrpca
