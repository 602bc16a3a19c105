#pragma once

#include "nrpca/core.hpp"

#include <string>

namespace nrpca {

enum class SquareStrategy { kRescaleResolution, kRepeatFrames, kNone };

SquareStrategy parse_square_strategy(const std::string& name);
std::string to_string(SquareStrategy strategy);

struct PreprocessConfig {
  double delta_x = 5000.0;
  SquareStrategy square = SquareStrategy::kRescaleResolution;
};

/// Adds delta_x to every pixel of an 8-bit-range video. The resulting interval
/// is [delta_x, 255 + delta_x].
Video shift_pixels(const Video& video, double delta_x);

/// Converts interleaved RGB samples to gray with equal channel weights.
Frame grayscale_from_rgb(const Frame& red, const Frame& green, const Frame& blue);

/// Area-averaging resample of one frame to rows x cols.
Frame resample_area(const Frame& frame, std::size_t rows, std::size_t cols);

struct RescaleResult {
  Video video;
  double beta = 1.0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Picks the factorization rows*cols == frames closest to
/// (beta*d_m, beta*d_n) with beta = sqrt(d_f / (d_m d_n)).
std::pair<std::size_t, std::size_t> balanced_resolution(const FrameGeometry& geometry);

/// Lowers the resolution so that d_m' d_n' == d_f. Requires d_f <= d_m d_n.
RescaleResult rescale_resolution(const Video& video);

/// Cycles frames until d_f' == d_m d_n, truncating the last cycle.
/// Requires d_f <= d_m d_n.
Video repeat_frames(const Video& video);

struct PreprocessResult {
  Video video;
  double delta_x = 0.0;
  double beta = 1.0;
  SquareStrategy square = SquareStrategy::kNone;
  FrameGeometry original;
  FrameGeometry realized;
};

/// Shift followed by the configured squaring strategy.
PreprocessResult preprocess(const Video& video, const PreprocessConfig& config);

}  // namespace nrpca
