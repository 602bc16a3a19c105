#include "nrpca/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nrpca {

SquareStrategy parse_square_strategy(const std::string& name) {
  if (name == "rescale") return SquareStrategy::kRescaleResolution;
  if (name == "repeat") return SquareStrategy::kRepeatFrames;
  if (name == "none") return SquareStrategy::kNone;
  throw InputError("unknown square strategy '" + name + "' (expected rescale, repeat or none)");
}

std::string to_string(SquareStrategy strategy) {
  switch (strategy) {
    case SquareStrategy::kRescaleResolution:
      return "rescale";
    case SquareStrategy::kRepeatFrames:
      return "repeat";
    case SquareStrategy::kNone:
      return "none";
  }
  return "none";
}

Video shift_pixels(const Video& video, double delta_x) {
  if (!(delta_x > 0.0)) {
    throw InputError("pixel shift must be strictly positive");
  }
  video.geometry();
  Video out;
  out.frames.reserve(video.frames.size());
  for (std::size_t k = 0; k < video.frames.size(); ++k) {
    const Frame& f = video.frames[k];
    if (f.size() > 0 && (f.minCoeff() < 0.0 || f.maxCoeff() > 255.0)) {
      throw InputError("shift expects 8-bit values in [0, 255]; frame " + std::to_string(k + 1) +
                       " is out of range");
    }
    out.frames.push_back(f.array() + delta_x);
  }
  out.x_black = delta_x;
  out.x_white = 255.0 + delta_x;
  return out;
}

Frame grayscale_from_rgb(const Frame& red, const Frame& green, const Frame& blue) {
  if (red.rows() != green.rows() || red.rows() != blue.rows() || red.cols() != green.cols() ||
      red.cols() != blue.cols()) {
    throw InputError("color planes have different sizes");
  }
  return (red + green + blue) / 3.0;
}

namespace {

// Overlap weights between source cells [s, s+1) and target cells scaled into
// source coordinates. Row t of the result holds the weights of target cell t.
Matrix box_weights(std::size_t source, std::size_t target) {
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(source));
  const double scale = static_cast<double>(source) / static_cast<double>(target);
  for (std::size_t t = 0; t < target; ++t) {
    const double lo = static_cast<double>(t) * scale;
    const double hi = static_cast<double>(t + 1) * scale;
    const auto first = static_cast<std::size_t>(std::floor(lo));
    for (std::size_t s = first; s < source && static_cast<double>(s) < hi; ++s) {
      const double overlap =
          std::min(hi, static_cast<double>(s + 1)) - std::max(lo, static_cast<double>(s));
      if (overlap > 0.0) {
        w(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) = overlap / scale;
      }
    }
  }
  return w;
}

}  // namespace

Frame resample_area(const Frame& frame, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InputError("resample target must be nonempty");
  }
  if (static_cast<std::size_t>(frame.rows()) == rows &&
      static_cast<std::size_t>(frame.cols()) == cols) {
    return frame;
  }
  const Matrix wr = box_weights(static_cast<std::size_t>(frame.rows()), rows);
  const Matrix wc = box_weights(static_cast<std::size_t>(frame.cols()), cols);
  Frame out = wr * frame * wc.transpose();
  // Weights are convex combinations; clamp away rounding so bounds hold exactly.
  const double lo = frame.minCoeff();
  const double hi = frame.maxCoeff();
  return out.cwiseMax(lo).cwiseMin(hi);
}

std::pair<std::size_t, std::size_t> balanced_resolution(const FrameGeometry& geometry) {
  const double beta = std::sqrt(static_cast<double>(geometry.frames()) /
                                static_cast<double>(geometry.pixels()));
  const double target_rows = beta * static_cast<double>(geometry.rows());
  const double target_cols = beta * static_cast<double>(geometry.cols());
  const std::size_t d = geometry.frames();
  std::pair<std::size_t, std::size_t> best{d, 1};
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r <= d; ++r) {
    if (d % r != 0) continue;
    const std::size_t c = d / r;
    const double cost = std::abs(static_cast<double>(r) - target_rows) +
                        std::abs(static_cast<double>(c) - target_cols);
    if (cost < best_cost) {
      best_cost = cost;
      best = {r, c};
    }
  }
  return best;
}

RescaleResult rescale_resolution(const Video& video) {
  const FrameGeometry g = video.geometry();
  if (g.frames() > g.pixels()) {
    throw InputError("rescale needs d_f <= d_m*d_n; with more frames than pixels trim the video or use --square none");
  }
  RescaleResult result;
  result.beta = std::sqrt(static_cast<double>(g.frames()) / static_cast<double>(g.pixels()));
  const auto [rows, cols] = balanced_resolution(g);
  result.rows = rows;
  result.cols = cols;
  result.video.x_black = video.x_black;
  result.video.x_white = video.x_white;
  result.video.frames.reserve(video.frames.size());
  for (const Frame& f : video.frames) {
    result.video.frames.push_back(resample_area(f, rows, cols));
  }
  return result;
}

Video repeat_frames(const Video& video) {
  const FrameGeometry g = video.geometry();
  if (g.frames() > g.pixels()) {
    throw InputError("repeat_frames needs d_f <= d_m*d_n");
  }
  Video out;
  out.x_black = video.x_black;
  out.x_white = video.x_white;
  out.frames.reserve(g.pixels());
  for (std::size_t k = 0; k < g.pixels(); ++k) {
    out.frames.push_back(video.frames[k % g.frames()]);
  }
  return out;
}

PreprocessResult preprocess(const Video& video, const PreprocessConfig& config) {
  const FrameGeometry original = video.geometry();
  Video shifted = shift_pixels(video, config.delta_x);
  PreprocessResult result{std::move(shifted), config.delta_x, 1.0, config.square, original, original};
  switch (config.square) {
    case SquareStrategy::kRescaleResolution: {
      RescaleResult r = rescale_resolution(result.video);
      result.video = std::move(r.video);
      result.beta = r.beta;
      break;
    }
    case SquareStrategy::kRepeatFrames:
      result.video = repeat_frames(result.video);
      break;
    case SquareStrategy::kNone:
      break;
  }
  result.realized = result.video.geometry();
  return result;
}

}  // namespace nrpca
