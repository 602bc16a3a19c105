#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrpca {

/// Raised when an argument violates an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// One grayscale frame: rows() == d_m (height), cols() == d_n (width).
using Frame = Eigen::MatrixXd;

/// Frame dimensions and frame count. m = rows*cols pixels, n = frames.
class FrameGeometry {
 public:
  FrameGeometry(std::size_t rows, std::size_t cols, std::size_t frames);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t frames() const { return frames_; }
  std::size_t pixels() const { return rows_ * cols_; }
  /// True when the frame count equals the pixel count.
  bool balanced() const { return frames_ == pixels(); }

  bool operator==(const FrameGeometry&) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t frames_;
};

/// Pixel coordinates, 1-based as in the vectorization formula h = (j-1)*d_m + i.
struct PixelCoord {
  std::size_t i;
  std::size_t j;
  bool operator==(const PixelCoord&) const = default;
};

/// Maps a 1-based pixel (i, j) to its 1-based pixel number h.
std::size_t pixel_index(PixelCoord pixel, const FrameGeometry& geometry);

/// Inverse of pixel_index via the ceiling formula
/// (i, j) = (h - (ceil(h/d_m) - 1) d_m, ceil(h/d_m)).
PixelCoord pixel_of_index(std::size_t h, const FrameGeometry& geometry);

/// Column-major stacking of a frame into an m-vector.
Vector vectorize_frame(const Frame& frame, const FrameGeometry& geometry);

/// A grayscale video with its valid intensity interval.
struct Video {
  std::vector<Frame> frames;
  double x_black = 0.0;
  double x_white = 255.0;

  /// Throws InputError when there are no frames or sizes differ.
  FrameGeometry geometry() const;
};

/// The m x n data matrix; column k is frame k vectorized.
class DataMatrix {
 public:
  DataMatrix(FrameGeometry geometry, Matrix values, double x_black, double x_white);

  const FrameGeometry& geometry() const { return geometry_; }
  const Matrix& values() const { return values_; }
  double x_black() const { return x_black_; }
  double x_white() const { return x_white_; }
  std::size_t rows() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values_.cols()); }
  double operator()(std::size_t h, std::size_t k) const {
    return values_(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k));
  }

  /// Frame k (0-based) reshaped back to rows x cols.
  Frame frame(std::size_t k) const;

 private:
  FrameGeometry geometry_;
  Matrix values_;
  double x_black_;
  double x_white_;
};

/// Stacks the frames into a data matrix after checking every value lies in
/// [x_black, x_white]. The error message names the offending 1-based (i, j, k).
DataMatrix assemble_data_matrix(const std::vector<Frame>& frames, const FrameGeometry& geometry,
                                double x_black, double x_white);
DataMatrix assemble_data_matrix(const Video& video);

/// Rank-1 background model w = (u, v).
struct Decomposition {
  Vector u;
  Vector v;
  double lambda = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(u.size() + v.size()); }
  /// The stacked (m+n)-vector w.
  Vector stacked() const;
};

/// Rescales (u, v) to (a u, v / a) with ||a u|| = ||v / a||. The product u v^T
/// is unchanged. Returns the input when either factor is zero.
Decomposition balance(const Decomposition& dec);

/// One stored entry of the sparse residual, 0-based.
struct ResidualEntry {
  std::size_t h;
  std::size_t k;
  double value;
};

struct SparseResidual {
  std::vector<ResidualEntry> entries;
  double zero_tolerance = 0.5;
};

/// Per-frame foreground membership over the m x n measurement set, stored as a
/// bitmap. Background is the complement. Indices are 0-based (h, k).
class PerFrameSets {
 public:
  explicit PerFrameSets(FrameGeometry geometry);

  const FrameGeometry& geometry() const { return geometry_; }
  std::size_t pixels() const { return geometry_.pixels(); }
  std::size_t frames() const { return geometry_.frames(); }

  bool is_foreground(std::size_t h, std::size_t k) const { return bits_[k * pixels() + h]; }
  bool is_background(std::size_t h, std::size_t k) const { return !is_foreground(h, k); }
  void set_foreground(std::size_t h, std::size_t k, bool value = true);

  std::size_t foreground_count() const { return foreground_total_; }
  std::size_t background_count() const { return pixels() * frames() - foreground_total_; }
  std::size_t foreground_in_frame(std::size_t k) const { return frame_counts_[k]; }
  std::size_t foreground_at_pixel(std::size_t h) const { return pixel_counts_[h]; }

  /// Foreground pairs (h, k) in frame-major order.
  std::vector<std::pair<std::size_t, std::size_t>> foreground_entries() const;
  std::vector<std::pair<std::size_t, std::size_t>> background_entries() const;

  bool operator==(const PerFrameSets& other) const {
    return geometry_ == other.geometry_ && bits_ == other.bits_;
  }

 private:
  FrameGeometry geometry_;
  std::vector<bool> bits_;
  std::vector<std::size_t> frame_counts_;
  std::vector<std::size_t> pixel_counts_;
  std::size_t foreground_total_ = 0;
};

/// Builds per-frame sets from explicit foreground pairs (0-based).
PerFrameSets sets_from_foreground(const FrameGeometry& geometry,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& foreground);

/// Thresholds X - u v^T at eps_s: (h, k) is foreground iff |X_hk - u_h v_k| > eps_s.
std::pair<SparseResidual, PerFrameSets> residual_sets(const DataMatrix& X, const Decomposition& dec,
                                                      double eps_s = 0.5);

}  // namespace nrpca
