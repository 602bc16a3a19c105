#include "nrpca/core.hpp"

#include <cmath>
#include <sstream>

namespace nrpca {

FrameGeometry::FrameGeometry(std::size_t rows, std::size_t cols, std::size_t frames)
    : rows_(rows), cols_(cols), frames_(frames) {
  if (rows == 0 || cols == 0 || frames == 0) {
    throw InputError("frame geometry requires positive rows, cols and frames");
  }
}

std::size_t pixel_index(PixelCoord pixel, const FrameGeometry& geometry) {
  if (pixel.i < 1 || pixel.i > geometry.rows() || pixel.j < 1 || pixel.j > geometry.cols()) {
    throw InputError("pixel coordinate out of range");
  }
  return (pixel.j - 1) * geometry.rows() + pixel.i;
}

PixelCoord pixel_of_index(std::size_t h, const FrameGeometry& geometry) {
  if (h < 1 || h > geometry.pixels()) {
    throw InputError("pixel number out of range");
  }
  const std::size_t dm = geometry.rows();
  const std::size_t col = (h + dm - 1) / dm;  // ceil(h / d_m)
  return {h - (col - 1) * dm, col};
}

Vector vectorize_frame(const Frame& frame, const FrameGeometry& geometry) {
  if (static_cast<std::size_t>(frame.rows()) != geometry.rows() ||
      static_cast<std::size_t>(frame.cols()) != geometry.cols()) {
    throw InputError("frame dimensions do not match geometry");
  }
  // Eigen storage is column-major, which is exactly the stacking order.
  return Eigen::Map<const Vector>(frame.data(), frame.size());
}

FrameGeometry Video::geometry() const {
  if (frames.empty()) {
    throw InputError("video has no frames");
  }
  const auto rows = frames.front().rows();
  const auto cols = frames.front().cols();
  for (const auto& f : frames) {
    if (f.rows() != rows || f.cols() != cols) {
      throw InputError("video frames have inconsistent sizes");
    }
  }
  return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), frames.size()};
}

DataMatrix::DataMatrix(FrameGeometry geometry, Matrix values, double x_black, double x_white)
    : geometry_(geometry), values_(std::move(values)), x_black_(x_black), x_white_(x_white) {
  if (rows() != geometry_.pixels() || cols() != geometry_.frames()) {
    throw InputError("data matrix shape does not match geometry");
  }
  if (!(x_black <= x_white)) {
    throw InputError("x_black must not exceed x_white");
  }
}

Frame DataMatrix::frame(std::size_t k) const {
  if (k >= cols()) {
    throw InputError("frame index out of range");
  }
  const auto rows = static_cast<Eigen::Index>(geometry_.rows());
  const auto cols = static_cast<Eigen::Index>(geometry_.cols());
  return Eigen::Map<const Matrix>(values_.col(static_cast<Eigen::Index>(k)).data(), rows, cols);
}

DataMatrix assemble_data_matrix(const std::vector<Frame>& frames, const FrameGeometry& geometry,
                                double x_black, double x_white) {
  if (frames.empty()) {
    throw InputError("cannot assemble a data matrix from zero frames");
  }
  if (frames.size() != geometry.frames()) {
    throw InputError("frame count does not match geometry");
  }
  Matrix values(geometry.pixels(), geometry.frames());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Frame& f = frames[k];
    if (static_cast<std::size_t>(f.rows()) != geometry.rows() ||
        static_cast<std::size_t>(f.cols()) != geometry.cols()) {
      std::ostringstream msg;
      msg << "frame " << k + 1 << " has size " << f.rows() << "x" << f.cols() << ", expected "
          << geometry.rows() << "x" << geometry.cols();
      throw InputError(msg.str());
    }
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
      for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const double x = f(i, j);
        if (!(x >= x_black && x <= x_white)) {
          std::ostringstream msg;
          msg << "pixel (i=" << i + 1 << ", j=" << j + 1 << ", k=" << k + 1 << ") value " << x
              << " outside [" << x_black << ", " << x_white << "]";
          throw InputError(msg.str());
        }
      }
    }
    values.col(static_cast<Eigen::Index>(k)) = vectorize_frame(f, geometry);
  }
  return {geometry, std::move(values), x_black, x_white};
}

DataMatrix assemble_data_matrix(const Video& video) {
  return assemble_data_matrix(video.frames, video.geometry(), video.x_black, video.x_white);
}

Vector Decomposition::stacked() const {
  Vector w(u.size() + v.size());
  w << u, v;
  return w;
}

Decomposition balance(const Decomposition& dec) {
  const double nu = dec.u.norm();
  const double nv = dec.v.norm();
  if (nu == 0.0 || nv == 0.0) {
    return dec;
  }
  const double a = std::sqrt(nv / nu);
  return {dec.u * a, dec.v / a, dec.lambda};
}

PerFrameSets::PerFrameSets(FrameGeometry geometry)
    : geometry_(geometry),
      bits_(geometry.pixels() * geometry.frames(), false),
      frame_counts_(geometry.frames(), 0),
      pixel_counts_(geometry.pixels(), 0) {}

void PerFrameSets::set_foreground(std::size_t h, std::size_t k, bool value) {
  if (h >= pixels() || k >= frames()) {
    throw InputError("measurement index out of range");
  }
  auto bit = bits_[k * pixels() + h];
  if (bit == value) {
    return;
  }
  bit = value;
  if (value) {
    ++frame_counts_[k];
    ++pixel_counts_[h];
    ++foreground_total_;
  } else {
    --frame_counts_[k];
    --pixel_counts_[h];
    --foreground_total_;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> PerFrameSets::foreground_entries() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(foreground_total_);
  for (std::size_t k = 0; k < frames(); ++k) {
    for (std::size_t h = 0; h < pixels(); ++h) {
      if (is_foreground(h, k)) out.emplace_back(h, k);
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> PerFrameSets::background_entries() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(background_count());
  for (std::size_t k = 0; k < frames(); ++k) {
    for (std::size_t h = 0; h < pixels(); ++h) {
      if (is_background(h, k)) out.emplace_back(h, k);
    }
  }
  return out;
}

PerFrameSets sets_from_foreground(const FrameGeometry& geometry,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& foreground) {
  PerFrameSets sets(geometry);
  for (const auto& [h, k] : foreground) {
    sets.set_foreground(h, k);
  }
  return sets;
}

std::pair<SparseResidual, PerFrameSets> residual_sets(const DataMatrix& X, const Decomposition& dec,
                                                      double eps_s) {
  if (static_cast<std::size_t>(dec.u.size()) != X.rows() ||
      static_cast<std::size_t>(dec.v.size()) != X.cols()) {
    throw InputError("decomposition dimensions do not match the data matrix");
  }
  if (!(eps_s >= 0.0)) {
    throw InputError("zero tolerance must be nonnegative");
  }
  SparseResidual residual;
  residual.zero_tolerance = eps_s;
  PerFrameSets sets(X.geometry());
  const Matrix& values = X.values();
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    const double vk = dec.v(k);
    for (Eigen::Index h = 0; h < values.rows(); ++h) {
      const double s = values(h, k) - dec.u(h) * vk;
      if (std::abs(s) > eps_s) {
        residual.entries.push_back({static_cast<std::size_t>(h), static_cast<std::size_t>(k), s});
        sets.set_foreground(static_cast<std::size_t>(h), static_cast<std::size_t>(k));
      }
    }
  }
  return {std::move(residual), std::move(sets)};
}

}  // namespace nrpca
