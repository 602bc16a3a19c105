#pragma once

#include "nrpca/core.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrpca::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a binary graymap (P5, 8- or 16-bit) or pixmap (P6, converted to gray
/// with equal channel weights). Values are returned unscaled.
Frame read_pnm(const std::filesystem::path& path);

/// Writes a P5 graymap with the given maxval (1..65535). Values are rounded
/// and must lie in [0, maxval].
void write_pgm(const std::filesystem::path& path, const Frame& frame, unsigned maxval = 255);

/// Frame files (*.pgm, *.ppm) in a directory, sorted by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// A video stored as doubles. File layout: the line "NRPCA-TENSOR 1", one line
/// of JSON header (rows, cols, frames, x_black, x_white, dtype "float64",
/// endianness "little", order "frame, column, row"), then
/// rows*cols*frames little-endian doubles with row fastest.
void write_tensor(const std::filesystem::path& path, const Video& video);
Video read_tensor(const std::filesystem::path& path);

/// Loads a tensor file, or a directory of frames. Frame directories get the
/// interval [0, 255], or [0, 65535] when any value exceeds 255.
Video load_video(const std::filesystem::path& input);

/// Zero-padded per-frame file name: frame_000001<suffix>.
std::string frame_name(std::size_t k, const std::string& suffix);

}  // namespace nrpca::io
