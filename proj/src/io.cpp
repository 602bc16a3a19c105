#include "nrpca/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nrpca::io {

namespace fs = std::filesystem;

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

std::size_t parse_header_number(std::istream& in, const fs::path& path) {
  const std::string token = next_token(in);
  try {
    std::size_t used = 0;
    const unsigned long long value = std::stoull(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return static_cast<std::size_t>(value);
  } catch (const std::exception&) {
    throw IoError(path.string() + ": malformed graymap header");
  }
}

}  // namespace

Frame read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P5" && magic != "P6") {
    throw IoError(path.string() + ": unsupported format '" + magic + "' (expected P5 or P6)");
  }
  const std::size_t cols = parse_header_number(in, path);
  const std::size_t rows = parse_header_number(in, path);
  const std::size_t maxval = parse_header_number(in, path);
  if (cols == 0 || rows == 0 || maxval == 0 || maxval > 65535) {
    throw IoError(path.string() + ": invalid graymap dimensions or maxval");
  }
  // next_token consumed exactly one whitespace byte after maxval.
  const std::size_t channels = magic == "P6" ? 3 : 1;
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(rows * cols * channels * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError(path.string() + ": truncated pixel data");
  }
  auto sample = [&](std::size_t idx) -> double {
    if (bytes == 1) return raw[idx];
    return static_cast<double>((raw[2 * idx] << 8) | raw[2 * idx + 1]);
  };
  Frame f(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t base = (i * cols + j) * channels;
      double value = sample(base);
      if (channels == 3) value = (value + sample(base + 1) + sample(base + 2)) / 3.0;
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return f;
}

void write_pgm(const fs::path& path, const Frame& frame, unsigned maxval) {
  if (maxval == 0 || maxval > 65535) throw IoError("graymap maxval must lie in 1..65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << frame.cols() << ' ' << frame.rows() << '\n' << maxval << '\n';
  const bool wide = maxval > 255;
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(frame.size()) * (wide ? 2 : 1));
  for (Eigen::Index i = 0; i < frame.rows(); ++i) {
    for (Eigen::Index j = 0; j < frame.cols(); ++j) {
      const double x = std::round(frame(i, j));
      if (!(x >= 0.0 && x <= static_cast<double>(maxval))) {
        throw IoError(path.string() + ": value " + std::to_string(frame(i, j)) +
                      " does not fit the graymap range");
      }
      const auto q = static_cast<unsigned>(x);
      if (wide) raw.push_back(static_cast<unsigned char>(q >> 8));
      raw.push_back(static_cast<unsigned char>(q & 0xFF));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    const auto name = entry.path().filename().string();
    if ((ext == ".pgm" || ext == ".ppm") && name.find(".mask.") == std::string::npos) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

namespace {

constexpr const char* kTensorMagic = "NRPCA-TENSOR 1";

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((bits >> (8 * b)) & 0xFF) << (8 * (7 - b));
    return out;
  }
  return bits;
}

}  // namespace

void write_tensor(const fs::path& path, const Video& video) {
  const FrameGeometry g = video.geometry();
  nlohmann::json header = {{"rows", g.rows()},       {"cols", g.cols()},
                           {"frames", g.frames()},   {"x_black", video.x_black},
                           {"x_white", video.x_white}, {"dtype", "float64"},
                           {"endianness", "little"}, {"order", "frame, column, row"}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kTensorMagic << '\n' << header.dump() << '\n';
  std::vector<std::uint64_t> buffer(g.pixels());
  for (const Frame& f : video.frames) {
    for (Eigen::Index idx = 0; idx < f.size(); ++idx) {
      buffer[static_cast<std::size_t>(idx)] = to_little(std::bit_cast<std::uint64_t>(f.data()[idx]));
    }
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(std::uint64_t)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Video read_tensor(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != kTensorMagic) throw IoError(path.string() + ": not a tensor file");
  std::string line;
  std::getline(in, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": bad tensor header: " + e.what());
  }
  if (header.value("dtype", "") != "float64" || header.value("endianness", "") != "little") {
    throw IoError(path.string() + ": unsupported tensor encoding");
  }
  const auto rows = header.at("rows").get<std::size_t>();
  const auto cols = header.at("cols").get<std::size_t>();
  const auto frames = header.at("frames").get<std::size_t>();
  if (frames == 0) throw IoError(path.string() + ": tensor has zero frames");
  Video video;
  video.x_black = header.at("x_black").get<double>();
  video.x_white = header.at("x_white").get<double>();
  std::vector<std::uint64_t> buffer(rows * cols);
  for (std::size_t k = 0; k < frames; ++k) {
    in.read(reinterpret_cast<char*>(buffer.data()),
            static_cast<std::streamsize>(buffer.size() * sizeof(std::uint64_t)));
    if (static_cast<std::size_t>(in.gcount()) != buffer.size() * sizeof(std::uint64_t)) {
      throw IoError(path.string() + ": truncated tensor data");
    }
    Frame f(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t idx = 0; idx < buffer.size(); ++idx) {
      f.data()[idx] = std::bit_cast<double>(to_little(buffer[idx]));
    }
    video.frames.push_back(std::move(f));
  }
  return video;
}

Video load_video(const fs::path& input) {
  if (fs::is_directory(input)) {
    Video video;
    video.x_black = 0.0;
    video.x_white = 255.0;
    for (const auto& file : list_frames(input)) {
      video.frames.push_back(read_pnm(file));
      if (video.frames.back().maxCoeff() > 255.0) video.x_white = 65535.0;
    }
    if (video.frames.empty()) throw IoError(input.string() + ": no frames found");
    try {
      video.geometry();
    } catch (const InputError& e) {
      throw IoError(input.string() + ": " + e.what());
    }
    return video;
  }
  if (!fs::exists(input)) throw IoError(input.string() + " does not exist");
  return read_tensor(input);
}

std::string frame_name(std::size_t k, const std::string& suffix) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu", k);
  return buf + suffix;
}

}  // namespace nrpca::io
