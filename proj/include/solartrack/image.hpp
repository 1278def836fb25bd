#pragma once

// Single-channel images with intensities in [0, 1] (stored as float), plus binary PGM (P5)
// reading and writing. 8-bit and 16-bit maxval files are accepted on read;
// writes are always 8-bit.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "solartrack/errors.hpp"

namespace solartrack {

class Image {
 public:
  Image() = default;
  Image(int width, int height, double fill = 0.0) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ValidationError("Image: dimensions must be >= 1");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), static_cast<float>(fill));
  }

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }

  [[nodiscard]] double at(int x, int y) const { return pixels_[index(x, y)]; }
  float& at(int x, int y) { return pixels_[index(x, y)]; }

  /// Zero outside the frame.
  [[nodiscard]] double at_or_zero(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return 0.0;
    return pixels_[index(x, y)];
  }

  /// Bilinear sample at continuous coordinates where pixel (c, r) has its
  /// center at (c + 0.5, r + 0.5); samples outside the frame read as zero.
  [[nodiscard]] double sample(double x, double y) const {
    const double fx = x - 0.5;
    const double fy = y - 0.5;
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double ax = fx - x0;
    const double ay = fy - y0;
    return (1 - ay) * ((1 - ax) * at_or_zero(x0, y0) + ax * at_or_zero(x0 + 1, y0)) +
           ay * ((1 - ax) * at_or_zero(x0, y0 + 1) + ax * at_or_zero(x0 + 1, y0 + 1));
  }

  [[nodiscard]] const std::vector<float>& pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::vector<float>& pixels() noexcept { return pixels_; }

  [[nodiscard]] double mean() const {
    if (pixels_.empty()) return 0.0;
    double s = 0.0;
    for (float v : pixels_) s += v;
    return s / static_cast<double>(pixels_.size());
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  [[nodiscard]] std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
};

namespace pgm {

[[nodiscard]] inline std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

[[nodiscard]] inline std::string encode(const Image& img) {
  std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  out.reserve(out.size() + img.size());
  for (float v : img.pixels()) out.push_back(static_cast<char>(quantize(v)));
  return out;
}

[[nodiscard]] inline Image decode(const std::string& bytes) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space_and_comments();
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw ParseError("pgm: expected integer in header");
    return std::stol(bytes.substr(start, pos - start));
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ParseError("pgm: missing P5 magic");
  pos = 2;
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw ParseError("pgm: bad header values");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw ParseError("pgm: missing separator after header");
  }
  ++pos;
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n * bpp) throw ParseError("pgm: truncated pixel data");
  Image img(static_cast<int>(w), static_cast<int>(h));
  auto& px = img.pixels();
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bpp == 1 ? data[i] : (static_cast<unsigned>(data[2 * i]) << 8) | data[2 * i + 1];
    px[i] = static_cast<float>(static_cast<double>(v) / static_cast<double>(maxval));
  }
  return img;
}

inline void write(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string bytes = encode(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[nodiscard]] inline Image read(const std::filesystem::path& path) { return decode(read_file(path)); }

}  // namespace pgm
}  // namespace solartrack
