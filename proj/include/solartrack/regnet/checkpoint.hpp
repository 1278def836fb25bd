#pragma once

// Checkpoint file, all integers and reals little-endian:
//
//   "RGNT"                       magic
//   u32  format version (1)
//   u32  crop_size
//   u32  conv layer count, then per layer: u32 out_channels, u32 kernel, u32 stride
//   u32  fc layer count, then per layer: u32 width
//   f64  output_scale
//   f64  context_factor
//   u8   share_branch_weights
//   u64  iteration
//   f64  parameters, canonical order (count implied by the config)

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "solartrack/errors.hpp"
#include "solartrack/image.hpp"
#include "solartrack/regnet/train.hpp"

namespace solartrack::regnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* s, std::size_t n) { out_.append(s, n); }
  [[nodiscard]] std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  [[nodiscard]] bool at_end() const { return pos_ == bytes_.size(); }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError("checkpoint: truncated");
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

[[nodiscard]] inline std::string encode_checkpoint(const Checkpoint& c) {
  const auto& cfg = c.params.config();
  detail::ByteWriter w;
  w.raw("RGNT", 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(cfg.crop_size));
  w.u32(static_cast<std::uint32_t>(cfg.conv.size()));
  for (const auto& l : cfg.conv) {
    w.u32(static_cast<std::uint32_t>(l.out_channels));
    w.u32(static_cast<std::uint32_t>(l.kernel));
    w.u32(static_cast<std::uint32_t>(l.stride));
  }
  w.u32(static_cast<std::uint32_t>(cfg.fc_widths.size()));
  for (int width : cfg.fc_widths) w.u32(static_cast<std::uint32_t>(width));
  w.f64(cfg.output_scale);
  w.f64(cfg.context_factor);
  w.u8(cfg.share_branch_weights ? 1 : 0);
  w.u64(static_cast<std::uint64_t>(c.iteration));
  for (double v : c.params.values()) w.f64(v);
  return w.take();
}

[[nodiscard]] inline Checkpoint decode_checkpoint(const std::string& bytes) {
  detail::ByteReader r(bytes);
  r.need(4);
  if (bytes.compare(0, 4, "RGNT") != 0) throw ParseError("checkpoint: bad magic");
  for (int i = 0; i < 4; ++i) r.u8();
  if (const auto version = r.u32(); version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(version));
  }
  RegNetConfig cfg;
  cfg.crop_size = static_cast<int>(r.u32());
  const auto n_conv = r.u32();
  if (n_conv > 64) throw ParseError("checkpoint: implausible conv layer count");
  cfg.conv.clear();
  for (std::uint32_t i = 0; i < n_conv; ++i) {
    ConvSpec s;
    s.out_channels = static_cast<int>(r.u32());
    s.kernel = static_cast<int>(r.u32());
    s.stride = static_cast<int>(r.u32());
    cfg.conv.push_back(s);
  }
  const auto n_fc = r.u32();
  if (n_fc > 64) throw ParseError("checkpoint: implausible fc layer count");
  cfg.fc_widths.clear();
  for (std::uint32_t i = 0; i < n_fc; ++i) cfg.fc_widths.push_back(static_cast<int>(r.u32()));
  cfg.output_scale = r.f64();
  cfg.context_factor = r.f64();
  cfg.share_branch_weights = r.u8() != 0;
  const auto iteration = static_cast<long>(r.u64());
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  RegNetParams params(cfg);
  r.need(params.size() * 8);
  for (double& v : params.values()) v = r.f64();
  if (!r.at_end()) throw ParseError("checkpoint: trailing bytes");
  return Checkpoint{iteration, std::move(params)};
}

inline void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string bytes = encode_checkpoint(c);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

[[nodiscard]] inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(pgm::read_file(path));
}

}  // namespace solartrack::regnet
