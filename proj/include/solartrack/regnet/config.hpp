#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "solartrack/errors.hpp"

namespace solartrack::regnet {

struct ConvSpec {
  int out_channels = 8;
  int kernel = 3;
  int stride = 2;
  friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// Two-branch regression network. Each branch is a stack of ReLU
/// convolutions (zero padding kernel/2) over a single-channel S x S crop; the
/// flattened branch outputs are concatenated and fed through ReLU fully
/// connected layers into a linear 4-output head.
struct RegNetConfig {
  int crop_size = 64;
  std::vector<ConvSpec> conv = {{8, 3, 2}, {16, 3, 2}, {32, 3, 2}};
  std::vector<int> fc_widths = {256, 256};
  double output_scale = 10.0;
  double context_factor = 2.0;
  bool share_branch_weights = true;

  /// Five convolutions and three 4096-wide layers. Present for completeness;
  /// far too large to train on a CPU in reasonable time.
  static RegNetConfig paper_scale() {
    RegNetConfig c;
    c.crop_size = 224;
    c.conv = {{96, 11, 4}, {256, 5, 2}, {384, 3, 2}, {384, 3, 1}, {256, 3, 2}};
    c.fc_widths = {4096, 4096, 4096};
    return c;
  }

  void validate() const {
    if (crop_size < 16) throw ValidationError("RegNetConfig: crop_size must be >= 16");
    if (conv.empty()) throw ValidationError("RegNetConfig: need at least one convolution");
    long stride_product = 1;
    for (const auto& c : conv) {
      if (c.out_channels < 1 || c.kernel < 1 || c.stride < 1) throw ValidationError("RegNetConfig: bad conv spec");
      stride_product *= c.stride;
    }
    if (crop_size % stride_product != 0) {
      throw ValidationError("RegNetConfig: crop_size must be divisible by the conv stride product");
    }
    for (int w : fc_widths) {
      if (w < 1) throw ValidationError("RegNetConfig: fc widths must be positive");
    }
    if (!(output_scale > 0.0)) throw ValidationError("RegNetConfig: output_scale must be positive");
    if (!(context_factor >= 1.0)) throw ValidationError("RegNetConfig: context_factor must be >= 1");
  }

  friend bool operator==(const RegNetConfig&, const RegNetConfig&) = default;
};

inline constexpr int kOutputs = 4;

struct ConvLayout {
  int in_channels, out_channels, kernel, stride, pad;
  int in_size, out_size;
  std::size_t weight_offset, bias_offset;
  [[nodiscard]] std::size_t weight_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel * kernel;
  }
  [[nodiscard]] std::size_t out_count() const { return static_cast<std::size_t>(out_channels) * out_size * out_size; }
  [[nodiscard]] std::size_t in_count() const { return static_cast<std::size_t>(in_channels) * in_size * in_size; }
};

struct FcLayout {
  int in, out;
  std::size_t weight_offset, bias_offset;
};

/// Offsets of every tensor in the flat parameter vector. Canonical order:
/// branch-A convolutions (kernel [out][in][ky][kx], then bias), branch-B
/// convolutions when weights are not shared, then fully connected layers
/// (weight [out][in], then bias), head last.
struct ParamLayout {
  std::vector<ConvLayout> branch_a;
  std::vector<ConvLayout> branch_b;
  std::vector<FcLayout> fc;
  std::size_t feature_size = 0;  // per branch
  std::size_t total = 0;

  explicit ParamLayout(const RegNetConfig& cfg) {
    cfg.validate();
    auto build_branch = [&](std::vector<ConvLayout>& out) {
      int channels = 1;
      int size = cfg.crop_size;
      for (const auto& c : cfg.conv) {
        ConvLayout l{};
        l.in_channels = channels;
        l.out_channels = c.out_channels;
        l.kernel = c.kernel;
        l.stride = c.stride;
        l.pad = c.kernel / 2;
        l.in_size = size;
        l.out_size = (size + 2 * l.pad - c.kernel) / c.stride + 1;
        if (l.out_size < 1) throw ValidationError("RegNetConfig: feature map vanishes");
        l.weight_offset = total;
        total += l.weight_count();
        l.bias_offset = total;
        total += static_cast<std::size_t>(c.out_channels);
        out.push_back(l);
        channels = c.out_channels;
        size = l.out_size;
      }
      feature_size = static_cast<std::size_t>(channels) * size * size;
    };
    build_branch(branch_a);
    if (cfg.share_branch_weights) {
      branch_b = branch_a;
    } else {
      build_branch(branch_b);
    }
    int in = static_cast<int>(2 * feature_size);
    std::vector<int> widths = cfg.fc_widths;
    widths.push_back(kOutputs);
    for (int w : widths) {
      FcLayout f{in, w, total, 0};
      total += static_cast<std::size_t>(in) * w;
      f.bias_offset = total;
      total += static_cast<std::size_t>(w);
      fc.push_back(f);
      in = w;
    }
  }
};

}  // namespace solartrack::regnet
