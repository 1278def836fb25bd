#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "solartrack/errors.hpp"
#include "solartrack/regnet/config.hpp"
#include "solartrack/rng.hpp"

namespace solartrack::regnet {

using Output = std::array<double, kOutputs>;

/// A crop fed to one branch: crop_size x crop_size intensities, row-major.
using Crop = std::vector<double>;

class RegNetParams {
 public:
  explicit RegNetParams(RegNetConfig cfg) : cfg_(std::move(cfg)), layout_(cfg_), values_(layout_.total, 0.0) {}

  /// He-normal weights, zero biases, and a head bias that starts at the
  /// "no motion" answer (box in the central half of the search crop).
  static RegNetParams initialized(const RegNetConfig& cfg, std::uint64_t seed) {
    RegNetParams p(cfg);
    Rng rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, double stddev) {
      for (std::size_t i = 0; i < count; ++i) p.values_[offset + i] = stddev * rng.normal();
    };
    auto init_branch = [&](const std::vector<ConvLayout>& branch) {
      for (const auto& l : branch) {
        fill(l.weight_offset, l.weight_count(), std::sqrt(2.0 / (l.in_channels * l.kernel * l.kernel)));
      }
    };
    init_branch(p.layout_.branch_a);
    if (!cfg.share_branch_weights) init_branch(p.layout_.branch_b);
    for (std::size_t j = 0; j < p.layout_.fc.size(); ++j) {
      const auto& f = p.layout_.fc[j];
      const bool head = j + 1 == p.layout_.fc.size();
      fill(f.weight_offset, static_cast<std::size_t>(f.in) * f.out, std::sqrt((head ? 0.1 : 2.0) / f.in));
    }
    const auto& head = p.layout_.fc.back();
    const double k = cfg.output_scale;
    const double lo = k * (0.5 - 0.5 / cfg.context_factor);
    const double hi = k * (0.5 + 0.5 / cfg.context_factor);
    p.values_[head.bias_offset + 0] = lo;
    p.values_[head.bias_offset + 1] = lo;
    p.values_[head.bias_offset + 2] = hi;
    p.values_[head.bias_offset + 3] = hi;
    return p;
  }

  [[nodiscard]] const RegNetConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const ParamLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  friend bool operator==(const RegNetParams& a, const RegNetParams& b) {
    return a.cfg_ == b.cfg_ && a.values_ == b.values_;
  }

 private:
  RegNetConfig cfg_;
  ParamLayout layout_;
  std::vector<double> values_;
};

namespace detail {

constexpr int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
constexpr int ceil_div(int a, int b) { return -floor_div(-a, b); }

inline void conv_forward(const ConvLayout& l, const double* w, const double* b, const double* in, double* out) {
  const int is = l.in_size, os = l.out_size, s = l.stride, k = l.kernel, p = l.pad;
  for (int o = 0; o < l.out_channels; ++o) {
    double* out_plane = out + static_cast<std::size_t>(o) * os * os;
    std::fill(out_plane, out_plane + static_cast<std::ptrdiff_t>(os) * os, b[o]);
    for (int i = 0; i < l.in_channels; ++i) {
      const double* in_plane = in + static_cast<std::size_t>(i) * is * is;
      const double* wk = w + (static_cast<std::size_t>(o) * l.in_channels + i) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = wk[ky * k + kx];
          const int ox_lo = std::max(0, ceil_div(p - kx, s));
          const int ox_hi = std::min(os - 1, floor_div(is - 1 + p - kx, s));
          for (int oy = 0; oy < os; ++oy) {
            const int iy = oy * s + ky - p;
            if (iy < 0 || iy >= is) continue;
            const double* in_row = in_plane + static_cast<std::ptrdiff_t>(iy) * is;
            double* out_row = out_plane + static_cast<std::ptrdiff_t>(oy) * os;
            for (int ox = ox_lo; ox <= ox_hi; ++ox) out_row[ox] += wv * in_row[ox * s + kx - p];
          }
        }
      }
    }
  }
}

/// `dout` is the gradient w.r.t. the pre-activation output. Accumulates into
/// `dw`, `db`, and (when non-null) `din`.
inline void conv_backward(const ConvLayout& l, const double* w, const double* in, const double* dout, double* dw,
                          double* db, double* din) {
  const int is = l.in_size, os = l.out_size, s = l.stride, k = l.kernel, p = l.pad;
  for (int o = 0; o < l.out_channels; ++o) {
    const double* dout_plane = dout + static_cast<std::size_t>(o) * os * os;
    double sum = 0.0;
    for (int q = 0; q < os * os; ++q) sum += dout_plane[q];
    db[o] += sum;
    for (int i = 0; i < l.in_channels; ++i) {
      const double* in_plane = in + static_cast<std::size_t>(i) * is * is;
      double* din_plane = din ? din + static_cast<std::size_t>(i) * is * is : nullptr;
      const std::size_t wbase = (static_cast<std::size_t>(o) * l.in_channels + i) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w[wbase + ky * k + kx];
          double acc = 0.0;
          const int ox_lo = std::max(0, ceil_div(p - kx, s));
          const int ox_hi = std::min(os - 1, floor_div(is - 1 + p - kx, s));
          for (int oy = 0; oy < os; ++oy) {
            const int iy = oy * s + ky - p;
            if (iy < 0 || iy >= is) continue;
            const std::ptrdiff_t in_off = static_cast<std::ptrdiff_t>(iy) * is;
            const int shift = kx - p;
            const double* dout_row = dout_plane + static_cast<std::ptrdiff_t>(oy) * os;
            const double* in_row = in_plane + in_off;
            for (int ox = ox_lo; ox <= ox_hi; ++ox) acc += dout_row[ox] * in_row[ox * s + shift];
            if (din_plane) {
              double* din_row = din_plane + in_off;
              for (int ox = ox_lo; ox <= ox_hi; ++ox) din_row[ox * s + shift] += wv * dout_row[ox];
            }
          }
          dw[wbase + ky * k + kx] += acc;
        }
      }
    }
  }
}

inline void relu(std::vector<double>& v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace detail

/// Activations kept for the backward pass. `branch_a[0]` / `branch_b[0]`
/// are the inputs; entry l+1 is the post-ReLU output of convolution l.
/// `fc[0]` is the concatenated feature vector; entry j+1 is the output of
/// fully connected layer j (post-ReLU except the linear head).
struct ForwardCache {
  std::vector<std::vector<double>> branch_a;
  std::vector<std::vector<double>> branch_b;
  std::vector<std::vector<double>> fc;
  [[nodiscard]] Output output() const {
    Output o{};
    std::copy_n(fc.back().begin(), kOutputs, o.begin());
    return o;
  }
};

inline void check_crop(const RegNetConfig& cfg, const Crop& c) {
  const auto n = static_cast<std::size_t>(cfg.crop_size) * static_cast<std::size_t>(cfg.crop_size);
  if (c.size() != n) throw ValidationError("regnet: crop shape mismatch");
}

[[nodiscard]] inline ForwardCache forward_cached(const RegNetParams& params, const Crop& target, const Crop& search) {
  const auto& cfg = params.config();
  const auto& L = params.layout();
  check_crop(cfg, target);
  check_crop(cfg, search);
  const double* v = params.values().data();
  ForwardCache cache;
  auto run_branch = [&](const std::vector<ConvLayout>& layers, const Crop& input, std::vector<std::vector<double>>& acts) {
    acts.reserve(layers.size() + 1);
    acts.push_back(input);
    for (const auto& l : layers) {
      std::vector<double> out(l.out_count());
      detail::conv_forward(l, v + l.weight_offset, v + l.bias_offset, acts.back().data(), out.data());
      detail::relu(out);
      acts.push_back(std::move(out));
    }
  };
  run_branch(L.branch_a, target, cache.branch_a);
  run_branch(L.branch_b, search, cache.branch_b);

  std::vector<double> x;
  x.reserve(2 * L.feature_size);
  x.insert(x.end(), cache.branch_a.back().begin(), cache.branch_a.back().end());
  x.insert(x.end(), cache.branch_b.back().begin(), cache.branch_b.back().end());
  cache.fc.push_back(std::move(x));
  for (std::size_t j = 0; j < L.fc.size(); ++j) {
    const auto& f = L.fc[j];
    const auto& in = cache.fc.back();
    std::vector<double> out(static_cast<std::size_t>(f.out));
    const double* w = v + f.weight_offset;
    for (int o = 0; o < f.out; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * f.in;
      double acc = v[f.bias_offset + o];
      for (int i = 0; i < f.in; ++i) acc += row[i] * in[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(o)] = acc;
    }
    if (j + 1 < L.fc.size()) detail::relu(out);
    cache.fc.push_back(std::move(out));
  }
  return cache;
}

[[nodiscard]] inline Output forward(const RegNetParams& params, const Crop& target, const Crop& search) {
  return forward_cached(params, target, search).output();
}

/// Sum of absolute differences.
[[nodiscard]] inline double loss(const Output& pred, const Output& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < kOutputs; ++i) s += std::abs(pred[i] - target[i]);
  return s;
}

struct Gradient {
  std::vector<double> values;
  double loss = 0.0;
  Output output{};
};

/// Reverse-mode gradient of the L1 loss w.r.t. every parameter. The
/// subgradient of |.| and of ReLU at zero is taken as zero.
[[nodiscard]] inline Gradient backward(const RegNetParams& params, const Crop& target_crop, const Crop& search_crop,
                                       const Output& target) {
  const auto& L = params.layout();
  const double* v = params.values().data();
  const ForwardCache cache = forward_cached(params, target_crop, search_crop);
  Gradient g;
  g.values.assign(params.size(), 0.0);
  g.output = cache.output();
  g.loss = loss(g.output, target);
  double* gv = g.values.data();

  std::vector<double> dy(kOutputs);
  for (std::size_t i = 0; i < kOutputs; ++i) {
    const double d = g.output[i] - target[i];
    dy[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  for (std::size_t j = L.fc.size(); j-- > 0;) {
    const auto& f = L.fc[j];
    const auto& in = cache.fc[j];
    std::vector<double> dx(static_cast<std::size_t>(f.in), 0.0);
    const double* w = v + f.weight_offset;
    double* dw = gv + f.weight_offset;
    for (int o = 0; o < f.out; ++o) {
      const double d = dy[static_cast<std::size_t>(o)];
      gv[f.bias_offset + o] += d;
      if (d == 0.0) continue;
      const double* row = w + static_cast<std::size_t>(o) * f.in;
      double* drow = dw + static_cast<std::size_t>(o) * f.in;
      for (int i = 0; i < f.in; ++i) {
        drow[i] += d * in[static_cast<std::size_t>(i)];
        dx[static_cast<std::size_t>(i)] += d * row[i];
      }
    }
    if (j > 0) {
      // through the ReLU of the previous layer
      for (std::size_t i = 0; i < dx.size(); ++i) {
        if (in[i] <= 0.0) dx[i] = 0.0;
      }
    }
    dy = std::move(dx);
  }

  auto back_branch = [&](const std::vector<ConvLayout>& layers, const std::vector<std::vector<double>>& acts,
                         std::vector<double> dout) {
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      const auto& out = acts[l + 1];
      for (std::size_t q = 0; q < dout.size(); ++q) {
        if (out[q] <= 0.0) dout[q] = 0.0;
      }
      std::vector<double> din;
      if (l > 0) din.assign(layer.in_count(), 0.0);
      detail::conv_backward(layer, v + layer.weight_offset, acts[l].data(), dout.data(), gv + layer.weight_offset,
                            gv + layer.bias_offset, l > 0 ? din.data() : nullptr);
      dout = std::move(din);
    }
  };
  const auto fs = static_cast<std::ptrdiff_t>(L.feature_size);
  back_branch(L.branch_a, cache.branch_a, std::vector<double>(dy.begin(), dy.begin() + fs));
  back_branch(L.branch_b, cache.branch_b, std::vector<double>(dy.begin() + fs, dy.end()));
  return g;
}

}  // namespace solartrack::regnet
