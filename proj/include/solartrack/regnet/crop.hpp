#pragma once

// Crop extraction and the frame <-> crop coordinate maps.
//
// A crop window is a box in frame coordinates, resampled (bilinear, zero
// outside the frame) to crop_size x crop_size. Regression targets are box
// corners in window coordinates normalized to [0, 1] and multiplied by the
// output scale.

#include <algorithm>
#include <cmath>
#include <optional>

#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/image.hpp"
#include "solartrack/regnet/config.hpp"
#include "solartrack/regnet/network.hpp"
#include "solartrack/rng.hpp"

namespace solartrack::regnet {

/// Inverse-CDF Laplace draw for a given uniform `u` in (0, 1).
[[nodiscard]] inline double laplace_from_uniform(double mu, double b, double u) {
  const double d = u - 0.5;
  if (d == 0.0 || b == 0.0) return mu;
  return mu - b * (d > 0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(d));
}

[[nodiscard]] inline double laplace_sample(double mu, double b, Rng& rng) {
  if (b < 0.0) throw ValidationError("laplace_sample: negative scale");
  return laplace_from_uniform(mu, b, rng.uniform());
}

/// Perturbs the search-region reference box: center shifted by a Laplace
/// fraction of the box size, each side scaled by exp(Laplace) clamped to
/// [scale_min, scale_max].
struct CropSampler {
  double b_shift = 0.2;
  double b_scale = 1.0 / 15.0;
  double scale_min = 0.6;
  double scale_max = 1.4;
  Rng rng{0};

  void validate() const {
    if (b_shift < 0.0 || b_scale < 0.0) throw ValidationError("CropSampler: negative Laplace scale");
    if (!(scale_min <= 1.0 && 1.0 <= scale_max && scale_min > 0.0)) throw ValidationError("CropSampler: bad scale clamp");
  }

  [[nodiscard]] BBox perturb(const BBox& box) {
    const Point c = box.center();
    const double cx = c.x + box.width() * laplace_sample(0.0, b_shift, rng);
    const double cy = c.y + box.height() * laplace_sample(0.0, b_shift, rng);
    const double sw = std::clamp(std::exp(laplace_sample(0.0, b_scale, rng)), scale_min, scale_max);
    const double sh = std::clamp(std::exp(laplace_sample(0.0, b_scale, rng)), scale_min, scale_max);
    return BBox::from_center(cx, cy, box.width() * sw, box.height() * sh);
  }
};

[[nodiscard]] inline Crop extract_crop(const Image& frame, const BBox& window, int size) {
  if (window.empty()) throw ValidationError("extract_crop: degenerate window");
  if (!intersection(window, BBox(0, 0, frame.width(), frame.height()))) {
    throw ValidationError("extract_crop: crop window lies outside the frame");
  }
  Crop out(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));
  const double sx = window.width() / size;
  const double sy = window.height() / size;
  for (int v = 0; v < size; ++v) {
    const double y = window.y1() + (v + 0.5) * sy;
    for (int u = 0; u < size; ++u) {
      out[static_cast<std::size_t>(v) * size + u] = frame.sample(window.x1() + (u + 0.5) * sx, y);
    }
  }
  return out;
}

/// Scaled window coordinates of `box`.
[[nodiscard]] inline Output to_crop(const BBox& box, const BBox& window, double output_scale) {
  return {output_scale * (box.x1() - window.x1()) / window.width(),
          output_scale * (box.y1() - window.y1()) / window.height(),
          output_scale * (box.x2() - window.x1()) / window.width(),
          output_scale * (box.y2() - window.y1()) / window.height()};
}

/// Inverse of `to_crop`. Corners are normalized, so swapped outputs give a valid box.
[[nodiscard]] inline BBox to_frame(const Output& out, const BBox& window, double output_scale) {
  return BBox(window.x1() + out[0] / output_scale * window.width(), window.y1() + out[1] / output_scale * window.height(),
              window.x1() + out[2] / output_scale * window.width(), window.y1() + out[3] / output_scale * window.height());
}

struct CropPair {
  Crop target;
  Crop search;
  BBox search_window;
  std::optional<Output> regression;
};

/// Target crop: previous frame around the previous box, dilated by the
/// context factor. Search crop: current frame around the previous box (or a
/// sampler perturbation of it), same dilation. The regression target is the
/// current box in search-window coordinates, when a current box is given.
[[nodiscard]] inline CropPair crop_pair(const Image& prev_frame, const BBox& prev_box, const Image& curr_frame,
                                        const std::optional<BBox>& curr_box, CropSampler* sampler,
                                        const RegNetConfig& cfg) {
  if (prev_box.empty()) throw ValidationError("crop_pair: degenerate previous box");
  const double k = cfg.context_factor;
  const BBox reference = sampler ? sampler->perturb(prev_box) : prev_box;
  CropPair pair;
  pair.target = extract_crop(prev_frame, prev_box.dilated(k), cfg.crop_size);
  pair.search_window = reference.dilated(k);
  pair.search = extract_crop(curr_frame, pair.search_window, cfg.crop_size);
  if (curr_box) pair.regression = to_crop(*curr_box, pair.search_window, cfg.output_scale);
  return pair;
}

}  // namespace solartrack::regnet
