#pragma once

// Synthetic solar-disk sequences: a limb-darkened disk with one drifting
// Gaussian blob (bright and additive for AR-like events, dark and
// multiplicative for CH-like ones). Truth is the blob's 2-sigma box in every
// frame; annotations are exposed every `annotate_every` frames.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/image.hpp"
#include "solartrack/rng.hpp"

namespace solartrack::synth {

enum class EventKind { bright, dark };

struct SynthConfig {
  int image_size = 96;
  double disk_radius = 40.0;
  EventKind event_kind = EventKind::bright;
  int n_frames = 25;
  double blob_sigma_x = 4.0;  // pixels
  double blob_sigma_y = 3.0;
  double drift = 1.0;          // pixels/frame along +x
  double jitter_sigma = 0.3;   // pixels, independent per frame and axis
  double growth_rate = 0.0;    // fractional sigma growth per frame
  int annotate_every = 5;
  double noise_sigma = 0.01;
  std::optional<Point> start;  // initial blob center; sampled from the seed when unset
  std::uint64_t seed = 0;

  void validate() const {
    if (image_size < 8) throw ValidationError("SynthConfig: image_size too small");
    if (!(disk_radius > 0.0) || !(disk_radius < image_size / 2.0)) {
      throw ValidationError("SynthConfig: disk_radius must be in (0, image_size/2)");
    }
    if (n_frames < 2) throw ValidationError("SynthConfig: n_frames must be >= 2");
    if (annotate_every < 1) throw ValidationError("SynthConfig: annotate_every must be >= 1");
    if (!(blob_sigma_x > 0.0) || !(blob_sigma_y > 0.0)) throw ValidationError("SynthConfig: blob sigma must be positive");
    if (jitter_sigma < 0.0 || noise_sigma < 0.0) throw ValidationError("SynthConfig: negative noise");
    if (growth_rate <= -1.0) throw ValidationError("SynthConfig: growth_rate must exceed -1");
  }
};

inline constexpr double kDiskIntensity = 0.55;
inline constexpr double kLimbDarkening = 0.6;
inline constexpr double kBrightAmplitude = 0.4;
inline constexpr double kDarkDepth = 0.75;

[[nodiscard]] inline double disk_background(double x, double y, double cx, double cy, double radius) {
  const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
  if (d2 > 1.0) return 0.0;
  return kDiskIntensity * (1.0 - kLimbDarkening * (1.0 - std::sqrt(1.0 - d2)));
}

[[nodiscard]] inline dataset::Sequence generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double size = cfg.image_size;
  const double cx = size / 2.0;
  const double cy = size / 2.0;
  const double r = cfg.disk_radius;
  const double travel = cfg.drift * (cfg.n_frames - 1);

  Point start;
  if (cfg.start) {
    start = *cfg.start;
  } else {
    const double lo = -0.6 * r;
    const double hi = std::max(lo, 0.6 * r - travel);
    start = {cx + rng.uniform(lo, hi), cy + rng.uniform(-0.5 * r, 0.5 * r)};
  }
  auto inside = [&](Point p) { return (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy) <= r * r; };
  if (!inside(start)) throw ValidationError("generate: initial blob position is off the disk");
  if (!inside({start.x + travel, start.y})) throw ValidationError("generate: blob drifts off the disk");

  dataset::Sequence seq;
  seq.meta.event_type = cfg.event_kind == EventKind::bright ? dataset::EventType::AR : dataset::EventType::CH;
  char id[32];
  std::snprintf(id, sizeof id, "syn_%016llx", static_cast<unsigned long long>(cfg.seed));
  seq.meta.event_id = id;
  auto& h = seq.meta.header;
  h.width = cfg.image_size;
  h.height = cfg.image_size;
  h.rsun = 960.0;
  h.cdelt1 = h.cdelt2 = h.rsun / r;
  h.crpix1 = cx + 1.0;
  h.crpix2 = cy + 1.0;

  const int n = cfg.image_size;
  std::vector<double> background(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      background[static_cast<std::size_t>(y * n + x)] = disk_background(x + 0.5, y + 0.5, cx, cy, r);
    }
  }

  for (int t = 0; t < cfg.n_frames; ++t) {
    const double grow = std::pow(1.0 + cfg.growth_rate, t);
    const double sx = cfg.blob_sigma_x * grow;
    const double sy = cfg.blob_sigma_y * grow;
    const double bx = start.x + cfg.drift * t + cfg.jitter_sigma * rng.normal();
    const double by = start.y + cfg.jitter_sigma * rng.normal();

    Image frame(n, n);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const double dx = (x + 0.5 - bx) / sx;
        const double dy = (y + 0.5 - by) / sy;
        const double g = std::exp(-0.5 * (dx * dx + dy * dy));
        const double bg = background[static_cast<std::size_t>(y * n + x)];
        double v = cfg.event_kind == EventKind::bright ? bg + kBrightAmplitude * g * (bg > 0.0 ? 1.0 : 0.0)
                                                       : bg * (1.0 - kDarkDepth * g);
        if (cfg.noise_sigma > 0.0) v += cfg.noise_sigma * rng.normal();
        frame.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
    seq.frames.push_back(std::move(frame));
    const BBox truth = BBox(bx - 2 * sx, by - 2 * sy, bx + 2 * sx, by + 2 * sy).clamped(size, size);
    seq.truth.push_back(truth);
    if (t % cfg.annotate_every == 0) seq.annotations.emplace(t, dataset::Annotation::from_box(t, truth));
  }
  h.obs_time = Timestamp{};
  return seq;
}

/// Configuration of the `index`-th corpus sequence: drift, blob size,
/// jitter and growth scaled by independent factors in [0.75, 1.25], start
/// position left to the sequence seed.
[[nodiscard]] inline SynthConfig corpus_config(const SynthConfig& tmpl, std::uint64_t master_seed, std::uint64_t index) {
  SynthConfig c = tmpl;
  c.seed = derive_seed(master_seed, index);
  Rng rng(c.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  c.drift *= rng.uniform(0.75, 1.25);
  c.blob_sigma_x *= rng.uniform(0.75, 1.25);
  c.blob_sigma_y *= rng.uniform(0.75, 1.25);
  c.jitter_sigma *= rng.uniform(0.75, 1.25);
  c.growth_rate *= rng.uniform(0.75, 1.25);
  c.start.reset();
  return c;
}

[[nodiscard]] inline std::vector<dataset::Sequence> generate_corpus(std::size_t n_sequences, const SynthConfig& tmpl,
                                                                    std::uint64_t master_seed) {
  if (n_sequences < 1) throw ValidationError("generate_corpus: need at least one sequence");
  std::vector<dataset::Sequence> out;
  out.reserve(n_sequences);
  for (std::size_t i = 0; i < n_sequences; ++i) out.push_back(generate(corpus_config(tmpl, master_seed, i)));
  return out;
}

}  // namespace solartrack::synth
