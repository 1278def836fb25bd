#pragma once

// Single-object tracker contract: `init` with the first frame and its box,
// then one `step` per following frame. Trackers only ever see frames after
// initialization. Baselines: StaticTracker (box never moves) and NccTracker
// (exhaustive integer-shift template search).

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/image.hpp"

namespace solartrack::trackers {

struct TrackerState {
  Image previous_frame;
  BBox previous_box;
};

class Tracker {
 public:
  virtual ~Tracker() = default;

  /// Clamps `box` to the frame; rejects boxes with no positive area left.
  void init(const Image& frame, const BBox& box) {
    if (frame.empty()) throw ValidationError("Tracker::init: empty frame");
    if (box.empty()) throw ValidationError("Tracker::init: degenerate box");
    const BBox clamped = box.clamped(frame.width(), frame.height());
    if (clamped.empty()) throw ValidationError("Tracker::init: box does not intersect the frame");
    state_ = TrackerState{frame, clamped};
    on_init(*state_);
  }

  BBox step(const Image& next_frame) {
    if (!state_) throw ValidationError("Tracker::step: not initialized");
    if (next_frame.width() != state_->previous_frame.width() || next_frame.height() != state_->previous_frame.height()) {
      throw ValidationError("Tracker::step: frame dimensions changed");
    }
    BBox out = predict(*state_, next_frame).clamped(next_frame.width(), next_frame.height());
    if (out.empty()) out = state_->previous_box;
    state_->previous_frame = next_frame;
    state_->previous_box = out;
    return out;
  }

  [[nodiscard]] const std::optional<TrackerState>& state() const noexcept { return state_; }
  [[nodiscard]] virtual std::string name() const = 0;

 protected:
  virtual void on_init(const TrackerState&) {}
  /// Box for `next_frame`; the base class clamps it to the frame.
  virtual BBox predict(const TrackerState& state, const Image& next_frame) = 0;

 private:
  std::optional<TrackerState> state_;
};

class StaticTracker final : public Tracker {
 public:
  [[nodiscard]] std::string name() const override { return "static"; }

 protected:
  BBox predict(const TrackerState& state, const Image&) override { return state.previous_box; }
};

struct PatchView {
  const Image* image;
  int x0;
  int y0;
  int width;
  int height;
  [[nodiscard]] double at(int x, int y) const { return image->at_or_zero(x0 + x, y0 + y); }
};

/// Zero-mean normalized cross-correlation of two equally sized patches;
/// empty when either patch has zero variance.
[[nodiscard]] inline std::optional<double> ncc(const PatchView& templ, const PatchView& patch) {
  if (templ.width != patch.width || templ.height != patch.height) throw ValidationError("ncc: shape mismatch");
  const double n = static_cast<double>(templ.width) * templ.height;
  double st = 0, sp = 0;
  for (int y = 0; y < templ.height; ++y) {
    for (int x = 0; x < templ.width; ++x) {
      st += templ.at(x, y);
      sp += patch.at(x, y);
    }
  }
  const double mt = st / n;
  const double mp = sp / n;
  double num = 0, vt = 0, vp = 0;
  for (int y = 0; y < templ.height; ++y) {
    for (int x = 0; x < templ.width; ++x) {
      const double a = templ.at(x, y) - mt;
      const double b = patch.at(x, y) - mp;
      num += a * b;
      vt += a * a;
      vp += b * b;
    }
  }
  if (vt <= 0.0 || vp <= 0.0) return std::nullopt;
  return std::clamp(num / std::sqrt(vt * vp), -1.0, 1.0);
}

[[nodiscard]] inline std::optional<double> ncc(const Image& templ, const Image& patch) {
  return ncc(PatchView{&templ, 0, 0, templ.width(), templ.height()}, PatchView{&patch, 0, 0, patch.width(), patch.height()});
}

/// Translation-only template matcher. The template is the previous box
/// (snapped to whole pixels); every integer shift that keeps it inside the
/// previous box dilated by `search_factor` is scored, and the best NCC wins.
/// Ties go to the smallest shift. Box size never changes.
class NccTracker final : public Tracker {
 public:
  explicit NccTracker(double search_factor = 2.0) : search_factor_(search_factor) {
    if (!(search_factor >= 1.0)) throw ValidationError("NccTracker: search factor must be >= 1");
  }
  [[nodiscard]] std::string name() const override { return "ncc"; }

 protected:
  BBox predict(const TrackerState& state, const Image& next) override {
    const BBox& b = state.previous_box;
    const int tx = static_cast<int>(std::lround(b.x1()));
    const int ty = static_cast<int>(std::lround(b.y1()));
    const int tw = std::max(1, static_cast<int>(std::lround(b.width())));
    const int th = std::max(1, static_cast<int>(std::lround(b.height())));
    const PatchView templ{&state.previous_frame, tx, ty, tw, th};
    if (!ncc(templ, templ)) return b;  // flat template

    const BBox window = b.dilated(search_factor_);
    const int max_dx = std::max(0, static_cast<int>(std::floor((window.width() - tw) / 2.0)));
    const int max_dy = std::max(0, static_cast<int>(std::floor((window.height() - th) / 2.0)));

    double best = -std::numeric_limits<double>::infinity();
    int best_dx = 0, best_dy = 0;
    bool found = false;
    for (int dy = -max_dy; dy <= max_dy; ++dy) {
      for (int dx = -max_dx; dx <= max_dx; ++dx) {
        const auto score = ncc(templ, PatchView{&next, tx + dx, ty + dy, tw, th});
        if (!score) continue;
        const bool closer = std::abs(dx) + std::abs(dy) < std::abs(best_dx) + std::abs(best_dy);
        if (*score > best || (*score == best && closer)) {
          best = *score;
          best_dx = dx;
          best_dy = dy;
          found = true;
        }
      }
    }
    if (!found) return b;
    return b.translated(best_dx, best_dy);
  }

 private:
  double search_factor_;
};

}  // namespace solartrack::trackers
