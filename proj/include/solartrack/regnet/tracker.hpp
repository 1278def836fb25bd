#pragma once

#include <string>

#include "solartrack/regnet/crop.hpp"
#include "solartrack/regnet/network.hpp"
#include "solartrack/trackers.hpp"

namespace solartrack::regnet {

inline constexpr double kMinBoxSide = 2.0;

/// Regression-network tracker. Each step crops the previous frame around
/// the previous prediction and the new frame around the same location, then
/// maps the network output back to frame pixels. Only the initial box is
/// ever taken from labels.
class RegNetTracker final : public trackers::Tracker {
 public:
  explicit RegNetTracker(RegNetParams params) : params_(std::move(params)) {}

  [[nodiscard]] std::string name() const override { return "regnet"; }
  /// Number of steps where the prediction collapsed below the minimum size.
  [[nodiscard]] long guard_count() const noexcept { return guard_count_; }

 protected:
  void on_init(const trackers::TrackerState&) override { guard_count_ = 0; }

  BBox predict(const trackers::TrackerState& state, const Image& next) override {
    const auto& cfg = params_.config();
    const CropPair cp = crop_pair(state.previous_frame, state.previous_box, next, std::nullopt, nullptr, cfg);
    BBox box = to_frame(forward(params_, cp.target, cp.search), cp.search_window, cfg.output_scale);
    if (box.width() < kMinBoxSide || box.height() < kMinBoxSide) {
      ++guard_count_;
      const Point c = box.center();
      box = BBox::from_center(c.x, c.y, std::max(box.width(), kMinBoxSide), std::max(box.height(), kMinBoxSide));
    }
    return box;
  }

 private:
  RegNetParams params_;
  long guard_count_ = 0;
};

}  // namespace solartrack::regnet
