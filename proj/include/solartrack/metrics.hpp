#pragma once

// Per-frame overlap scores and their sequence aggregates for single-object
// tracking: IoU, IoGT, ATB, area-based F1, threshold F-score and OTA.
//
// Counting rule for one object per frame: an annotated frame with a
// prediction is either a match (tp = 1) or a miss (fp = 1 and fn = 1); an
// annotated frame without a prediction counts fn = 1 only. Frames without
// ground truth are ignored everywhere.

#include <optional>
#include <span>
#include <vector>

#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"

namespace solartrack::metrics {

inline constexpr double kDefaultThreshold = 0.5;

enum class Overlap { iou, iogt };

struct FramePair {
  int frame_index = 0;
  std::optional<BBox> gt;
  std::optional<BBox> pred;
};

struct MatchCounts {
  long n_tp = 0;
  long n_fp = 0;
  long n_fn = 0;
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double fscore = 0.0;
};

struct MetricReport {
  double iou_mean = 0.0;
  double fscore_iou = 0.0;
  double af1 = 0.0;
  double ota = 0.0;
  double iogt_mean = 0.0;
  double fscore_iogt = 0.0;
  double atb_mean = 0.0;
  long frames_evaluated = 0;
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

[[nodiscard]] inline double iou(const BBox& gt, const BBox& pred) {
  const double u = union_area(gt, pred);
  if (u <= 0.0) throw ValidationError("iou: degenerate pair");
  return intersection_area(gt, pred) / u;
}

[[nodiscard]] inline double iogt(const BBox& gt, const BBox& pred) {
  if (gt.area() <= 0.0) throw ValidationError("iogt: degenerate ground truth");
  return intersection_area(gt, pred) / gt.area();
}

[[nodiscard]] inline double atb(const BBox& gt, const BBox& pred) {
  if (gt.area() <= 0.0) throw ValidationError("atb: degenerate ground truth");
  return pred.area() / gt.area();
}

[[nodiscard]] inline double overlap(Overlap kind, const BBox& gt, const BBox& pred) {
  return kind == Overlap::iou ? iou(gt, pred) : iogt(gt, pred);
}

[[nodiscard]] inline bool is_match(const BBox& gt, const BBox& pred, double threshold = kDefaultThreshold,
                                   Overlap kind = Overlap::iou) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("is_match: threshold outside (0, 1]");
  return overlap(kind, gt, pred) >= threshold;
}

/// Area precision |gt ∩ pred| / |pred|, area recall |gt ∩ pred| / |gt|, and
/// their harmonic mean; all zero when the boxes do not overlap.
[[nodiscard]] inline PrecisionRecall area_f1(const BBox& gt, const BBox& pred) {
  if (gt.area() <= 0.0) throw ValidationError("area_f1: degenerate ground truth");
  const double shared = intersection_area(gt, pred);
  if (shared <= 0.0) return {};
  const double p = shared / pred.area();
  const double r = shared / gt.area();
  return {p, r, 2.0 * p * r / (p + r)};
}

namespace detail {
inline long annotated_count(std::span<const FramePair> frames) {
  long n = 0;
  for (const auto& f : frames) n += f.gt.has_value() ? 1 : 0;
  return n;
}
inline void require_annotated(std::span<const FramePair> frames, const char* who) {
  if (annotated_count(frames) == 0) throw ValidationError(std::string(who) + ": nothing to evaluate");
}
inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace detail

[[nodiscard]] inline MatchCounts count_matches(std::span<const FramePair> frames,
                                               double threshold = kDefaultThreshold,
                                               Overlap kind = Overlap::iou) {
  MatchCounts c;
  for (const auto& f : frames) {
    if (!f.gt) continue;
    if (!f.pred) {
      ++c.n_fn;
    } else if (is_match(*f.gt, *f.pred, threshold, kind)) {
      ++c.n_tp;
    } else {
      ++c.n_fp;
      ++c.n_fn;
    }
  }
  return c;
}

[[nodiscard]] inline PrecisionRecall fscore(std::span<const FramePair> frames, double threshold = kDefaultThreshold,
                                            Overlap kind = Overlap::iou) {
  detail::require_annotated(frames, "fscore");
  const MatchCounts c = count_matches(frames, threshold, kind);
  const double tp = static_cast<double>(c.n_tp);
  const double p = detail::safe_ratio(tp, tp + static_cast<double>(c.n_fp));
  const double r = detail::safe_ratio(tp, tp + static_cast<double>(c.n_fn));
  return {p, r, detail::safe_ratio(2.0 * p * r, p + r)};
}

[[nodiscard]] inline double af1(std::span<const FramePair> frames) {
  detail::require_annotated(frames, "af1");
  double sum = 0.0;
  long n = 0;
  for (const auto& f : frames) {
    if (!f.gt) continue;
    ++n;
    if (f.pred) sum += area_f1(*f.gt, *f.pred).fscore;
  }
  return sum / static_cast<double>(n);
}

[[nodiscard]] inline double ota(std::span<const FramePair> frames, double threshold = kDefaultThreshold,
                                Overlap kind = Overlap::iou) {
  detail::require_annotated(frames, "ota");
  const MatchCounts c = count_matches(frames, threshold, kind);
  return 1.0 - static_cast<double>(c.n_fn + c.n_fp) / static_cast<double>(detail::annotated_count(frames));
}

/// All seven report columns over the annotated frames. Means are unweighted
/// per-frame means; a missing prediction contributes zero to every mean.
[[nodiscard]] inline MetricReport aggregate(std::span<const FramePair> frames, double threshold = kDefaultThreshold) {
  detail::require_annotated(frames, "aggregate");
  MetricReport r;
  double iou_sum = 0.0, iogt_sum = 0.0, atb_sum = 0.0;
  for (const auto& f : frames) {
    if (!f.gt) continue;
    ++r.frames_evaluated;
    if (!f.pred) continue;
    iou_sum += iou(*f.gt, *f.pred);
    iogt_sum += iogt(*f.gt, *f.pred);
    atb_sum += atb(*f.gt, *f.pred);
  }
  const double n = static_cast<double>(r.frames_evaluated);
  r.iou_mean = iou_sum / n;
  r.iogt_mean = iogt_sum / n;
  r.atb_mean = atb_sum / n;
  r.af1 = af1(frames);
  r.fscore_iou = fscore(frames, threshold, Overlap::iou).fscore;
  r.fscore_iogt = fscore(frames, threshold, Overlap::iogt).fscore;
  r.ota = ota(frames, threshold);
  return r;
}

}  // namespace solartrack::metrics
