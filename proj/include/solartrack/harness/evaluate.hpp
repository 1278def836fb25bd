#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/metrics.hpp"
#include "solartrack/regnet.hpp"
#include "solartrack/trackers.hpp"

namespace solartrack::harness {

/// One scored frame: which sequence, which frame, label, prediction.
struct DiagnosticRow {
  std::string sequence;
  int frame = 0;
  BBox gt;
  BBox pred;
  double iou = 0.0;
  friend bool operator==(const DiagnosticRow&, const DiagnosticRow&) = default;
};

struct Evaluation {
  metrics::MetricReport report;
  std::vector<metrics::FramePair> frames;
  std::vector<DiagnosticRow> rows;
  long guard_events = 0;
};

using TrackerFactory = std::function<std::unique_ptr<trackers::Tracker>()>;

/// Runs a fresh tracker over every sequence: initialized from the first
/// annotated frame, stepped through every frame after it, scored on each
/// later annotated frame. The initialization frame is not scored. Frames
/// from all sequences are pooled into one report.
[[nodiscard]] inline Evaluation evaluate_tracker(const TrackerFactory& make, std::span<const dataset::Sequence> corpus,
                                                 double threshold = metrics::kDefaultThreshold) {
  Evaluation ev;
  for (const auto& seq : corpus) {
    const auto ann = seq.annotated_frames();
    if (ann.size() < 2) continue;
    auto tracker = make();
    tracker->init(seq.frames[static_cast<std::size_t>(ann.front())], seq.annotations.at(ann.front()).box());
    for (int f = ann.front() + 1; f <= ann.back(); ++f) {
      const BBox pred = tracker->step(seq.frames[static_cast<std::size_t>(f)]);
      const auto it = seq.annotations.find(f);
      if (it == seq.annotations.end()) continue;
      const BBox gt = it->second.box();
      ev.frames.push_back({f, gt, pred});
      ev.rows.push_back({seq.meta.event_id, f, gt, pred, metrics::iou(gt, pred)});
    }
    if (const auto* rn = dynamic_cast<const regnet::RegNetTracker*>(tracker.get())) ev.guard_events += rn->guard_count();
  }
  ev.report = metrics::aggregate(ev.frames, threshold);
  return ev;
}

[[nodiscard]] inline TrackerFactory regnet_factory(const regnet::RegNetParams& params) {
  return [&params] { return std::make_unique<regnet::RegNetTracker>(params); };
}

[[nodiscard]] inline TrackerFactory static_factory() {
  return [] { return std::make_unique<trackers::StaticTracker>(); };
}

/// Evaluates a checkpoint; its stored architecture must match `expected`.
[[nodiscard]] inline Evaluation evaluate_checkpoint(const regnet::Checkpoint& ckpt, const regnet::RegNetConfig& expected,
                                                    std::span<const dataset::Sequence> corpus,
                                                    double threshold = metrics::kDefaultThreshold) {
  if (!(ckpt.params.config() == expected)) {
    throw ValidationError("checkpoint at iteration " + std::to_string(ckpt.iteration) +
                          " does not match the experiment architecture");
  }
  return evaluate_tracker(regnet_factory(ckpt.params), corpus, threshold);
}

struct SweepRow {
  long iteration = 0;
  metrics::MetricReport report;
  long guard_events = 0;
};

using CheckpointLoader = std::function<regnet::Checkpoint(std::size_t)>;

/// Evaluates `count` checkpoints. Workers pull indices from a shared
/// counter; results land in index order, so output does not depend on the
/// worker count. The first failure is rethrown after all workers stop.
[[nodiscard]] inline std::vector<SweepRow> sweep(std::size_t count, const CheckpointLoader& load,
                                                 const regnet::RegNetConfig& expected,
                                                 std::span<const dataset::Sequence> corpus,
                                                 double threshold = metrics::kDefaultThreshold, unsigned workers = 0) {
  std::vector<SweepRow> rows(count);
  if (count == 0) return rows;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count && !failed; i = next++) {
      try {
        const regnet::Checkpoint c = load(i);
        const Evaluation ev = evaluate_checkpoint(c, expected, corpus, threshold);
        rows[i] = {c.iteration, ev.report, ev.guard_events};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return rows;
}

[[nodiscard]] inline std::vector<SweepRow> sweep(std::span<const regnet::Checkpoint> checkpoints,
                                                 const regnet::RegNetConfig& expected,
                                                 std::span<const dataset::Sequence> corpus,
                                                 double threshold = metrics::kDefaultThreshold, unsigned workers = 0) {
  return sweep(
      checkpoints.size(), [&](std::size_t i) { return checkpoints[i]; }, expected, corpus, threshold, workers);
}

}  // namespace solartrack::harness
