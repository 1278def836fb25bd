#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/regnet/crop.hpp"
#include "solartrack/regnet/network.hpp"
#include "solartrack/rng.hpp"

namespace solartrack::regnet {

struct TrainConfig {
  long iterations = 200000;
  long checkpoint_every = 2000;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  int batch_size = 1;
  std::uint64_t seed = 1;

  static TrainConfig paper() { return {}; }
  static TrainConfig desk() {
    TrainConfig t;
    t.iterations = 5000;
    t.checkpoint_every = 500;
    return t;
  }

  void validate() const {
    if (iterations < 1) throw ValidationError("TrainConfig: iterations must be >= 1");
    if (checkpoint_every < 1 || checkpoint_every > iterations) {
      throw ValidationError("TrainConfig: checkpoint_every must be in [1, iterations]");
    }
    if (!(learning_rate > 0.0)) throw ValidationError("TrainConfig: learning_rate must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw ValidationError("TrainConfig: momentum must be in [0, 1)");
    if (batch_size < 1) throw ValidationError("TrainConfig: batch_size must be >= 1");
  }
};

/// Iterations at which checkpoints are taken: every `checkpoint_every`
/// iterations, plus the final iteration when it is not a multiple.
[[nodiscard]] inline std::vector<long> checkpoint_schedule(const TrainConfig& t) {
  t.validate();
  std::vector<long> out;
  for (long i = t.checkpoint_every; i <= t.iterations; i += t.checkpoint_every) out.push_back(i);
  if (out.empty() || out.back() != t.iterations) out.push_back(t.iterations);
  return out;
}

/// v <- momentum * v - lr * grad; params <- params + v.
inline void sgd_step(std::span<double> params, std::span<const double> grad, std::span<double> velocity, double lr,
                     double momentum) {
  if (params.size() != grad.size() || params.size() != velocity.size()) throw ValidationError("sgd_step: shape mismatch");
  for (double g : grad) {
    if (!std::isfinite(g)) throw DivergedError("sgd_step: non-finite gradient");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity[i] = momentum * velocity[i] - lr * grad[i];
    params[i] += velocity[i];
  }
}

struct Checkpoint {
  long iteration = 0;
  RegNetParams params;
};

using CheckpointSink = std::function<void(const Checkpoint&)>;

struct TrainingPair {
  std::size_t sequence;
  int previous;
  int current;
};

/// Consecutive annotated frame pairs of every sequence.
[[nodiscard]] inline std::vector<std::vector<TrainingPair>> training_pairs(std::span<const dataset::Sequence> corpus) {
  std::vector<std::vector<TrainingPair>> out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto idx = corpus[s].annotated_frames();
    std::vector<TrainingPair> pairs;
    for (std::size_t i = 1; i < idx.size(); ++i) pairs.push_back({s, idx[i - 1], idx[i]});
    if (!pairs.empty()) out.push_back(std::move(pairs));
  }
  return out;
}

/// Seeds derived from the training seed for each independent random stream.
enum class TrainStream : std::uint64_t { init = 0, pairs = 1, sampler = 2 };

/// SGD with momentum on Laplace-augmented annotated pairs. Each iteration
/// draws a sequence, then one of its consecutive annotated pairs. Emits a
/// checkpoint per `checkpoint_schedule`. Deterministic for a given seed.
inline void train(std::span<const dataset::Sequence> corpus, const RegNetConfig& cfg, const TrainConfig& tcfg,
                  const CheckpointSink& sink, CropSampler sampler_template = {},
                  const std::function<void(long, double)>& on_loss = {}) {
  cfg.validate();
  tcfg.validate();
  sampler_template.validate();
  const auto pairs = training_pairs(corpus);
  if (pairs.empty()) throw ValidationError("train: corpus has no sequence with two annotated frames");

  RegNetParams params = RegNetParams::initialized(cfg, derive_seed(tcfg.seed, static_cast<std::uint64_t>(TrainStream::init)));
  std::vector<double> velocity(params.size(), 0.0);
  std::vector<double> grad(params.size(), 0.0);
  Rng pick(derive_seed(tcfg.seed, static_cast<std::uint64_t>(TrainStream::pairs)));
  CropSampler sampler = sampler_template;
  sampler.rng = Rng(derive_seed(tcfg.seed, static_cast<std::uint64_t>(TrainStream::sampler)));

  const auto schedule = checkpoint_schedule(tcfg);
  std::size_t next_ckpt = 0;
  for (long it = 1; it <= tcfg.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_loss = 0.0;
    for (int b = 0; b < tcfg.batch_size; ++b) {
      const auto& seq_pairs = pairs[pick.below(pairs.size())];
      const TrainingPair& tp = seq_pairs[pick.below(seq_pairs.size())];
      const auto& seq = corpus[tp.sequence];
      const BBox prev_box = seq.annotations.at(tp.previous).box();
      const BBox curr_box = seq.annotations.at(tp.current).box();
      const CropPair cp = crop_pair(seq.frames[static_cast<std::size_t>(tp.previous)], prev_box,
                                    seq.frames[static_cast<std::size_t>(tp.current)], curr_box, &sampler, cfg);
      const Gradient g = backward(params, cp.target, cp.search, *cp.regression);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g.values[i];
      batch_loss += g.loss;
    }
    if (tcfg.batch_size > 1) {
      const double inv = 1.0 / tcfg.batch_size;
      for (double& g : grad) g *= inv;
    }
    sgd_step(params.values(), grad, velocity, tcfg.learning_rate, tcfg.momentum);
    if (on_loss) on_loss(it, batch_loss / tcfg.batch_size);
    if (next_ckpt < schedule.size() && schedule[next_ckpt] == it) {
      sink(Checkpoint{it, params});
      ++next_ckpt;
    }
  }
}

[[nodiscard]] inline std::vector<Checkpoint> train(std::span<const dataset::Sequence> corpus, const RegNetConfig& cfg,
                                                   const TrainConfig& tcfg) {
  std::vector<Checkpoint> out;
  train(corpus, cfg, tcfg, [&](const Checkpoint& c) { out.push_back(c); });
  return out;
}

}  // namespace solartrack::regnet
