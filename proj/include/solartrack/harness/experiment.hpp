#pragma once

// Output directory layout of an experiment:
//
//   spec.txt                   the resolved spec
//   loss.csv                   mean training loss per block of iterations
//   checkpoints/ckpt_NNNNNNN.rgnt
//   sweep.csv                  one row per checkpoint
//   charts/<metric>.svg        one chart per metric
//   diagnostics.csv            per-frame rows of the final checkpoint
//   table.txt                  final checkpoint and static baseline
//   report.kv                  final checkpoint report

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/harness/evaluate.hpp"
#include "solartrack/harness/report.hpp"
#include "solartrack/harness/spec.hpp"
#include "solartrack/regnet.hpp"

namespace solartrack::harness {

using Logger = std::function<void(const std::string&)>;

[[nodiscard]] inline std::string checkpoint_file_name(long iteration) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ckpt_%07ld.rgnt", iteration);
  return buf;
}

/// Checkpoint files in `dir`, in iteration order.
[[nodiscard]] inline std::vector<std::filesystem::path> list_checkpoints(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("ckpt_") && e.path().extension() == ".rgnt") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Trains on `corpus` and writes checkpoints plus loss.csv into `out`.
/// Any previous checkpoints directory is replaced. On divergence, the
/// checkpoints already written stay on disk and the error propagates.
inline std::vector<std::filesystem::path> train_to_directory(const ExperimentSpec& spec,
                                                             std::span<const dataset::Sequence> corpus,
                                                             const std::filesystem::path& out, const Logger& log = {}) {
  namespace fs = std::filesystem;
  const fs::path ckdir = out / "checkpoints";
  fs::remove_all(ckdir);
  fs::create_directories(ckdir);
  dataset::detail::write_text(out / "spec.txt", format_spec(spec));

  const long block = std::max(1L, spec.train.checkpoint_every / 10);
  std::string loss_csv = "iteration,loss\n";
  double loss_sum = 0.0;
  long loss_n = 0;
  std::vector<fs::path> written;
  auto flush_loss = [&] { dataset::detail::write_text(out / "loss.csv", loss_csv); };
  try {
    regnet::train(
        corpus, spec.net, spec.train,
        [&](const regnet::Checkpoint& c) {
          const fs::path p = ckdir / checkpoint_file_name(c.iteration);
          regnet::save_checkpoint(p, c);
          written.push_back(p);
          if (log) log("checkpoint " + std::to_string(c.iteration));
        },
        {},
        [&](long it, double loss) {
          loss_sum += loss;
          ++loss_n;
          if (it % block == 0 || it == spec.train.iterations) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%ld,%.9g\n", it, loss_sum / static_cast<double>(loss_n));
            loss_csv += buf;
            loss_sum = 0.0;
            loss_n = 0;
          }
        });
  } catch (...) {
    flush_loss();
    throw;
  }
  flush_loss();
  return written;
}

struct EvaluationArtifacts {
  std::vector<SweepRow> sweep;
  metrics::MetricReport final_report;
  metrics::MetricReport static_report;
  long final_iteration = 0;
};

/// Sweeps the checkpoints in `out/checkpoints` over `corpus` and writes the
/// evaluation artifacts next to them.
inline EvaluationArtifacts evaluate_directory(const ExperimentSpec& spec, std::span<const dataset::Sequence> corpus,
                                              const std::filesystem::path& out, unsigned workers = 0,
                                              const Logger& log = {}) {
  namespace fs = std::filesystem;
  const auto paths = list_checkpoints(out / "checkpoints");
  if (paths.empty()) throw ValidationError("no checkpoints under " + (out / "checkpoints").string());
  EvaluationArtifacts art;
  art.sweep = sweep(
      paths.size(), [&](std::size_t i) { return regnet::load_checkpoint(paths[i]); }, spec.net, corpus, spec.threshold,
      workers);
  dataset::detail::write_text(out / "sweep.csv", sweep_csv(art.sweep));
  fs::create_directories(out / "charts");
  for (const auto& c : kColumns) dataset::detail::write_text(out / "charts" / (std::string(c.key) + ".svg"), svg_chart(art.sweep, c));
  if (log) log("swept " + std::to_string(art.sweep.size()) + " checkpoints");

  const regnet::Checkpoint final_ckpt = regnet::load_checkpoint(paths.back());
  const Evaluation final_ev = evaluate_checkpoint(final_ckpt, spec.net, corpus, spec.threshold);
  const Evaluation static_ev = evaluate_tracker(static_factory(), corpus, spec.threshold);
  art.final_report = final_ev.report;
  art.static_report = static_ev.report;
  art.final_iteration = final_ckpt.iteration;
  dataset::detail::write_text(out / "diagnostics.csv", diagnostics_csv(final_ev.rows));
  const std::vector<std::pair<std::string, metrics::MetricReport>> rows{{spec.model_name, art.final_report},
                                                                        {"static", art.static_report}};
  dataset::detail::write_text(out / "table.txt", report_table(rows));
  dataset::detail::write_text(out / "report.kv", format_report_kv(spec.model_name, art.final_report));
  return art;
}

struct RunOptions {
  unsigned workers = 0;
  Logger log;
  synth::SynthConfig synth_template;
};

/// Full protocol: resolve both corpora (failing before any training),
/// train, sweep, report. A diverged run still evaluates whatever
/// checkpoints it produced before rethrowing.
inline EvaluationArtifacts run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out,
                                          const RunOptions& opt = {}) {
  spec.validate();
  const auto test = resolve_corpus(spec.test_selector, spec.label_mode, opt.synth_template);
  const auto train_set = resolve_corpus(spec.train_selector, spec.label_mode, opt.synth_template);
  std::filesystem::create_directories(out);
  if (opt.log) opt.log("train " + std::to_string(train_set.size()) + " sequences, test " + std::to_string(test.size()));
  try {
    (void)train_to_directory(spec, train_set, out, opt.log);
  } catch (const DivergedError&) {
    if (!list_checkpoints(out / "checkpoints").empty()) (void)evaluate_directory(spec, test, out, opt.workers, opt.log);
    throw;
  }
  return evaluate_directory(spec, test, out, opt.workers, opt.log);
}

}  // namespace solartrack::harness
