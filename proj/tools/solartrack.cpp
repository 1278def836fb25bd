// Command-line front end.
//
// Exit status: 0 success, 1 invalid input, 2 runtime failure (transport,
// divergence, I/O).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef SOLARTRACK_LIVE_HTTP
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "solartrack/ingest/live.hpp"
#endif

#include "CLI11.hpp"
#include "solartrack/harness.hpp"
#include "solartrack/ingest.hpp"

namespace fs = std::filesystem;
using namespace solartrack;

namespace {

void log_line(const std::string& s) { std::cerr << s << "\n"; }

struct SpecArgs {
  std::string spec_file;
  std::string preset = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  unsigned workers = 0;

  void attach(CLI::App* cmd, bool needs_threshold) {
    cmd->add_option("--spec", spec_file, "Experiment spec (key=value file)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--preset", preset, "Training preset applied before the spec")->check(CLI::IsMember({"paper", "desk"}));
    cmd->add_option("--seed", seed, "Override the training seed");
    if (needs_threshold) {
      cmd->add_option("--threshold", threshold, "Override the overlap threshold");
      cmd->add_option("--workers", workers, "Concurrent checkpoint evaluations (0 = one per core)");
    }
  }

  [[nodiscard]] harness::ExperimentSpec load() const {
    auto spec = harness::parse_spec(dataset::detail::read_text(spec_file), harness::parse_preset(preset));
    if (seed) spec.train.seed = *seed;
    if (threshold) spec.threshold = *threshold;
    spec.validate();
    return spec;
  }
};

struct SourceArgs {
  std::string fixtures;
  std::string config;
  std::string start;
  std::string end;

  void attach(CLI::App* cmd) {
    auto* f = cmd->add_option("--fixtures", fixtures, "Answer all requests from a fixture directory");
    auto* c = cmd->add_option("--config", config, "Live endpoint config file");
    f->excludes(c);
    cmd->add_option("--start", start, "Start of the query window (ISO-8601)")->required();
    cmd->add_option("--end", end, "End of the query window (ISO-8601)")->required();
  }

  std::unique_ptr<ingest::Transport> transport(ingest::FetchPolicy& policy) const {
    if (!fixtures.empty()) {
      policy.fixture_dir = fixtures;
      return std::make_unique<ingest::FixtureTransport>(fixtures);
    }
    if (config.empty()) throw ValidationError("one of --fixtures or --config is required");
#ifdef SOLARTRACK_LIVE_HTTP
    return std::make_unique<ingest::LiveTransport>(ingest::parse_live_config(dataset::detail::read_text(config)));
#else
    throw ValidationError("this build has no live transport; use --fixtures");
#endif
  }

  [[nodiscard]] std::string source_id(dataset::EventType t) const {
#ifdef SOLARTRACK_LIVE_HTTP
    if (fixtures.empty()) return ingest::parse_live_config(dataset::detail::read_text(config)).source_id(t);
#endif
    (void)t;
    return "";
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solar event tracking toolkit"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write generated event directories");
  std::string synth_out, synth_kind = "bright";
  long synth_count = 50;
  std::uint64_t synth_seed = 1;
  synth::SynthConfig synth_tmpl;
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--count", synth_count, "Number of sequences")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth_seed, "Master seed");
  synth_cmd->add_option("--kind", synth_kind, "Event kind")->check(CLI::IsMember({"bright", "dark", "mixed"}));
  synth_cmd->add_option("--frames", synth_tmpl.n_frames, "Frames per sequence");
  synth_cmd->add_option("--image-size", synth_tmpl.image_size, "Frame side in pixels");
  synth_cmd->add_option("--disk-radius", synth_tmpl.disk_radius, "Solar disk radius in pixels");
  synth_cmd->add_option("--annotate-every", synth_tmpl.annotate_every, "Annotation spacing in frames");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Query HEK and write event records");
  SourceArgs ingest_src;
  std::string ingest_out, ingest_type = "AR";
  ingest_src.attach(ingest_cmd);
  ingest_cmd->add_option("--type", ingest_type, "Event type")->check(CLI::IsMember({"AR", "CH"}));
  ingest_cmd->add_option("--out", ingest_out, "Output directory")->required();

  // build-dataset
  auto* build_cmd = app.add_subcommand("build-dataset", "Build event directories from HEK and Helioviewer");
  SourceArgs build_src;
  std::string build_out;
  std::vector<std::string> build_types{"AR", "CH"};
  build_src.attach(build_cmd);
  build_cmd->add_option("--types", build_types, "Event types")->delimiter(',')->check(CLI::IsMember({"AR", "CH"}));
  build_cmd->add_option("--out", build_out, "Output directory")->required();

  // train / eval / run
  auto* train_cmd = app.add_subcommand("train", "Train and write checkpoints");
  SpecArgs train_args;
  std::string train_out;
  train_args.attach(train_cmd, false);
  train_cmd->add_option("--out", train_out, "Experiment directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Sweep the checkpoints of an experiment directory");
  SpecArgs eval_args;
  std::string eval_out;
  eval_args.attach(eval_cmd, true);
  eval_cmd->add_option("--out", eval_out, "Experiment directory")->required()->check(CLI::ExistingDirectory);

  auto* run_cmd = app.add_subcommand("run", "Train, sweep and report in one go");
  SpecArgs run_args;
  std::string run_out;
  run_args.attach(run_cmd, true);
  run_cmd->add_option("--out", run_out, "Experiment directory")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "Tabulate final reports of experiment directories");
  std::vector<std::string> report_dirs;
  std::string report_file;
  report_cmd->add_option("dirs", report_dirs, "Experiment directories")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_option("--out", report_file, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) {
      const std::string selector = "synth:" + std::to_string(synth_count) + ":" + std::to_string(synth_seed) + ":" + synth_kind;
      const auto corpus = harness::resolve_corpus(selector, dataset::LabelMode::hek_box, synth_tmpl);
      for (const auto& seq : corpus) dataset::save_sequence(fs::path(synth_out) / seq.meta.event_id, seq);
      log_line("wrote " + std::to_string(corpus.size()) + " sequences to " + synth_out);
    } else if (*ingest_cmd) {
      ingest::FetchPolicy policy;
      auto transport = ingest_src.transport(policy);
      ingest::Client client(*transport, policy);
      ingest::HekQuery q;
      q.event_type = dataset::parse_event_type(ingest_type);
      q.start = parse_timestamp(ingest_src.start);
      q.end = parse_timestamp(ingest_src.end);
      const auto records = client.query_events(q);
      dataset::write_records(ingest_out, records);
      log_line("wrote " + std::to_string(records.size()) + " records to " + ingest_out);
    } else if (*build_cmd) {
      ingest::FetchPolicy policy;
      auto transport = build_src.transport(policy);
      ingest::Client client(*transport, policy);
      ingest::BuildOptions opt;
      opt.event_types.clear();
      for (const auto& t : build_types) {
        const auto type = dataset::parse_event_type(t);
        opt.event_types.push_back(type);
        if (const auto id = build_src.source_id(type); !id.empty()) opt.image_source[type] = id;
      }
      opt.start = parse_timestamp(build_src.start);
      opt.end = parse_timestamp(build_src.end);
      opt.out = build_out;
      const auto rep = ingest::build_dataset(client, opt);
      std::cout << rep.summary();
    } else if (*train_cmd) {
      const auto spec = train_args.load();
      const auto corpus = harness::resolve_corpus(spec.train_selector, spec.label_mode);
      const auto written = harness::train_to_directory(spec, corpus, train_out, log_line);
      log_line("wrote " + std::to_string(written.size()) + " checkpoints");
    } else if (*eval_cmd) {
      const auto spec = eval_args.load();
      const auto corpus = harness::resolve_corpus(spec.test_selector, spec.label_mode);
      const auto art = harness::evaluate_directory(spec, corpus, eval_out, eval_args.workers, log_line);
      std::cout << dataset::detail::read_text(fs::path(eval_out) / "table.txt");
      (void)art;
    } else if (*run_cmd) {
      const auto spec = run_args.load();
      harness::RunOptions opt;
      opt.workers = run_args.workers;
      opt.log = log_line;
      (void)harness::run_experiment(spec, run_out, opt);
      std::cout << dataset::detail::read_text(fs::path(run_out) / "table.txt");
    } else if (*report_cmd) {
      std::vector<std::pair<std::string, metrics::MetricReport>> rows;
      for (const auto& d : report_dirs) rows.push_back(harness::parse_report_kv(dataset::detail::read_text(fs::path(d) / "report.kv")));
      const std::string table = harness::report_table(rows);
      std::cout << table;
      if (!report_file.empty()) dataset::detail::write_text(report_file, table);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DivergedError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
