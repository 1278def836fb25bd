#pragma once

// Experiment description as a key=value text document, e.g.
//
//   model = mSYN
//   train = synth:200:11
//   test = synth:50:12
//   iterations = 5000
//   checkpoint_every = 500
//
// Corpus selectors:
//   synth:<count>:<seed>[:bright|dark|mixed]   generated in memory
//   dir:<path>[:AR|CH]                         event directories on disk

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/regnet/config.hpp"
#include "solartrack/regnet/train.hpp"
#include "solartrack/synthgen.hpp"

namespace solartrack::harness {

enum class Preset { paper, desk };

[[nodiscard]] inline Preset parse_preset(std::string_view s) {
  if (s == "paper") return Preset::paper;
  if (s == "desk") return Preset::desk;
  throw ValidationError("unknown preset '" + std::string(s) + "'");
}

inline const std::set<std::string>& model_names() {
  static const std::set<std::string> names{"mAR", "mCH", "mAR-CH", "mSYN"};
  return names;
}

struct ExperimentSpec {
  std::string model_name = "mSYN";
  std::string train_selector;
  std::string test_selector;
  regnet::RegNetConfig net;
  regnet::TrainConfig train = regnet::TrainConfig::desk();
  double threshold = 0.5;
  dataset::LabelMode label_mode = dataset::LabelMode::hek_box;

  void validate() const {
    if (!model_names().contains(model_name)) throw ValidationError("unknown model name '" + model_name + "'");
    if (train_selector.empty()) throw ValidationError("spec: empty train selector");
    if (test_selector.empty()) throw ValidationError("spec: empty test selector");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ValidationError("spec: threshold outside (0, 1]");
    net.validate();
    train.validate();
  }
};

[[nodiscard]] inline regnet::TrainConfig preset_train_config(Preset p) {
  return p == Preset::paper ? regnet::TrainConfig::paper() : regnet::TrainConfig::desk();
}

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (auto part : dataset::detail::split(s, sep)) out.emplace_back(dataset::detail::trim(part));
  return out;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("expected a boolean, got '" + s + "'");
}

inline double number(const std::string& s, const char* key) {
  try {
    return dataset::detail::parse_double(s, 0, key);
  } catch (const ParseError&) {
    throw ValidationError(std::string("spec: '") + key + "' is not a number");
  }
}

inline long integer(const std::string& s, const char* key) {
  try {
    return static_cast<long>(dataset::detail::parse_int(s, 0, key));
  } catch (const ParseError&) {
    throw ValidationError(std::string("spec: '") + key + "' is not an integer");
  }
}

}  // namespace detail

/// `conv = 8x3x2,16x3x2` (out_channels x kernel x stride per layer).
[[nodiscard]] inline std::vector<regnet::ConvSpec> parse_conv_list(const std::string& s) {
  std::vector<regnet::ConvSpec> out;
  for (const auto& layer : detail::split(s, ',')) {
    const auto parts = detail::split(layer, 'x');
    if (parts.size() != 3) throw ValidationError("conv layer '" + layer + "' is not OUTxKERNELxSTRIDE");
    out.push_back({static_cast<int>(detail::integer(parts[0], "conv")), static_cast<int>(detail::integer(parts[1], "conv")),
                   static_cast<int>(detail::integer(parts[2], "conv"))});
  }
  return out;
}

[[nodiscard]] inline std::string format_conv_list(const std::vector<regnet::ConvSpec>& conv) {
  std::string out;
  for (const auto& c : conv) {
    if (!out.empty()) out += ",";
    out += std::to_string(c.out_channels) + "x" + std::to_string(c.kernel) + "x" + std::to_string(c.stride);
  }
  return out;
}

/// Preset values first, then every key in `text`. Unknown keys are rejected.
[[nodiscard]] inline ExperimentSpec parse_spec(std::string_view text, Preset preset = Preset::desk) {
  ExperimentSpec spec;
  spec.train = preset_train_config(preset);
  std::map<std::string, std::string> kv;
  try {
    kv = dataset::parse_key_values(text);
  } catch (const ParseError& e) {
    throw ValidationError(std::string("spec: ") + e.what());
  }
  for (const auto& [key, value] : kv) {
    const char* k = key.c_str();
    if (key == "model") spec.model_name = value;
    else if (key == "train") spec.train_selector = value;
    else if (key == "test") spec.test_selector = value;
    else if (key == "threshold") spec.threshold = detail::number(value, k);
    else if (key == "label_mode") spec.label_mode = dataset::parse_label_mode(value);
    else if (key == "crop_size") spec.net.crop_size = static_cast<int>(detail::integer(value, k));
    else if (key == "conv") spec.net.conv = parse_conv_list(value);
    else if (key == "fc") {
      spec.net.fc_widths.clear();
      for (const auto& w : detail::split(value, ',')) spec.net.fc_widths.push_back(static_cast<int>(detail::integer(w, k)));
    }
    else if (key == "output_scale") spec.net.output_scale = detail::number(value, k);
    else if (key == "context_factor") spec.net.context_factor = detail::number(value, k);
    else if (key == "share_branch_weights") spec.net.share_branch_weights = detail::parse_bool(value);
    else if (key == "iterations") spec.train.iterations = detail::integer(value, k);
    else if (key == "checkpoint_every") spec.train.checkpoint_every = detail::integer(value, k);
    else if (key == "learning_rate") spec.train.learning_rate = detail::number(value, k);
    else if (key == "momentum") spec.train.momentum = detail::number(value, k);
    else if (key == "batch_size") spec.train.batch_size = static_cast<int>(detail::integer(value, k));
    else if (key == "seed") spec.train.seed = static_cast<std::uint64_t>(detail::integer(value, k));
    else throw ValidationError("spec: unknown key '" + key + "'");
  }
  spec.validate();
  return spec;
}

/// Canonical text form; parse_spec(format_spec(s)) reproduces `s`.
[[nodiscard]] inline std::string format_spec(const ExperimentSpec& s) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("model", s.model_name);
  line("train", s.train_selector);
  line("test", s.test_selector);
  line("threshold", dataset::format_number(s.threshold));
  line("label_mode", dataset::to_string(s.label_mode));
  line("crop_size", std::to_string(s.net.crop_size));
  line("conv", format_conv_list(s.net.conv));
  std::string fc;
  for (int w : s.net.fc_widths) fc += (fc.empty() ? "" : ",") + std::to_string(w);
  line("fc", fc);
  line("output_scale", dataset::format_number(s.net.output_scale));
  line("context_factor", dataset::format_number(s.net.context_factor));
  line("share_branch_weights", s.net.share_branch_weights ? "true" : "false");
  line("iterations", std::to_string(s.train.iterations));
  line("checkpoint_every", std::to_string(s.train.checkpoint_every));
  line("learning_rate", dataset::format_number(s.train.learning_rate));
  line("momentum", dataset::format_number(s.train.momentum));
  line("batch_size", std::to_string(s.train.batch_size));
  line("seed", std::to_string(s.train.seed));
  return out;
}

/// Loads or generates the sequences a selector names.
[[nodiscard]] inline std::vector<dataset::Sequence> resolve_corpus(const std::string& selector,
                                                                   dataset::LabelMode mode = dataset::LabelMode::hek_box,
                                                                   const synth::SynthConfig& tmpl = {}) {
  const auto colon = selector.find(':');
  if (colon == std::string::npos) throw ValidationError("corpus selector '" + selector + "' has no scheme");
  const std::string scheme = selector.substr(0, colon);
  const std::string rest = selector.substr(colon + 1);
  if (scheme == "synth") {
    const auto parts = detail::split(rest, ':');
    if (parts.size() < 2 || parts.size() > 3) throw ValidationError("synth selector is synth:<count>:<seed>[:kind]");
    const long count = detail::integer(parts[0], "synth count");
    const long seed = detail::integer(parts[1], "synth seed");
    if (count < 1) throw ValidationError("synth selector resolves to no sequences");
    const std::string kind = parts.size() == 3 ? parts[2] : "bright";
    if (kind != "bright" && kind != "dark" && kind != "mixed") throw ValidationError("unknown synth kind '" + kind + "'");
    std::vector<dataset::Sequence> out;
    for (long i = 0; i < count; ++i) {
      synth::SynthConfig c = synth::corpus_config(tmpl, static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(i));
      if (kind == "dark" || (kind == "mixed" && i % 2 == 1)) c.event_kind = synth::EventKind::dark;
      if (kind == "bright" || (kind == "mixed" && i % 2 == 0)) c.event_kind = synth::EventKind::bright;
      auto seq = synth::generate(c);
      char id[32];
      std::snprintf(id, sizeof id, "syn_%05ld", i);
      seq.meta.event_id = id;
      out.push_back(std::move(seq));
    }
    return out;
  }
  if (scheme == "dir") {
    std::string path = rest;
    std::optional<dataset::EventType> only;
    const auto last = rest.rfind(':');
    if (last != std::string::npos && (rest.substr(last + 1) == "AR" || rest.substr(last + 1) == "CH")) {
      only = dataset::parse_event_type(rest.substr(last + 1));
      path = rest.substr(0, last);
    }
    auto out = dataset::load_corpus(path, mode, only);
    if (out.empty()) throw ValidationError("corpus selector '" + selector + "' resolves to no sequences");
    return out;
  }
  throw ValidationError("unknown corpus scheme '" + scheme + "'");
}

}  // namespace solartrack::harness
