#pragma once

// Dataset construction from HEK reports and Helioviewer images:
//
//   query -> limb filter (per record) -> group by id, drop short tracks
//         -> split by year -> per track: sample times, fetch and screen
//            frames, label every record's frame -> event directories
//
// Output: <out>/train/<event>/ and <out>/test/<event>/ in the sequence
// layout (frames, annotations.csv, optional annotations_chain.csv,
// meta.txt) plus the event's records (events.csv and chain sidecars), and
// <out>/build_report.txt with the per-filter counts.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/ingest/client.hpp"
#include "solartrack/solarcoord.hpp"

namespace solartrack::ingest {

struct BuildOptions {
  std::vector<dataset::EventType> event_types{dataset::EventType::AR, dataset::EventType::CH};
  Timestamp start{};
  Timestamp end{};
  std::filesystem::path out;
  std::map<dataset::EventType, std::string> image_source;  // Helioviewer source id per type; empty in fixture mode
};

struct BuildReport {
  long records_fetched = 0;
  long records_without_header = 0;
  long records_off_limb = 0;
  long events_off_limb = 0;   // every record of the id was off the limb
  long events_seen = 0;       // distinct ids among records that passed the limb filter
  long events_too_short = 0;  // fewer than three records
  long events_out_of_range = 0;
  long events_black = 0;
  long events_missing = 0;
  long events_unlabeled = 0;
  long chain_labels_unavailable = 0;
  std::vector<std::string> train_events;
  std::vector<std::string> test_events;

  [[nodiscard]] std::string summary() const {
    std::string s;
    auto line = [&](const char* k, long v) { s += std::string(k) + "=" + std::to_string(v) + "\n"; };
    line("records_fetched", records_fetched);
    line("records_without_header", records_without_header);
    line("records_off_limb", records_off_limb);
    line("events_off_limb", events_off_limb);
    line("events_seen", events_seen);
    line("events_too_short", events_too_short);
    line("events_out_of_range", events_out_of_range);
    line("events_black", events_black);
    line("events_missing", events_missing);
    line("events_unlabeled", events_unlabeled);
    line("chain_labels_unavailable", chain_labels_unavailable);
    line("train_events", static_cast<long>(train_events.size()));
    line("test_events", static_cast<long>(test_events.size()));
    return s;
  }
};

namespace detail {

/// True when the rounded corners written to the annotation file still
/// describe a box with positive area.
inline bool writable(const BBox& b) {
  return dataset::round_half_up(b.x1()) < dataset::round_half_up(b.x2()) &&
         dataset::round_half_up(b.y1()) < dataset::round_half_up(b.y2());
}

enum class Outcome { written, black, missing, unlabeled };

struct TrackResult {
  Outcome outcome = Outcome::missing;
  bool chain_written = false;
};

inline TrackResult build_track(Client& client, const dataset::EventTrack& track, const std::string& source_id,
                               const std::filesystem::path& dir) {
  const dataset::Timeline tl = dataset::assemble_timeline(track);
  dataset::Sequence seq;
  std::vector<solarcoord::ImageHeader> headers;
  for (Timestamp t : tl.times) {
    FetchedImage f = client.fetch_image(t, source_id);
    if (f.screen == dataset::ScreenResult::black) return {Outcome::black};
    if (f.screen != dataset::ScreenResult::ok) return {Outcome::missing};
    if (!seq.frames.empty() && (f.image->width() != seq.frames.front().width() ||
                                f.image->height() != seq.frames.front().height())) {
      return {Outcome::missing};
    }
    seq.frames.push_back(std::move(*f.image));
    headers.push_back(*f.header);
  }
  seq.meta.event_id = track.event_id;
  seq.meta.event_type = track.event_type();
  seq.meta.header = headers.front();

  std::map<int, dataset::Annotation> chain;
  bool chain_ok = true;
  for (std::size_t k = 0; k < track.records.size(); ++k) {
    const int frame = static_cast<int>(tl.record_frame[k]);
    const auto& h = headers[static_cast<std::size_t>(frame)];
    const BBox box = dataset::label_box(track.records[k], dataset::LabelMode::hek_box, h).clamped(h.width, h.height);
    if (box.empty() || !writable(box)) return {Outcome::unlabeled};
    seq.annotations.emplace(frame, dataset::Annotation::from_box(frame, box));
    if (!chain_ok) continue;
    try {
      const BBox inner = dataset::label_box(track.records[k], dataset::LabelMode::chain_inscribed, h);
      if (!writable(inner)) throw ValidationError("inscribed box too small");
      chain.emplace(frame, dataset::Annotation::from_box(frame, inner));
    } catch (const ValidationError&) {
      chain_ok = false;
    }
  }
  if (seq.annotations.size() < 2) return {Outcome::unlabeled};

  dataset::save_sequence(dir, seq);
  dataset::write_records(dir, track.records);
  chain_ok = chain_ok && chain.size() == seq.annotations.size();
  if (chain_ok) dataset::write_annotation_file(dir / dataset::kChainAnnotationFile, chain);
  return {Outcome::written, chain_ok};
}

}  // namespace detail

inline BuildReport build_dataset(Client& client, const BuildOptions& opt) {
  if (!(opt.start < opt.end)) throw ValidationError("build_dataset: empty time range");
  if (opt.out.empty()) throw ValidationError("build_dataset: no output directory");
  BuildReport rep;
  for (const auto type : opt.event_types) {
    const auto src_it = opt.image_source.find(type);
    const std::string source_id = src_it == opt.image_source.end() ? "" : src_it->second;

    HekQuery q;
    q.event_type = type;
    q.start = opt.start;
    q.end = opt.end;
    const auto records = client.query_events(q);
    rep.records_fetched += static_cast<long>(records.size());

    std::vector<dataset::EventRecord> kept;
    std::set<std::string> off_limb_ids;
    for (const auto& r : records) {
      if (r.event_type != type) continue;
      const auto h = client.fetch_header(r.start_time, source_id);
      if (!h) {
        ++rep.records_without_header;
      } else if (!solarcoord::box_within_limb(r.hpc_box, h->rsun)) {
        ++rep.records_off_limb;
        off_limb_ids.insert(r.event_id);
      } else {
        kept.push_back(r);
      }
    }
    std::set<std::string> ids;
    for (const auto& r : kept) ids.insert(r.event_id);
    for (const auto& id : off_limb_ids) rep.events_off_limb += ids.contains(id) ? 0 : 1;
    const auto tracks = dataset::group_records(kept);
    rep.events_seen += static_cast<long>(ids.size());
    rep.events_too_short += static_cast<long>(ids.size() - tracks.size());

    const auto split = dataset::split_by_year(tracks);
    rep.events_out_of_range += static_cast<long>(tracks.size() - split.train.size() - split.test.size());
    for (const auto& [name, part, list] :
         {std::tuple{"train", &split.train, &rep.train_events}, std::tuple{"test", &split.test, &rep.test_events}}) {
      for (const auto& track : *part) {
        const auto r = detail::build_track(client, track, source_id, opt.out / name / dataset::safe_name(track.event_id));
        switch (r.outcome) {
          case detail::Outcome::written:
            list->push_back(track.event_id);
            if (!r.chain_written) ++rep.chain_labels_unavailable;
            break;
          case detail::Outcome::black: ++rep.events_black; break;
          case detail::Outcome::missing: ++rep.events_missing; break;
          case detail::Outcome::unlabeled: ++rep.events_unlabeled; break;
        }
      }
    }
  }
  std::filesystem::create_directories(opt.out);
  dataset::detail::write_text(opt.out / "build_report.txt", rep.summary());
  return rep;
}

}  // namespace solartrack::ingest
