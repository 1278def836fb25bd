#pragma once

// Event records, track grouping, frame-time sampling, annotation files,
// frame screening and the on-disk event-directory layout:
//
//   <event>/000000.pgm ...      frames by index
//   <event>/annotations.csv     labels from the reported bounding box
//   <event>/annotations_chain.csv  labels from the chain-code inscribed box (optional)
//   <event>/truth.csv           dense per-frame truth (synthetic data only)
//   <event>/meta.txt            key=value: event id, type and image header

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/image.hpp"
#include "solartrack/solarcoord.hpp"
#include "solartrack/timestamp.hpp"

namespace solartrack::dataset {

enum class EventType { AR, CH };
enum class Source { HMI, SPOCA, other };
enum class LabelMode { hek_box, chain_inscribed };
enum class ScreenResult { ok, black, missing };

inline constexpr double kBlackThreshold = 0.02;

[[nodiscard]] inline std::string to_string(EventType t) { return t == EventType::AR ? "AR" : "CH"; }
[[nodiscard]] inline EventType parse_event_type(std::string_view s) {
  if (s == "AR") return EventType::AR;
  if (s == "CH") return EventType::CH;
  throw ParseError("unknown event type '" + std::string(s) + "'");
}
[[nodiscard]] inline std::string to_string(Source s) {
  switch (s) {
    case Source::HMI: return "HMI";
    case Source::SPOCA: return "SPOCA";
    default: return "other";
  }
}
[[nodiscard]] inline Source parse_source(std::string_view s) {
  if (s == "HMI") return Source::HMI;
  if (s == "SPOCA" || s == "SPoCA") return Source::SPOCA;
  return Source::other;
}
[[nodiscard]] inline std::string to_string(LabelMode m) { return m == LabelMode::hek_box ? "hek_box" : "chain_inscribed"; }
[[nodiscard]] inline LabelMode parse_label_mode(std::string_view s) {
  if (s == "hek_box") return LabelMode::hek_box;
  if (s == "chain_inscribed") return LabelMode::chain_inscribed;
  throw ValidationError("unknown label mode '" + std::string(s) + "'");
}
[[nodiscard]] inline std::string to_string(ScreenResult r) {
  switch (r) {
    case ScreenResult::ok: return "ok";
    case ScreenResult::black: return "black";
    default: return "missing";
  }
}

struct EventRecord {
  std::string event_id;
  EventType event_type = EventType::AR;
  Source source = Source::HMI;
  Timestamp start_time{};
  Timestamp end_time{};
  BBox hpc_box;                       // arcsec
  std::optional<Polygon> chain_code;  // arcsec

  void validate() const {
    if (event_id.empty()) throw ValidationError("EventRecord: empty event_id");
    if (start_time > end_time) throw ValidationError("EventRecord " + event_id + ": start_time after end_time");
  }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventTrack {
  std::string event_id;
  std::vector<EventRecord> records;  // ascending start_time

  [[nodiscard]] EventType event_type() const { return records.front().event_type; }
  [[nodiscard]] Timestamp start_time() const { return records.front().start_time; }
};

inline constexpr std::size_t kMinTrackRecords = 3;

/// One track per event id, records sorted by start time (stable for equal
/// starts); ids with fewer than three records are dropped. Output is ordered
/// by first appearance of the id in the input.
[[nodiscard]] inline std::vector<EventTrack> group_records(std::span<const EventRecord> records) {
  std::vector<EventTrack> tracks;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : records) {
    r.validate();
    auto [it, inserted] = slot.try_emplace(r.event_id, tracks.size());
    if (inserted) tracks.push_back({r.event_id, {}});
    auto& t = tracks[it->second];
    if (!t.records.empty() && t.records.front().event_type != r.event_type) {
      throw ValidationError("inconsistent track: event " + r.event_id + " mixes event types");
    }
    t.records.push_back(r);
  }
  std::vector<EventTrack> out;
  for (auto& t : tracks) {
    if (t.records.size() < kMinTrackRecords) continue;
    std::stable_sort(t.records.begin(), t.records.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.start_time < b.start_time; });
    out.push_back(std::move(t));
  }
  return out;
}

/// Five instants splitting [start, end] into four equal intervals; a single
/// instant when start == end.
[[nodiscard]] inline std::vector<Timestamp> sample_times(Timestamp start, Timestamp end) {
  if (start > end) throw ValidationError("sample_times: start after end");
  if (start == end) return {start};
  const Duration span = end - start;
  std::vector<Timestamp> out;
  for (int k = 0; k < 4; ++k) out.push_back(start + span * k / 4);
  out.push_back(end);
  return out;
}

struct Timeline {
  std::vector<Timestamp> times;
  std::vector<std::size_t> record_frame;  // frame index of each record's start time
};

/// Concatenates each record's sample times in order. A time equal to the
/// immediately preceding one is dropped (the first occurrence is kept).
[[nodiscard]] inline Timeline assemble_timeline(const EventTrack& track) {
  Timeline tl;
  for (const auto& r : track.records) {
    bool first = true;
    for (Timestamp t : sample_times(r.start_time, r.end_time)) {
      if (tl.times.empty() || tl.times.back() != t) tl.times.push_back(t);
      if (first) {
        tl.record_frame.push_back(tl.times.size() - 1);
        first = false;
      }
    }
  }
  return tl;
}

struct Annotation {
  int frame_index = 0;
  std::array<double, 4> xs{};
  std::array<double, 4> ys{};

  [[nodiscard]] BBox box() const { return bbox_from_corners(std::span<const double, 4>(xs), std::span<const double, 4>(ys)); }

  /// Corners clockwise from the top-left: (x1,y1) (x2,y1) (x2,y2) (x1,y2).
  [[nodiscard]] static Annotation from_box(int frame_index, const BBox& b) {
    return {frame_index, {b.x1(), b.x2(), b.x2(), b.x1()}, {b.y1(), b.y1(), b.y2(), b.y2()}};
  }
  friend bool operator==(const Annotation&, const Annotation&) = default;
};

[[nodiscard]] inline long long round_half_up(double v) { return static_cast<long long>(std::floor(v + 0.5)); }

/// `i,x1,x2,x3,x4,y1,y2,y3,y4` with corners rounded half-up to integers.
[[nodiscard]] inline std::string format_annotation(const Annotation& a) {
  std::string line = std::to_string(a.frame_index);
  for (double v : a.xs) line += "," + std::to_string(round_half_up(v));
  for (double v : a.ys) line += "," + std::to_string(round_half_up(v));
  return line;
}

[[nodiscard]] inline std::string write_annotations(std::span<const Annotation> anns) {
  std::string out;
  for (const auto& a : anns) out += format_annotation(a) + "\n";
  return out;
}

namespace detail {
inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> lines(std::string_view text) {
  auto out = split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  for (auto& l : out) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line, const char* field) {
  s = trim(s);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty() || !std::isfinite(v)) {
    throw ParseError(std::string("non-numeric ") + field + " '" + std::string(s) + "'", line);
  }
  return v;
}

inline long long parse_int(std::string_view s, std::size_t line, const char* field) {
  s = trim(s);
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) {
    throw ParseError(std::string("non-integer ") + field + " '" + std::string(s) + "'", line);
  }
  return v;
}

inline std::string read_text(const std::filesystem::path& p) { return pgm::read_file(p); }

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  out << text;
}
}  // namespace detail

[[nodiscard]] inline std::vector<Annotation> parse_annotations(std::string_view text) {
  std::vector<Annotation> out;
  std::set<int> seen;
  const auto ls = detail::lines(text);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const std::size_t line = i + 1;
    const auto fields = detail::split(ls[i], ',');
    if (fields.size() != 9) {
      throw ParseError("expected 9 fields, got " + std::to_string(fields.size()), line);
    }
    Annotation a;
    const long long idx = detail::parse_int(fields[0], line, "frame index");
    if (idx < 0 || idx > std::numeric_limits<int>::max()) throw ParseError("frame index out of range", line);
    a.frame_index = static_cast<int>(idx);
    for (std::size_t k = 0; k < 4; ++k) a.xs[k] = detail::parse_double(fields[1 + k], line, "x corner");
    for (std::size_t k = 0; k < 4; ++k) a.ys[k] = detail::parse_double(fields[5 + k], line, "y corner");
    if (!seen.insert(a.frame_index).second) {
      throw ParseError("duplicate frame index " + std::to_string(a.frame_index), line);
    }
    if (a.box().empty()) throw ParseError("degenerate box", line);
    out.push_back(a);
  }
  return out;
}

/// Black when the mean intensity is below `black_threshold`; missing when
/// the frame failed to load.
[[nodiscard]] inline ScreenResult screen_image(const Image* img, double black_threshold = kBlackThreshold) {
  if (img == nullptr || img->empty()) return ScreenResult::missing;
  return img->mean() < black_threshold ? ScreenResult::black : ScreenResult::ok;
}

[[nodiscard]] inline ScreenResult screen_image(const std::optional<Image>& img, double black_threshold = kBlackThreshold) {
  return screen_image(img ? &*img : nullptr, black_threshold);
}

/// Pixel-space label for one record under the header of its image.
[[nodiscard]] inline BBox label_box(const EventRecord& record, LabelMode mode, const solarcoord::ImageHeader& h) {
  if (mode == LabelMode::hek_box) return solarcoord::hpc_box_to_pixel(record.hpc_box, h);
  if (!record.chain_code) throw ValidationError("label_box: event " + record.event_id + " has no chain code");
  const Polygon px = solarcoord::hpc_polygon_to_pixel(*record.chain_code, h);
  const BBox b = px.bounds().clamped(h.width, h.height);
  if (b.empty()) throw ValidationError("label_box: chain code outside image");
  // Rasterize on a window covering the polygon's bounds, then shift back.
  const int ox = static_cast<int>(std::floor(b.x1()));
  const int oy = static_cast<int>(std::floor(b.y1()));
  const int w = std::max(1, static_cast<int>(std::ceil(b.x2())) - ox);
  const int hgt = std::max(1, static_cast<int>(std::ceil(b.y2())) - oy);
  std::vector<Point> local;
  for (const auto& v : px.vertices()) {
    local.push_back({std::clamp(v.x - ox, 0.0, static_cast<double>(w)), std::clamp(v.y - oy, 0.0, static_cast<double>(hgt))});
  }
  const BBox inner = maximal_inscribed_box(rasterize(Polygon(std::move(local)), w, hgt));
  return inner.translated(ox, oy);
}

struct YearSplit {
  std::vector<EventTrack> train;
  std::vector<EventTrack> test;
};

inline constexpr int kLastTrainYear = 2017;
inline constexpr int kTestYear = 2018;

/// Tracks starting in or before 2017 train; tracks starting in 2018 test;
/// later tracks are left out.
[[nodiscard]] inline YearSplit split_by_year(std::span<const EventTrack> tracks) {
  YearSplit s;
  for (const auto& t : tracks) {
    const int y = year_of(t.start_time());
    if (y <= kLastTrainYear) {
      s.train.push_back(t);
    } else if (y == kTestYear) {
      s.test.push_back(t);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Event-record CSV and chain-code sidecars

inline constexpr std::string_view kEventCsvHeader = "event_id,event_type,source,start_time,end_time,x1,y1,x2,y2";

[[nodiscard]] inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[nodiscard]] inline std::string write_event_csv(std::span<const EventRecord> records) {
  std::string out(kEventCsvHeader);
  out += "\n";
  for (const auto& r : records) {
    if (r.event_id.find(',') != std::string::npos) throw ValidationError("event id contains a comma: " + r.event_id);
    out += r.event_id + "," + to_string(r.event_type) + "," + to_string(r.source) + "," + format_timestamp(r.start_time) +
           "," + format_timestamp(r.end_time) + "," + format_number(r.hpc_box.x1()) + "," + format_number(r.hpc_box.y1()) +
           "," + format_number(r.hpc_box.x2()) + "," + format_number(r.hpc_box.y2()) + "\n";
  }
  return out;
}

/// Records without chain codes; attach them with `read_chain_sidecar`.
[[nodiscard]] inline std::vector<EventRecord> parse_event_csv(std::string_view text) {
  const auto ls = detail::lines(text);
  if (ls.empty() || detail::trim(ls[0]) != kEventCsvHeader) throw ParseError("missing event CSV header", 1);
  std::vector<EventRecord> out;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const std::size_t line = i + 1;
    const auto f = detail::split(ls[i], ',');
    if (f.size() != 9) throw ParseError("expected 9 fields, got " + std::to_string(f.size()), line);
    EventRecord r;
    r.event_id = std::string(detail::trim(f[0]));
    try {
      r.event_type = parse_event_type(detail::trim(f[1]));
      r.start_time = parse_timestamp(detail::trim(f[3]));
      r.end_time = parse_timestamp(detail::trim(f[4]));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line);
    }
    r.source = parse_source(detail::trim(f[2]));
    r.hpc_box = BBox(detail::parse_double(f[5], line, "x1"), detail::parse_double(f[6], line, "y1"),
                     detail::parse_double(f[7], line, "x2"), detail::parse_double(f[8], line, "y2"));
    if (r.event_id.empty()) throw ParseError("empty event_id", line);
    if (r.start_time > r.end_time) throw ParseError("start_time after end_time", line);
    out.push_back(std::move(r));
  }
  return out;
}

/// `x,y,x,y,...` vertex pairs in arcsec.
[[nodiscard]] inline std::string format_chain(const Polygon& p) {
  std::string out;
  for (const auto& v : p.vertices()) {
    if (!out.empty()) out += ",";
    out += format_number(v.x) + "," + format_number(v.y);
  }
  return out + "\n";
}

[[nodiscard]] inline Polygon parse_chain(std::string_view text) {
  const auto f = detail::split(detail::trim(text), ',');
  if (f.size() % 2 != 0 || f.size() < 6) throw ParseError("chain code needs at least 3 vertex pairs");
  std::vector<Point> pts;
  for (std::size_t i = 0; i < f.size(); i += 2) {
    pts.push_back({detail::parse_double(f[i], 1, "chain x"), detail::parse_double(f[i + 1], 1, "chain y")});
  }
  return Polygon(std::move(pts));
}

/// File-system safe version of an event id.
[[nodiscard]] inline std::string safe_name(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

/// Sidecar for one record's chain code. Records of one event share an id, so
/// the start time is part of the name.
[[nodiscard]] inline std::string chain_file_name(const EventRecord& r) {
  return safe_name(r.event_id) + "_" + compact_timestamp(r.start_time) + ".chain";
}

inline void write_records(const std::filesystem::path& dir, std::span<const EventRecord> records) {
  std::filesystem::create_directories(dir);
  detail::write_text(dir / "events.csv", write_event_csv(records));
  for (const auto& r : records) {
    if (r.chain_code) detail::write_text(dir / chain_file_name(r), format_chain(*r.chain_code));
  }
}

[[nodiscard]] inline std::vector<EventRecord> read_records(const std::filesystem::path& dir) {
  auto records = parse_event_csv(detail::read_text(dir / "events.csv"));
  for (auto& r : records) {
    const auto p = dir / chain_file_name(r);
    if (std::filesystem::exists(p)) r.chain_code = parse_chain(detail::read_text(p));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Sequences

struct SequenceMeta {
  std::string event_id;
  EventType event_type = EventType::AR;
  solarcoord::ImageHeader header;
};

struct Sequence {
  std::vector<Image> frames;
  std::map<int, Annotation> annotations;
  SequenceMeta meta;
  std::vector<BBox> truth;  // dense per-frame truth; empty for real data

  void validate() const {
    for (const auto& [i, a] : annotations) {
      if (i != a.frame_index || i < 0 || static_cast<std::size_t>(i) >= frames.size()) {
        throw ValidationError("Sequence " + meta.event_id + ": annotation index out of range");
      }
    }
    if (!truth.empty() && truth.size() != frames.size()) {
      throw ValidationError("Sequence " + meta.event_id + ": truth length differs from frame count");
    }
  }

  [[nodiscard]] std::vector<int> annotated_frames() const {
    std::vector<int> out;
    for (const auto& [i, a] : annotations) out.push_back(i);
    return out;
  }
};

[[nodiscard]] inline std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.pgm", index);
  return buf;
}

[[nodiscard]] inline std::string write_meta(const SequenceMeta& m, std::size_t frame_count) {
  const auto& h = m.header;
  std::string out;
  out += "event_id=" + m.event_id + "\n";
  out += "event_type=" + to_string(m.event_type) + "\n";
  out += "frames=" + std::to_string(frame_count) + "\n";
  out += "cdelt1=" + format_number(h.cdelt1) + "\n";
  out += "cdelt2=" + format_number(h.cdelt2) + "\n";
  out += "crpix1=" + format_number(h.crpix1) + "\n";
  out += "crpix2=" + format_number(h.crpix2) + "\n";
  out += "rsun=" + format_number(h.rsun) + "\n";
  out += "width=" + std::to_string(h.width) + "\n";
  out += "height=" + std::to_string(h.height) + "\n";
  out += "obs_time=" + format_timestamp(h.obs_time) + "\n";
  return out;
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
[[nodiscard]] inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  const auto ls = detail::lines(text);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const auto l = detail::trim(ls[i]);
    if (l.empty() || l.front() == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", i + 1);
    kv[std::string(detail::trim(l.substr(0, eq)))] = std::string(detail::trim(l.substr(eq + 1)));
  }
  return kv;
}

[[nodiscard]] inline SequenceMeta parse_meta(std::string_view text) {
  const auto kv = parse_key_values(text);
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("meta: missing key '") + key + "'");
    return it->second;
  };
  SequenceMeta m;
  m.event_id = get("event_id");
  m.event_type = parse_event_type(get("event_type"));
  m.header.cdelt1 = detail::parse_double(get("cdelt1"), 0, "cdelt1");
  m.header.cdelt2 = detail::parse_double(get("cdelt2"), 0, "cdelt2");
  m.header.crpix1 = detail::parse_double(get("crpix1"), 0, "crpix1");
  m.header.crpix2 = detail::parse_double(get("crpix2"), 0, "crpix2");
  m.header.rsun = detail::parse_double(get("rsun"), 0, "rsun");
  m.header.width = static_cast<int>(detail::parse_int(get("width"), 0, "width"));
  m.header.height = static_cast<int>(detail::parse_int(get("height"), 0, "height"));
  m.header.obs_time = parse_timestamp(get("obs_time"));
  return m;
}

inline constexpr const char* kAnnotationFile = "annotations.csv";
inline constexpr const char* kChainAnnotationFile = "annotations_chain.csv";
inline constexpr const char* kTruthFile = "truth.csv";
inline constexpr const char* kMetaFile = "meta.txt";

[[nodiscard]] inline const char* annotation_file(LabelMode mode) {
  return mode == LabelMode::hek_box ? kAnnotationFile : kChainAnnotationFile;
}

inline void write_annotation_file(const std::filesystem::path& p, const std::map<int, Annotation>& anns) {
  std::vector<Annotation> v;
  for (const auto& [i, a] : anns) v.push_back(a);
  detail::write_text(p, write_annotations(v));
}

/// Writes frames, annotations (hek_box file), truth sidecar (when present) and meta.
inline void save_sequence(const std::filesystem::path& dir, const Sequence& seq) {
  seq.validate();
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < seq.frames.size(); ++i) pgm::write(dir / frame_file_name(i), seq.frames[i]);
  write_annotation_file(dir / kAnnotationFile, seq.annotations);
  if (!seq.truth.empty()) {
    std::vector<Annotation> dense;
    for (std::size_t i = 0; i < seq.truth.size(); ++i) dense.push_back(Annotation::from_box(static_cast<int>(i), seq.truth[i]));
    detail::write_text(dir / kTruthFile, write_annotations(dense));
  }
  detail::write_text(dir / kMetaFile, write_meta(seq.meta, seq.frames.size()));
}

[[nodiscard]] inline Sequence load_sequence(const std::filesystem::path& dir, LabelMode mode = LabelMode::hek_box) {
  Sequence seq;
  const auto meta_text = detail::read_text(dir / kMetaFile);
  seq.meta = parse_meta(meta_text);
  const auto kv = parse_key_values(meta_text);
  const long long n = detail::parse_int(kv.at("frames"), 0, "frames");
  for (long long i = 0; i < n; ++i) seq.frames.push_back(pgm::read(dir / frame_file_name(static_cast<std::size_t>(i))));
  const auto ann_path = dir / annotation_file(mode);
  if (!std::filesystem::exists(ann_path)) {
    throw ValidationError("sequence " + dir.string() + " has no " + annotation_file(mode));
  }
  for (const auto& a : parse_annotations(detail::read_text(ann_path))) seq.annotations.emplace(a.frame_index, a);
  if (std::filesystem::exists(dir / kTruthFile)) {
    for (const auto& a : parse_annotations(detail::read_text(dir / kTruthFile))) seq.truth.push_back(a.box());
  }
  seq.validate();
  return seq;
}

/// Every immediate subdirectory of `root` holding a meta file, sorted by name,
/// optionally restricted to one event type.
[[nodiscard]] inline std::vector<Sequence> load_corpus(const std::filesystem::path& root,
                                                       LabelMode mode = LabelMode::hek_box,
                                                       std::optional<EventType> only = std::nullopt) {
  if (!std::filesystem::is_directory(root)) throw ValidationError("corpus directory not found: " + root.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory() && std::filesystem::exists(e.path() / kMetaFile)) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<Sequence> out;
  for (const auto& d : dirs) {
    if (only && parse_meta(detail::read_text(d / kMetaFile)).event_type != *only) continue;
    out.push_back(load_sequence(d, mode));
  }
  return out;
}

}  // namespace solartrack::dataset
