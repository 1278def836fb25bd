#pragma once

// HEK search requests and the JSON result parser.

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/geometry.hpp"
#include "solartrack/ingest/transport.hpp"
#include "solartrack/timestamp.hpp"

namespace solartrack::ingest {

/// Reporting module used by default for each event type.
[[nodiscard]] inline dataset::Source default_source(dataset::EventType t) {
  return t == dataset::EventType::AR ? dataset::Source::HMI : dataset::Source::SPOCA;
}

/// HEK `frm_name` value used to filter for a source.
[[nodiscard]] inline std::string frm_name_filter(dataset::Source s) {
  switch (s) {
    case dataset::Source::HMI: return "HMI SHARP";
    case dataset::Source::SPOCA: return "SPoCA";
    case dataset::Source::other: break;
  }
  throw ValidationError("no HEK module name for source 'other'");
}

[[nodiscard]] inline dataset::Source source_from_frm_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.find("hmi") != std::string::npos) return dataset::Source::HMI;
  if (lower.find("spoca") != std::string::npos) return dataset::Source::SPOCA;
  return dataset::Source::other;
}

struct HekQuery {
  dataset::EventType event_type = dataset::EventType::AR;
  Timestamp start{};
  Timestamp end{};
  std::optional<dataset::Source> source;  // default_source(event_type) when unset
  int page = 1;
  int page_size = 500;

  [[nodiscard]] dataset::Source effective_source() const { return source.value_or(default_source(event_type)); }

  void validate() const {
    if (!(start < end)) throw ValidationError("HekQuery: empty time range");
    if (page < 1 || page_size < 1) throw ValidationError("HekQuery: bad page");
    if (effective_source() != default_source(event_type)) {
      throw ValidationError("HekQuery: source " + dataset::to_string(effective_source()) + " does not report " +
                            dataset::to_string(event_type) + " events");
    }
  }
};

[[nodiscard]] inline Request hek_request(const HekQuery& q) {
  q.validate();
  Request r;
  r.endpoint = Endpoint::hek_search;
  std::string type = dataset::to_string(q.event_type);
  std::transform(type.begin(), type.end(), type.begin(), [](unsigned char c) { return std::tolower(c); });
  r.params = {{"cmd", "search"},
              {"type", "column"},
              {"cosec", "2"},
              {"event_type", type},
              {"event_starttime", format_timestamp(q.start)},
              {"event_endtime", format_timestamp(q.end)},
              {"event_coordsys", "helioprojective"},
              {"x1", "-1200"},
              {"x2", "1200"},
              {"y1", "-1200"},
              {"y2", "1200"},
              {"param0", "frm_name"},
              {"op0", "="},
              {"value0", frm_name_filter(q.effective_source())},
              {"result_limit", std::to_string(q.page_size)},
              {"page", std::to_string(q.page)}};
  return r;
}

/// Vertices of `POLYGON((x y, x y, ...))`; a closing vertex equal to the
/// first is dropped.
[[nodiscard]] inline std::vector<Point> parse_wkt_polygon(std::string_view wkt, const char* field) {
  const auto open = wkt.find("((");
  const auto close = wkt.find("))");
  if (wkt.substr(0, 7) != "POLYGON" || open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw ParseError(std::string("hek: field '") + field + "' is not a WKT polygon");
  }
  std::vector<Point> pts;
  for (auto pair : dataset::detail::split(wkt.substr(open + 2, close - open - 2), ',')) {
    const std::string s(dataset::detail::trim(pair));
    double x = 0, y = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%lf %lf %c", &x, &y, &extra) != 2) {
      throw ParseError(std::string("hek: field '") + field + "' has a bad vertex '" + s + "'");
    }
    pts.push_back({x, y});
  }
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  if (pts.size() < 3) throw ParseError(std::string("hek: field '") + field + "' has fewer than 3 vertices");
  return pts;
}

struct HekPage {
  std::vector<dataset::EventRecord> records;
  bool overmax = false;  // more results exist beyond this page
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& obj, const char* name, std::size_t index) {
  const auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    throw ParseError("hek: result " + std::to_string(index) + " missing field '" + name + "'");
  }
  return *it;
}

inline std::string string_field(const nlohmann::json& obj, const char* name, std::size_t index) {
  const auto& v = field(obj, name, index);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError("hek: result " + std::to_string(index) + " field '" + name + "' is not a string");
}

}  // namespace detail

/// Parses one HEK JSON result page. Each record must carry an id
/// (`frm_specificid`, falling back to `kb_archivid`), `event_type`,
/// `frm_name`, `event_starttime`, `event_endtime` and `hpc_bbox`;
/// `hpc_boundcc` becomes the chain code when present and non-empty.
[[nodiscard]] inline HekPage parse_hek_page(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("hek: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("hek: payload is not an object");
  const auto res = doc.find("result");
  if (res == doc.end() || !res->is_array()) throw ParseError("hek: missing field 'result'");
  HekPage page;
  if (const auto om = doc.find("overmax"); om != doc.end() && om->is_boolean()) page.overmax = om->get<bool>();
  std::size_t i = 0;
  for (const auto& item : *res) {
    if (!item.is_object()) throw ParseError("hek: result " + std::to_string(i) + " is not an object");
    dataset::EventRecord r;
    if (const auto sid = item.find("frm_specificid"); sid != item.end() && sid->is_string() && !sid->get<std::string>().empty()) {
      r.event_id = sid->get<std::string>();
    } else {
      r.event_id = detail::string_field(item, "kb_archivid", i);
    }
    try {
      r.event_type = dataset::parse_event_type(detail::string_field(item, "event_type", i));
    } catch (const ValidationError&) {
      throw ParseError("hek: result " + std::to_string(i) + " field 'event_type' is not AR or CH");
    }
    r.source = source_from_frm_name(detail::string_field(item, "frm_name", i));
    auto time = [&](const char* name) {
      try {
        return parse_timestamp(detail::string_field(item, name, i));
      } catch (const ParseError& e) {
        if (std::string_view(e.what()).find("missing field") != std::string_view::npos) throw;
        throw ParseError("hek: result " + std::to_string(i) + " field '" + name + "' is not a timestamp");
      }
    };
    r.start_time = time("event_starttime");
    r.end_time = time("event_endtime");
    if (r.start_time > r.end_time) {
      throw ParseError("hek: result " + std::to_string(i) + " field 'event_endtime' precedes event_starttime");
    }
    const auto bbox = parse_wkt_polygon(detail::string_field(item, "hpc_bbox", i), "hpc_bbox");
    r.hpc_box = Polygon(bbox).bounds();
    if (r.hpc_box.empty()) throw ParseError("hek: result " + std::to_string(i) + " field 'hpc_bbox' is degenerate");
    if (const auto cc = item.find("hpc_boundcc"); cc != item.end() && cc->is_string() && !cc->get<std::string>().empty()) {
      r.chain_code = Polygon(parse_wkt_polygon(cc->get<std::string>(), "hpc_boundcc"));
    }
    page.records.push_back(std::move(r));
    ++i;
  }
  return page;
}

}  // namespace solartrack::ingest
