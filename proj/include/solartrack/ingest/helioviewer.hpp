#pragma once

// Helioviewer payload parsers. Headers come in two shapes: the fixture
// key=value form and the JP2 XML header of the live service. Each has its
// own parser so a change in one leaves the other alone.

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/solarcoord.hpp"
#include "solartrack/timestamp.hpp"

namespace solartrack::ingest {

struct ClosestImage {
  std::string id;
  Timestamp date{};
};

[[nodiscard]] inline ClosestImage parse_closest(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("helioviewer: malformed JSON: ") + e.what());
  }
  ClosestImage c;
  const auto id = doc.find("id");
  if (id == doc.end() || id->is_null()) throw ParseError("helioviewer: missing field 'id'");
  c.id = id->is_string() ? id->get<std::string>() : std::to_string(id->get<long long>());
  const auto date = doc.find("date");
  if (date == doc.end() || !date->is_string()) throw ParseError("helioviewer: missing field 'date'");
  c.date = parse_timestamp(date->get<std::string>());
  return c;
}

/// Fixture header: `cdelt1`, `cdelt2`, `crpix1`, `crpix2`, `rsun`, `width`,
/// `height` and `date`, one `key=value` per line.
[[nodiscard]] inline solarcoord::ImageHeader parse_header_kv(std::string_view text) {
  const auto kv = dataset::parse_key_values(text);
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("header: missing key '") + key + "'");
    return it->second;
  };
  using dataset::detail::parse_double;
  using dataset::detail::parse_int;
  solarcoord::ImageHeader h;
  h.cdelt1 = parse_double(get("cdelt1"), 0, "cdelt1");
  h.cdelt2 = parse_double(get("cdelt2"), 0, "cdelt2");
  h.crpix1 = parse_double(get("crpix1"), 0, "crpix1");
  h.crpix2 = parse_double(get("crpix2"), 0, "crpix2");
  h.rsun = parse_double(get("rsun"), 0, "rsun");
  h.width = static_cast<int>(parse_int(get("width"), 0, "width"));
  h.height = static_cast<int>(parse_int(get("height"), 0, "height"));
  h.obs_time = parse_timestamp(get("date"));
  try {
    h.validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("header: ") + e.what());
  }
  return h;
}

[[nodiscard]] inline std::string format_header_kv(const solarcoord::ImageHeader& h) {
  using dataset::format_number;
  return "cdelt1=" + format_number(h.cdelt1) + "\ncdelt2=" + format_number(h.cdelt2) + "\ncrpix1=" +
         format_number(h.crpix1) + "\ncrpix2=" + format_number(h.crpix2) + "\nrsun=" + format_number(h.rsun) +
         "\nwidth=" + std::to_string(h.width) + "\nheight=" + std::to_string(h.height) +
         "\ndate=" + format_timestamp(h.obs_time) + "\n";
}

namespace detail {
inline std::optional<std::string> xml_tag(std::string_view xml, std::string_view tag) {
  const std::string open = "<" + std::string(tag);
  std::size_t pos = 0;
  while ((pos = xml.find(open, pos)) != std::string_view::npos) {
    const std::size_t after = pos + open.size();
    if (after < xml.size() && (xml[after] == '>' || xml[after] == ' ')) {
      const auto gt = xml.find('>', after);
      const auto end = xml.find("</" + std::string(tag) + ">", gt);
      if (gt == std::string_view::npos || end == std::string_view::npos) return std::nullopt;
      return std::string(dataset::detail::trim(xml.substr(gt + 1, end - gt - 1)));
    }
    pos = after;
  }
  return std::nullopt;
}
}  // namespace detail

/// JP2 header XML as served by Helioviewer (`<fits>` block with FITS
/// keywords as elements). RSUN_OBS is the solar radius in arcsec.
[[nodiscard]] inline solarcoord::ImageHeader parse_header_jp2_xml(std::string_view xml) {
  auto get = [&](const char* tag) {
    auto v = detail::xml_tag(xml, tag);
    if (!v) throw ParseError(std::string("jp2 header: missing key '") + tag + "'");
    return *v;
  };
  using dataset::detail::parse_double;
  using dataset::detail::parse_int;
  solarcoord::ImageHeader h;
  h.cdelt1 = parse_double(get("CDELT1"), 0, "CDELT1");
  h.cdelt2 = parse_double(get("CDELT2"), 0, "CDELT2");
  h.crpix1 = parse_double(get("CRPIX1"), 0, "CRPIX1");
  h.crpix2 = parse_double(get("CRPIX2"), 0, "CRPIX2");
  h.rsun = parse_double(get("RSUN_OBS"), 0, "RSUN_OBS");
  h.width = static_cast<int>(parse_int(get("NAXIS1"), 0, "NAXIS1"));
  h.height = static_cast<int>(parse_int(get("NAXIS2"), 0, "NAXIS2"));
  auto date = detail::xml_tag(xml, "DATE-OBS");
  if (!date) date = detail::xml_tag(xml, "T_OBS");
  if (!date) throw ParseError("jp2 header: missing key 'DATE-OBS'");
  h.obs_time = parse_timestamp(*date);
  try {
    h.validate();
  } catch (const ValidationError& e) {
    throw ParseError(std::string("jp2 header: ") + e.what());
  }
  return h;
}

/// Dispatches on the payload shape.
[[nodiscard]] inline solarcoord::ImageHeader parse_header(std::string_view text) {
  const auto t = dataset::detail::trim(text);
  if (!t.empty() && t.front() == '<') return parse_header_jp2_xml(t);
  return parse_header_kv(t);
}

}  // namespace solartrack::ingest
