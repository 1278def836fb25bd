#pragma once

// Live HTTP(S) transport. Include only where network access is wanted;
// define CPPHTTPLIB_OPENSSL_SUPPORT before this header for https URLs.
//
// Endpoints are set in one config file of key=value lines:
//
//   hek_url = https://www.lmsal.com/hek/her
//   helioviewer_url = https://api.helioviewer.org/v2
//   image_url = http://localhost:8080/pgm     # must answer ?id=<image id> with a PGM
//   timeout_seconds = 30
//   ar_source_id = 10
//   ch_source_id = 11

#include <string>
#include <utility>

#include "httplib.h"
#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/ingest/transport.hpp"

namespace solartrack::ingest {

struct LiveConfig {
  std::string hek_url = "https://www.lmsal.com/hek/her";
  std::string helioviewer_url = "https://api.helioviewer.org/v2";
  std::string image_url;  // no PGM service by default: every image is reported missing
  int timeout_seconds = 30;
  std::string ar_source_id = "10";
  std::string ch_source_id = "11";

  [[nodiscard]] std::string source_id(dataset::EventType t) const {
    return t == dataset::EventType::AR ? ar_source_id : ch_source_id;
  }
};

[[nodiscard]] inline LiveConfig parse_live_config(std::string_view text) {
  LiveConfig c;
  for (const auto& [k, v] : dataset::parse_key_values(text)) {
    if (k == "hek_url") c.hek_url = v;
    else if (k == "helioviewer_url") c.helioviewer_url = v;
    else if (k == "image_url") c.image_url = v;
    else if (k == "timeout_seconds") c.timeout_seconds = static_cast<int>(dataset::detail::parse_int(v, 0, "timeout_seconds"));
    else if (k == "ar_source_id") c.ar_source_id = v;
    else if (k == "ch_source_id") c.ch_source_id = v;
    else throw ValidationError("live config: unknown key '" + k + "'");
  }
  if (c.timeout_seconds < 1) throw ValidationError("live config: timeout_seconds must be >= 1");
  return c;
}

namespace detail {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ValidationError("URL without scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace detail

class LiveTransport final : public Transport {
 public:
  explicit LiveTransport(LiveConfig cfg) : cfg_(std::move(cfg)) {}

  Response get(const Request& r) override {
    switch (r.endpoint) {
      case Endpoint::hek_search: return fetch(cfg_.hek_url, httplib::Params(r.params.begin(), r.params.end()));
      case Endpoint::hv_closest: {
        httplib::Params p{{"date", r.param("date") + "Z"}};
        if (const auto it = r.params.find("sourceId"); it != r.params.end()) p.emplace("sourceId", it->second);
        return fetch(cfg_.helioviewer_url + "/getClosestImage/", p);
      }
      case Endpoint::hv_header: return fetch(cfg_.helioviewer_url + "/getJP2Header/", {{"id", r.param("id")}});
      case Endpoint::hv_image:
        if (cfg_.image_url.empty()) return {404, "no image service configured"};
        return fetch(cfg_.image_url, {{"id", r.param("id")}});
    }
    return {400, "unknown endpoint"};
  }

 private:
  Response fetch(const std::string& url, const httplib::Params& params) {
    const auto u = detail::split_url(url);
    httplib::Client cli(u.origin);
    cli.set_connection_timeout(cfg_.timeout_seconds, 0);
    cli.set_read_timeout(cfg_.timeout_seconds, 0);
    cli.set_follow_location(true);
    auto res = cli.Get(u.path, params, httplib::Headers{});
    if (!res) throw TransportError("GET " + url + ": " + httplib::to_string(res.error()));
    return {res->status, res->body};
  }

  LiveConfig cfg_;
};

}  // namespace solartrack::ingest
