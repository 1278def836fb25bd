#pragma once

// Transport layer shared by the HEK and Helioviewer clients.
//
// Four endpoints, each answered with a status code and a body:
//   hek_search   HEK search page (JSON)
//   hv_closest   closest image to a date: JSON {"id": ..., "date": ...}
//   hv_header    header of an image id: key=value text or JP2 XML
//   hv_image     pixels of an image id: binary PGM
//
// The fixture transport answers from a directory:
//   hek/<request hash>.json
//   hv/<YYYYMMDDTHHMMSS>.hdr  and  hv/<YYYYMMDDTHHMMSS>.pgm

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/timestamp.hpp"

namespace solartrack::ingest {

enum class Endpoint { hek_search, hv_closest, hv_header, hv_image };

[[nodiscard]] inline std::string to_string(Endpoint e) {
  switch (e) {
    case Endpoint::hek_search: return "hek_search";
    case Endpoint::hv_closest: return "hv_closest";
    case Endpoint::hv_header: return "hv_header";
    case Endpoint::hv_image: return "hv_image";
  }
  return "unknown";
}

struct Request {
  Endpoint endpoint = Endpoint::hek_search;
  std::map<std::string, std::string> params;  // sorted, so the canonical form is stable

  [[nodiscard]] const std::string& param(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ValidationError(to_string(endpoint) + " request without '" + key + "'");
    return it->second;
  }
};

struct Response {
  int status = 200;
  std::string body;
};

/// `endpoint?k=v&k=v` with keys in sorted order.
[[nodiscard]] inline std::string canonical(const Request& r) {
  std::string out = to_string(r.endpoint) + "?";
  bool first = true;
  for (const auto& [k, v] : r.params) {
    if (!first) out += "&";
    out += k + "=" + v;
    first = false;
  }
  return out;
}

[[nodiscard]] inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Fixture key of a request: 16 hex digits of FNV-1a over the canonical form.
[[nodiscard]] inline std::string request_hash(const Request& r) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical(r))));
  return buf;
}

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws TransportError when no response could be obtained at all.
  virtual Response get(const Request& request) = 0;
  /// Whether requests cost anything; only these go through the rate limiter.
  [[nodiscard]] virtual bool rate_limited() const { return true; }
};

/// Index of the entry in `sorted` closest to `t`; ties go to the earlier entry.
[[nodiscard]] inline std::optional<std::size_t> closest_index(const std::vector<Timestamp>& sorted, Timestamp t) {
  if (sorted.empty()) return std::nullopt;
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  if (it == sorted.begin()) return 0;
  if (it == sorted.end()) return sorted.size() - 1;
  const auto after = static_cast<std::size_t>(it - sorted.begin());
  const auto before = after - 1;
  return (t - sorted[before]) <= (sorted[after] - t) ? before : after;
}

/// Answers every endpoint from files; never touches the network.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_)) throw ValidationError("fixture directory not found: " + root_.string());
  }

  [[nodiscard]] bool rate_limited() const override { return false; }

  Response get(const Request& r) override {
    switch (r.endpoint) {
      case Endpoint::hek_search: return file(root_ / "hek" / (request_hash(r) + ".json"));
      case Endpoint::hv_closest: return closest(parse_timestamp(r.param("date")));
      case Endpoint::hv_header: return file(root_ / "hv" / (safe_id(r.param("id")) + ".hdr"));
      case Endpoint::hv_image: return file(root_ / "hv" / (safe_id(r.param("id")) + ".pgm"));
    }
    return {400, "unknown endpoint"};
  }

 private:
  static Response file(const std::filesystem::path& p) {
    if (!std::filesystem::is_regular_file(p)) return {404, "no fixture " + p.filename().string()};
    return {200, dataset::detail::read_text(p)};
  }

  static std::string safe_id(const std::string& id) {
    if (id.empty() || id.find_first_of("/\\.") != std::string::npos) throw ValidationError("bad image id '" + id + "'");
    return id;
  }

  Response closest(Timestamp t) {
    std::call_once(scanned_, [this] { scan(); });
    const auto i = closest_index(times_, t);
    if (!i) return {404, "no images"};
    nlohmann::json j{{"id", compact_timestamp(times_[*i])}, {"date", format_timestamp(times_[*i])}};
    return {200, j.dump()};
  }

  void scan() {
    const auto dir = root_ / "hv";
    if (!std::filesystem::is_directory(dir)) return;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() != ".hdr") continue;
      try {
        times_.push_back(parse_compact_timestamp(e.path().stem().string()));
      } catch (const ParseError&) {
        // not a fixture image; ignore
      }
    }
    std::sort(times_.begin(), times_.end());
  }

  std::filesystem::path root_;
  std::once_flag scanned_;
  std::vector<Timestamp> times_;
};

}  // namespace solartrack::ingest
