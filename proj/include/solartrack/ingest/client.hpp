#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "solartrack/dataset.hpp"
#include "solartrack/errors.hpp"
#include "solartrack/image.hpp"
#include "solartrack/ingest/helioviewer.hpp"
#include "solartrack/ingest/hek.hpp"
#include "solartrack/ingest/transport.hpp"
#include "solartrack/solarcoord.hpp"

namespace solartrack::ingest {

using SteadyClock = std::chrono::steady_clock;
using ClockFn = std::function<SteadyClock::time_point()>;
using SleepFn = std::function<void(SteadyClock::duration)>;

struct FetchPolicy {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};  // doubled after every failed attempt
  double rate_limit = 2.0;                      // requests per second
  std::optional<std::filesystem::path> fixture_dir;
  std::chrono::minutes max_time_gap{60};  // farther images count as missing
  int max_pages = 1000;

  void validate() const {
    if (max_retries < 0) throw ValidationError("FetchPolicy: max_retries must be >= 0");
    if (!(rate_limit > 0.0)) throw ValidationError("FetchPolicy: rate_limit must be positive");
    if (backoff_base.count() < 0) throw ValidationError("FetchPolicy: negative backoff");
    if (max_pages < 1) throw ValidationError("FetchPolicy: max_pages must be >= 1");
  }
};

/// Spaces successive acquisitions at least 1/rate apart. Acquisition is
/// serialized, so concurrent callers queue rather than burst.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second, ClockFn clock = SteadyClock::now,
                       SleepFn sleep = [](SteadyClock::duration d) { std::this_thread::sleep_for(d); })
      : interval_(std::chrono::duration_cast<SteadyClock::duration>(std::chrono::duration<double>(1.0 / per_second))),
        clock_(std::move(clock)),
        sleep_(std::move(sleep)) {
    if (!(per_second > 0.0)) throw ValidationError("RateLimiter: rate must be positive");
  }

  /// Returns the time the caller was admitted.
  SteadyClock::time_point acquire() {
    std::lock_guard lock(mutex_);
    auto now = clock_();
    if (next_ && now < *next_) {
      sleep_(*next_ - now);
      now = std::max(clock_(), *next_);
    }
    next_ = now + interval_;
    return now;
  }

  [[nodiscard]] SteadyClock::duration interval() const { return interval_; }

 private:
  SteadyClock::duration interval_;
  ClockFn clock_;
  SleepFn sleep_;
  std::mutex mutex_;
  std::optional<SteadyClock::time_point> next_;
};

struct FetchedImage {
  dataset::ScreenResult screen = dataset::ScreenResult::missing;
  std::optional<Image> image;
  std::optional<solarcoord::ImageHeader> header;
};

/// HEK and Helioviewer access with retries, rate limiting and a header
/// cache. One client per sequence of calls; the limiter may be shared.
class Client {
 public:
  Client(Transport& transport, FetchPolicy policy, std::shared_ptr<RateLimiter> limiter = nullptr,
         SleepFn sleep = [](SteadyClock::duration d) { std::this_thread::sleep_for(d); })
      : transport_(transport), policy_(std::move(policy)), limiter_(std::move(limiter)), sleep_(std::move(sleep)) {
    policy_.validate();
    if (!limiter_) limiter_ = std::make_shared<RateLimiter>(policy_.rate_limit);
  }

  [[nodiscard]] const FetchPolicy& policy() const { return policy_; }
  [[nodiscard]] long request_count() const { return requests_; }

  /// Sends `r`, retrying transport failures and 5xx/429 answers with
  /// exponential backoff. Other statuses are returned to the caller.
  Response send(const Request& r) {
    std::string last_error;
    for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
      if (attempt > 0) sleep_(policy_.backoff_base * (1L << (attempt - 1)));
      if (transport_.rate_limited()) limiter_->acquire();
      ++requests_;
      try {
        Response resp = transport_.get(r);
        if (resp.status != 429 && resp.status < 500) return resp;
        last_error = "status " + std::to_string(resp.status);
      } catch (const TransportError& e) {
        last_error = e.what();
      }
    }
    throw TransportError(to_string(r.endpoint) + " failed after " + std::to_string(policy_.max_retries + 1) +
                         " attempts: " + last_error);
  }

  /// All pages of a query, in arrival order.
  std::vector<dataset::EventRecord> query_events(HekQuery q) {
    std::vector<dataset::EventRecord> out;
    for (int n = 0; n < policy_.max_pages; ++n) {
      const Response resp = send(hek_request(q));
      if (resp.status != 200) {
        throw TransportError("hek_search page " + std::to_string(q.page) + ": status " + std::to_string(resp.status));
      }
      HekPage page = parse_hek_page(resp.body);
      for (auto& r : page.records) out.push_back(std::move(r));
      if (!page.overmax || page.records.empty()) return out;
      ++q.page;
    }
    throw TransportError("hek_search: more than " + std::to_string(policy_.max_pages) + " pages");
  }

  /// Header of the image closest to `t`, or nothing when no image lies
  /// within the policy's time gap. Results are cached per (time, source).
  std::optional<solarcoord::ImageHeader> fetch_header(Timestamp t, const std::string& source_id = "") {
    const auto hit = closest(t, source_id);
    if (!hit) return std::nullopt;
    return hit->header;
  }

  /// Closest image to `t` with its header, screened. Black frames and
  /// frames that are absent or fail to decode come back classified rather
  /// than thrown.
  FetchedImage fetch_image(Timestamp t, const std::string& source_id = "") {
    FetchedImage out;
    const auto hit = closest(t, source_id);
    if (!hit) return out;
    out.header = hit->header;
    Request r{Endpoint::hv_image, {{"id", hit->id}}};
    const Response resp = send(r);
    if (resp.status == 200) {
      try {
        Image img = pgm::decode(resp.body);
        if (img.width() == hit->header.width && img.height() == hit->header.height) out.image = std::move(img);
      } catch (const ParseError&) {
        // undecodable: stays missing
      }
    }
    out.screen = dataset::screen_image(out.image);
    return out;
  }

 private:
  struct Hit {
    std::string id;
    solarcoord::ImageHeader header;
  };

  std::optional<Hit> closest(Timestamp t, const std::string& source_id) {
    const auto key = std::make_pair(t, source_id);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    std::optional<Hit> hit;
    Request r{Endpoint::hv_closest, {{"date", format_timestamp(t)}}};
    if (!source_id.empty()) r.params["sourceId"] = source_id;
    const Response resp = send(r);
    if (resp.status == 200) {
      const ClosestImage c = parse_closest(resp.body);
      const auto gap = c.date > t ? c.date - t : t - c.date;
      if (gap <= policy_.max_time_gap) {
        const Response hr = send(Request{Endpoint::hv_header, {{"id", c.id}}});
        if (hr.status != 200) throw TransportError("hv_header " + c.id + ": status " + std::to_string(hr.status));
        hit = Hit{c.id, parse_header(hr.body)};
      }
    } else if (resp.status != 404) {
      throw TransportError("hv_closest: status " + std::to_string(resp.status));
    }
    cache_.emplace(key, hit);
    return hit;
  }

  Transport& transport_;
  FetchPolicy policy_;
  std::shared_ptr<RateLimiter> limiter_;
  SleepFn sleep_;
  long requests_ = 0;
  std::map<std::pair<Timestamp, std::string>, std::optional<Hit>> cache_;
};

}  // namespace solartrack::ingest
