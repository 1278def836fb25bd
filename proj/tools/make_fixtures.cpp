// Regenerates the bundled ingest fixtures:
//
//   make_fixtures <dir>
//
// The fixtures answer the AR and CH queries for 2017-01-01 .. 2019-01-01.
// Events:
//   AR_A      3 records, 2017, on disk          -> train
//   AR_B      4 records, 2018, on disk          -> test
//   AR_SHORT  2 records                         -> dropped (fewer than 3)
//   AR_LIMB   3 records beyond the limb         -> dropped (off limb)
//   AR_BLACK  3 records, 2018, black frames     -> dropped (black)
//   CH_C      3 records, 2017, with chain codes -> train
// The AR result spans two pages.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "solartrack/ingest.hpp"
#include "solartrack/synthgen.hpp"

namespace fs = std::filesystem;
using namespace solartrack;

namespace {

constexpr int kSize = 64;
constexpr double kRsun = 960.0;
constexpr double kCdelt = 40.0;

struct Rec {
  std::string start, end;
  double x1, y1, x2, y2;
  std::vector<std::pair<double, double>> chain;
};

struct Event {
  std::string id;
  std::string type;
  std::vector<Rec> recs;
  bool black = false;
  bool images_at_starts_only = false;
};

std::string wkt(const std::vector<std::pair<double, double>>& pts) {
  std::string s = "POLYGON((";
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", v);
    return std::string(b);
  };
  for (std::size_t i = 0; i <= pts.size(); ++i) {
    const auto& p = pts[i % pts.size()];
    if (i) s += ",";
    s += num(p.first) + " " + num(p.second);
  }
  return s + "))";
}

nlohmann::json record_json(const Event& e, const Rec& r) {
  nlohmann::json j{{"frm_specificid", e.id},
                   {"kb_archivid", "ivo://helio-informatics.org/" + e.id + "_" + r.start},
                   {"event_type", e.type},
                   {"frm_name", e.type == "AR" ? "HMI SHARP" : "SPoCA"},
                   {"event_starttime", r.start},
                   {"event_endtime", r.end},
                   {"hpc_bbox", wkt({{r.x1, r.y1}, {r.x2, r.y1}, {r.x2, r.y2}, {r.x1, r.y2}})}};
  if (!r.chain.empty()) j["hpc_boundcc"] = wkt(r.chain);
  return j;
}

solarcoord::ImageHeader header_at(Timestamp t) {
  solarcoord::ImageHeader h;
  h.cdelt1 = h.cdelt2 = kCdelt;
  h.crpix1 = h.crpix2 = kSize / 2.0 + 0.5;
  h.rsun = kRsun;
  h.width = h.height = kSize;
  h.obs_time = t;
  return h;
}

Image render(const Event& e, Timestamp t, const solarcoord::ImageHeader& h) {
  Image img(kSize, kSize);
  if (e.black) return img;
  const Rec* active = &e.recs.front();
  for (const auto& r : e.recs) {
    if (parse_timestamp(r.start) <= t) active = &r;
  }
  const Point c0 = solarcoord::hpc_to_pixel((active->x1 + active->x2) / 2, (active->y1 + active->y2) / 2, h);
  const double sx = (active->x2 - active->x1) / kCdelt / 4.0;
  const double sy = (active->y2 - active->y1) / kCdelt / 4.0;
  const double r = kRsun / kCdelt;
  for (int y = 0; y < kSize; ++y) {
    for (int x = 0; x < kSize; ++x) {
      const double bg = synth::disk_background(x + 0.5, y + 0.5, kSize / 2.0, kSize / 2.0, r);
      const double dx = (x - c0.x) / sx, dy = (y - c0.y) / sy;
      const double g = std::exp(-0.5 * (dx * dx + dy * dy));
      const double v = e.type == "AR" ? bg + synth::kBrightAmplitude * g * (bg > 0 ? 1 : 0) : bg * (1 - synth::kDarkDepth * g);
      img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return img;
}

std::vector<std::pair<double, double>> octagon(double x1, double y1, double x2, double y2, double cut) {
  return {{x1 + cut, y1}, {x2 - cut, y1}, {x2, y1 + cut}, {x2, y2 - cut},
          {x2 - cut, y2}, {x1 + cut, y2}, {x1, y2 - cut}, {x1, y1 + cut}};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <dir>\n";
    return 1;
  }
  const fs::path root = argv[1];
  fs::create_directories(root / "hek");
  fs::create_directories(root / "hv");

  const std::vector<Event> events = {
      {"AR_A", "AR",
       {{"2017-03-01T00:00:00", "2017-03-01T04:00:00", -220, 60, -20, 220, {}},
        {"2017-03-01T04:00:00", "2017-03-01T08:00:00", -180, 60, 20, 220, {}},
        {"2017-03-01T08:00:00", "2017-03-01T12:00:00", -140, 60, 60, 220, {}}}},
      {"AR_B", "AR",
       {{"2018-05-10T00:00:00", "2018-05-10T06:00:00", 100, -200, 300, -40, {}},
        {"2018-05-10T06:00:00", "2018-05-10T12:00:00", 140, -200, 340, -40, {}},
        {"2018-05-10T12:00:00", "2018-05-10T18:00:00", 180, -200, 380, -40, {}},
        {"2018-05-10T18:00:00", "2018-05-11T00:00:00", 220, -200, 420, -40, {}}}},
      {"AR_SHORT", "AR",
       {{"2017-06-01T00:00:00", "2017-06-01T04:00:00", -100, -100, 100, 100, {}},
        {"2017-06-01T04:00:00", "2017-06-01T08:00:00", -60, -100, 140, 100, {}}}},
      {"AR_LIMB", "AR",
       {{"2017-07-01T00:00:00", "2017-07-01T04:00:00", 900, 0, 1100, 100, {}},
        {"2017-07-01T04:00:00", "2017-07-01T08:00:00", 920, 0, 1120, 100, {}},
        {"2017-07-01T08:00:00", "2017-07-01T12:00:00", 940, 0, 1140, 100, {}}},
       false, true},
      {"AR_BLACK", "AR",
       {{"2018-08-01T00:00:00", "2018-08-01T04:00:00", -300, 200, -100, 360, {}},
        {"2018-08-01T04:00:00", "2018-08-01T08:00:00", -260, 200, -60, 360, {}},
        {"2018-08-01T08:00:00", "2018-08-01T12:00:00", -220, 200, -20, 360, {}}},
       true},
      {"CH_C", "CH",
       {{"2017-09-01T00:00:00", "2017-09-01T02:00:00", -100, -300, 100, -100, octagon(-100, -300, 100, -100, 40)},
        {"2017-09-01T02:00:00", "2017-09-01T04:00:00", -60, -300, 140, -100, octagon(-60, -300, 140, -100, 40)},
        {"2017-09-01T04:00:00", "2017-09-01T06:00:00", -20, -300, 180, -100, octagon(-20, -300, 180, -100, 40)}}},
  };
  auto ev = [&](const std::string& id) -> const Event& {
    for (const auto& e : events) {
      if (e.id == id) return e;
    }
    throw std::runtime_error("no event " + id);
  };

  // HEK pages, records interleaved across events.
  const auto window_start = parse_timestamp("2017-01-01T00:00:00");
  const auto window_end = parse_timestamp("2019-01-01T00:00:00");
  auto page = [&](const std::string& type, int n, const std::vector<std::pair<std::string, int>>& items, bool overmax) {
    ingest::HekQuery q;
    q.event_type = dataset::parse_event_type(type);
    q.start = window_start;
    q.end = window_end;
    q.page = n;
    nlohmann::json doc{{"overmax", overmax}, {"result", nlohmann::json::array()}};
    for (const auto& [id, k] : items) doc["result"].push_back(record_json(ev(id), ev(id).recs[static_cast<std::size_t>(k)]));
    dataset::detail::write_text(root / "hek" / (ingest::request_hash(ingest::hek_request(q)) + ".json"), doc.dump(1) + "\n");
  };
  page("AR", 1, {{"AR_A", 1}, {"AR_B", 0}, {"AR_SHORT", 0}, {"AR_A", 0}, {"AR_LIMB", 0}, {"AR_B", 2}, {"AR_BLACK", 0}}, true);
  page("AR", 2,
       {{"AR_A", 2}, {"AR_B", 1}, {"AR_B", 3}, {"AR_SHORT", 1}, {"AR_LIMB", 1}, {"AR_LIMB", 2}, {"AR_BLACK", 1}, {"AR_BLACK", 2}},
       false);
  page("CH", 1, {{"CH_C", 2}, {"CH_C", 0}, {"CH_C", 1}}, false);

  // One image per sample time of every event.
  std::size_t n_images = 0;
  for (const auto& e : events) {
    std::set<Timestamp> times;
    for (const auto& r : e.recs) {
      const auto s = parse_timestamp(r.start);
      if (e.images_at_starts_only) {
        times.insert(s);
      } else {
        for (auto t : dataset::sample_times(s, parse_timestamp(r.end))) times.insert(t);
      }
    }
    for (auto t : times) {
      const auto h = header_at(t);
      const std::string stem = compact_timestamp(t);
      dataset::detail::write_text(root / "hv" / (stem + ".hdr"), ingest::format_header_kv(h));
      pgm::write(root / "hv" / (stem + ".pgm"), render(e, t, h));
      ++n_images;
    }
  }
  std::cout << "wrote " << n_images << " images\n";
  return 0;
}
