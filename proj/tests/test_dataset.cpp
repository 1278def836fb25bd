#include <gtest/gtest.h>

#include <filesystem>

#include "solartrack/dataset.hpp"
#include "solartrack/rng.hpp"

using namespace solartrack;
using namespace solartrack::dataset;
namespace fs = std::filesystem;

namespace {

EventRecord record(const std::string& id, const std::string& start, const std::string& end, EventType t = EventType::AR) {
  EventRecord r;
  r.event_id = id;
  r.event_type = t;
  r.source = t == EventType::AR ? Source::HMI : Source::SPOCA;
  r.start_time = parse_timestamp(start);
  r.end_time = parse_timestamp(end);
  r.hpc_box = BBox(-100, -50, 100, 50);
  return r;
}

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("solartrack_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Timestamp, ParseAndFormat) {
  const auto t = parse_timestamp("2017-03-01T04:05:06.250Z");
  EXPECT_EQ(format_timestamp(t), "2017-03-01T04:05:06.250");
  EXPECT_EQ(compact_timestamp(t), "20170301T040506");
  EXPECT_EQ(parse_timestamp("2017-03-01 04:05:06"), parse_timestamp("2017-03-01T04:05:06"));
  EXPECT_EQ(year_of(t), 2017);
  EXPECT_THROW((void)parse_timestamp("2017-02-30T00:00:00"), ParseError);
  EXPECT_THROW((void)parse_timestamp("yesterday"), ParseError);
}

TEST(Records, GroupingDropsShortTracksAndSorts) {
  const std::vector<EventRecord> rs{
      record("B", "2017-01-01T08:00:00", "2017-01-01T12:00:00"), record("A", "2017-01-01T00:00:00", "2017-01-01T04:00:00"),
      record("B", "2017-01-01T00:00:00", "2017-01-01T04:00:00"), record("A", "2017-01-01T04:00:00", "2017-01-01T08:00:00"),
      record("B", "2017-01-01T04:00:00", "2017-01-01T08:00:00")};
  const auto tracks = group_records(rs);
  ASSERT_EQ(tracks.size(), 1u);
  EXPECT_EQ(tracks[0].event_id, "B");
  ASSERT_EQ(tracks[0].records.size(), 3u);
  EXPECT_EQ(tracks[0].records[0].start_time, parse_timestamp("2017-01-01T00:00:00"));
  EXPECT_EQ(tracks[0].records[2].start_time, parse_timestamp("2017-01-01T08:00:00"));
}

TEST(Records, MixedTypesInOneTrackRejected) {
  const std::vector<EventRecord> rs{record("A", "2017-01-01T00:00:00", "2017-01-01T01:00:00"),
                                    record("A", "2017-01-01T01:00:00", "2017-01-01T02:00:00", EventType::CH)};
  EXPECT_THROW((void)group_records(rs), ValidationError);
}

TEST(Records, StartAfterEndRejected) {
  EXPECT_THROW(record("A", "2017-01-02T00:00:00", "2017-01-01T00:00:00").validate(), ValidationError);
}

TEST(Timeline, FiveSampleTimes) {
  const auto ts = sample_times(parse_timestamp("2017-01-01T00:00:00"), parse_timestamp("2017-01-01T04:00:00"));
  ASSERT_EQ(ts.size(), 5u);
  EXPECT_EQ(format_timestamp(ts[1]), "2017-01-01T01:00:00");
  EXPECT_EQ(format_timestamp(ts[4]), "2017-01-01T04:00:00");
  const auto t0 = parse_timestamp("2017-01-01T00:00:00");
  EXPECT_EQ(sample_times(t0, t0).size(), 1u);
}

TEST(Timeline, SharedBoundariesAppearOnce) {
  EventTrack t{"A",
               {record("A", "2017-01-01T00:00:00", "2017-01-01T04:00:00"),
                record("A", "2017-01-01T04:00:00", "2017-01-01T08:00:00"),
                record("A", "2017-01-01T08:00:00", "2017-01-01T12:00:00")}};
  const auto tl = assemble_timeline(t);
  EXPECT_EQ(tl.times.size(), 13u);
  EXPECT_EQ(tl.record_frame, (std::vector<std::size_t>{0, 4, 8}));
}

TEST(Annotations, FormatRoundsHalfUp) {
  const auto a = Annotation::from_box(3, BBox(1.5, 2.49, 10.5, 20.51));
  EXPECT_EQ(format_annotation(a), "3,2,11,11,2,2,2,21,21");
}

TEST(Annotations, ParseSerializeIsByteStable) {
  Rng rng(23);
  std::string text;
  for (int i = 0; i < 300; ++i) {
    const int x1 = static_cast<int>(rng.below(400)), y1 = static_cast<int>(rng.below(400));
    const int w = 1 + static_cast<int>(rng.below(100)), h = 1 + static_cast<int>(rng.below(100));
    text += format_annotation(Annotation::from_box(i, BBox(x1, y1, x1 + w, y1 + h))) + "\n";
  }
  EXPECT_EQ(write_annotations(parse_annotations(text)), text);
}

TEST(Annotations, ParseErrorsCarryLineNumbers) {
  try {
    (void)parse_annotations("0,1,2,2,1,1,1,2,2\n1,1,2,2,1,1,1,2\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2u);
  }
  EXPECT_THROW((void)parse_annotations("0,1,2,2,1,1,1,2,2\n0,1,2,2,1,1,1,2,2\n"), ParseError);  // duplicate
  EXPECT_THROW((void)parse_annotations("0,1,1,1,1,1,1,2,2\n"), ParseError);                    // degenerate
  EXPECT_THROW((void)parse_annotations("0,a,2,2,1,1,1,2,2\n"), ParseError);
}

TEST(Screening, BlackThresholdBoundary) {
  Image dim(4, 4), ok(4, 4);
  for (auto& v : dim.pixels()) v = 0.019f;
  for (auto& v : ok.pixels()) v = 0.021f;
  EXPECT_EQ(screen_image(&dim), ScreenResult::black);
  EXPECT_EQ(screen_image(&ok), ScreenResult::ok);
  EXPECT_EQ(screen_image(std::optional<Image>{}), ScreenResult::missing);
}

TEST(Labels, HekBoxAndChainInscribed) {
  solarcoord::ImageHeader h;
  h.cdelt1 = h.cdelt2 = 40.0;
  h.crpix1 = h.crpix2 = 32.5;
  h.width = h.height = 64;
  EventRecord r = record("C", "2017-09-01T00:00:00", "2017-09-01T02:00:00", EventType::CH);
  r.hpc_box = BBox(-100, -300, 100, -100);
  const BBox outer = label_box(r, LabelMode::hek_box, h);
  EXPECT_DOUBLE_EQ(outer.x1(), 29.0);
  EXPECT_DOUBLE_EQ(outer.x2(), 34.0);
  EXPECT_DOUBLE_EQ(outer.y1(), 34.0);
  EXPECT_DOUBLE_EQ(outer.y2(), 39.0);
  EXPECT_THROW((void)label_box(r, LabelMode::chain_inscribed, h), ValidationError);
  // octagon with 40 arcsec (one pixel) corner cuts
  r.chain_code = Polygon({{-60, -300}, {60, -300}, {100, -260}, {100, -140}, {60, -100}, {-60, -100}, {-100, -140}, {-100, -260}});
  const BBox inner = label_box(r, LabelMode::chain_inscribed, h);
  EXPECT_TRUE(inner.x1() >= outer.x1() && inner.x2() <= outer.x2() && inner.y1() >= outer.y1() && inner.y2() <= outer.y2());
  EXPECT_LT(inner.area(), outer.area());
  EXPECT_DOUBLE_EQ(inner.area(), 20.0);
}

TEST(Split, ByYear) {
  auto track = [&](const std::string& id, const std::string& start) {
    return EventTrack{id, {record(id, start, start)}};
  };
  const std::vector<EventTrack> ts{track("a", "2016-05-01T00:00:00"), track("b", "2017-12-31T23:59:59"),
                                   track("c", "2018-01-01T00:00:00"), track("d", "2019-01-01T00:00:00")};
  const auto s = split_by_year(ts);
  ASSERT_EQ(s.train.size(), 2u);
  ASSERT_EQ(s.test.size(), 1u);
  EXPECT_EQ(s.test[0].event_id, "c");
}

TEST(EventCsv, RoundTripWithChainSidecars) {
  auto dir = temp_dir("records");
  std::vector<EventRecord> rs{record("AR/1", "2017-01-01T00:00:00", "2017-01-01T04:00:00"),
                              record("AR/1", "2017-01-01T04:00:00", "2017-01-01T08:00:00")};
  rs[1].hpc_box = BBox(-0.1, 1.0 / 3.0, 7.25, 9);
  rs[1].chain_code = Polygon({{0, 0}, {10.5, 0}, {10.5, 1e-3}});
  write_records(dir, rs);
  EXPECT_EQ(read_records(dir), rs);
  fs::remove_all(dir);
}

TEST(EventCsv, BadRowsNamed) {
  const std::string head(kEventCsvHeader);
  EXPECT_THROW((void)parse_event_csv("nope\n"), ParseError);
  try {
    (void)parse_event_csv(head + "\nA,AR,HMI,2017-01-01T00:00:00,2017-01-01T01:00:00,x,0,1,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2u);
    EXPECT_NE(std::string(e.what()).find("x1"), std::string::npos);
  }
}

TEST(Sequence, SaveLoadRoundTrip) {
  auto dir = temp_dir("sequence");
  Sequence s;
  for (int i = 0; i < 3; ++i) {
    Image img(8, 6);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 8; ++x) img.at(x, y) = static_cast<float>(pgm::quantize((x + y + i) / 20.0) / 255.0);
    s.frames.push_back(img);
  }
  s.annotations.emplace(0, Annotation::from_box(0, BBox(1, 1, 4, 3)));
  s.annotations.emplace(2, Annotation::from_box(2, BBox(2, 1, 5, 3)));
  s.meta.event_id = "seq";
  s.meta.event_type = EventType::CH;
  s.meta.header.width = 8;
  s.meta.header.height = 6;
  s.meta.header.crpix1 = 4.5;
  s.meta.header.crpix2 = 3.5;
  s.meta.header.obs_time = parse_timestamp("2018-02-03T04:05:06");
  save_sequence(dir, s);
  const Sequence back = load_sequence(dir);
  EXPECT_EQ(back.frames.size(), 3u);
  EXPECT_EQ(back.frames[2].pixels(), s.frames[2].pixels());
  EXPECT_EQ(back.annotations, s.annotations);
  EXPECT_EQ(back.meta.header, s.meta.header);
  EXPECT_EQ(back.meta.event_type, EventType::CH);
  EXPECT_THROW((void)load_sequence(dir, LabelMode::chain_inscribed), ValidationError);
  fs::remove_all(dir);
}

TEST(Sequence, AnnotationOutOfRangeRejected) {
  Sequence s;
  s.frames.emplace_back(4, 4);
  s.annotations.emplace(3, Annotation::from_box(3, BBox(0, 0, 1, 1)));
  EXPECT_THROW(s.validate(), ValidationError);
}
