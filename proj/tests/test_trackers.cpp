#include <gtest/gtest.h>

#include "solartrack/synthgen.hpp"
#include "solartrack/trackers.hpp"

using namespace solartrack;
using namespace solartrack::trackers;

namespace {

Image blob_frame(double cx, double cy) {
  Image img(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) {
      const double dx = (x + 0.5 - cx) / 3.0, dy = (y + 0.5 - cy) / 2.0;
      img.at(x, y) = static_cast<float>(0.2 + 0.6 * std::exp(-0.5 * (dx * dx + dy * dy)));
    }
  return img;
}

}  // namespace

TEST(StaticTracker, RepeatsInitialBox) {
  StaticTracker t;
  const BBox b(10, 10, 20, 16);
  t.init(blob_frame(15, 13), b);
  EXPECT_EQ(t.step(blob_frame(17, 13)), b);
  EXPECT_EQ(t.step(blob_frame(19, 13)), b);
}

TEST(StaticTracker, ClampsInitialBox) {
  StaticTracker t;
  t.init(blob_frame(15, 13), BBox(-5, -5, 10, 10));
  EXPECT_EQ(t.state()->previous_box, BBox(0, 0, 10, 10));
}

TEST(Tracker, Misuse) {
  StaticTracker t;
  EXPECT_THROW((void)t.step(blob_frame(1, 1)), ValidationError);
  EXPECT_THROW(t.init(blob_frame(1, 1), BBox(60, 60, 70, 70)), ValidationError);
  t.init(blob_frame(15, 13), BBox(10, 10, 20, 16));
  EXPECT_THROW((void)t.step(Image(10, 10)), ValidationError);
}

TEST(Ncc, IdenticalPatchesScoreOne) {
  const Image a = blob_frame(20, 20);
  EXPECT_NEAR(*ncc(a, a), 1.0, 1e-12);
  Image flat(48, 48);
  EXPECT_FALSE(ncc(a, flat).has_value());
}

TEST(Ncc, NegatedPatchScoresMinusOne) {
  const Image a = blob_frame(20, 20);
  Image b = a;
  for (auto& v : b.pixels()) v = 1.0f - v;
  EXPECT_NEAR(*ncc(a, b), -1.0, 1e-6);
}

TEST(NccTracker, FollowsIntegerShift) {
  NccTracker t;
  BBox b = BBox::from_center(20, 24, 12, 8);
  t.init(blob_frame(20, 24), b);
  for (int k = 1; k <= 5; ++k) {
    const BBox out = t.step(blob_frame(20 + 2 * k, 24 - k));
    EXPECT_EQ(out, b.translated(2 * k, -k)) << k;
  }
}

TEST(NccTracker, BeatsStaticOnDriftingBlob) {
  synth::SynthConfig c;
  c.seed = 3;
  c.drift = 1.5;
  c.noise_sigma = 0.0;
  const auto s = synth::generate(c);
  NccTracker ncc_t;
  StaticTracker static_t;
  ncc_t.init(s.frames[0], s.truth[0]);
  static_t.init(s.frames[0], s.truth[0]);
  BBox a, b;
  for (std::size_t f = 1; f < s.frames.size(); ++f) {
    a = ncc_t.step(s.frames[f]);
    b = static_t.step(s.frames[f]);
  }
  const BBox& gt = s.truth.back();
  EXPECT_GT(intersection_area(gt, a) / union_area(gt, a), intersection_area(gt, b) / union_area(gt, b));
}

TEST(NccTracker, RejectsSmallSearchFactor) { EXPECT_THROW(NccTracker(0.5), ValidationError); }
