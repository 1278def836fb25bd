#include <gtest/gtest.h>

#include <vector>

#include "solartrack/metrics.hpp"
#include "solartrack/rng.hpp"
#include "support/oracles.hpp"

using namespace solartrack;
using namespace solartrack::metrics;

TEST(Overlap, WorkedExample) {
  const BBox gt(0, 0, 4, 4), pred(2, 0, 6, 4);
  EXPECT_DOUBLE_EQ(iou(gt, pred), 8.0 / 24.0);
  EXPECT_DOUBLE_EQ(iogt(gt, pred), 0.5);
  EXPECT_DOUBLE_EQ(atb(gt, pred), 1.0);
  const auto pr = area_f1(gt, pred);
  EXPECT_DOUBLE_EQ(pr.precision, 0.5);
  EXPECT_DOUBLE_EQ(pr.recall, 0.5);
  EXPECT_DOUBLE_EQ(pr.fscore, 0.5);
}

TEST(Overlap, ContainedPrediction) {
  const BBox gt(0, 0, 10, 10), pred(2, 2, 4, 4);
  EXPECT_DOUBLE_EQ(iou(gt, pred), 0.04);
  EXPECT_DOUBLE_EQ(iogt(gt, pred), 0.04);
  EXPECT_DOUBLE_EQ(atb(gt, pred), 0.04);
  EXPECT_DOUBLE_EQ(area_f1(gt, pred).precision, 1.0);
}

TEST(Overlap, DisjointIsZero) {
  const BBox gt(0, 0, 2, 2), pred(5, 5, 7, 7);
  EXPECT_EQ(iou(gt, pred), 0.0);
  EXPECT_EQ(area_f1(gt, pred).fscore, 0.0);
}

TEST(Overlap, DegenerateGroundTruthRejected) {
  const BBox flat(0, 0, 4, 0);
  EXPECT_THROW((void)iogt(flat, BBox(0, 0, 1, 1)), ValidationError);
  EXPECT_THROW((void)atb(flat, BBox(0, 0, 1, 1)), ValidationError);
  EXPECT_THROW((void)iou(flat, flat), ValidationError);
}

TEST(Overlap, ThresholdIsInclusive) {
  const BBox gt(0, 0, 4, 2), pred(0, 0, 2, 2);  // iou exactly 0.5
  EXPECT_TRUE(is_match(gt, pred, 0.5));
  EXPECT_FALSE(is_match(gt, pred, 0.5000001));
  EXPECT_THROW((void)is_match(gt, pred, 0.0), ValidationError);
}

TEST(Overlap, MatchesCellCountingOracle) {
  Rng rng(3);
  auto coord = [&] { return static_cast<int>(rng.below(41)); };
  for (int i = 0; i < 2000; ++i) {
    int gx1 = coord(), gx2 = coord(), gy1 = coord(), gy2 = coord();
    int px1 = coord(), px2 = coord(), py1 = coord(), py2 = coord();
    if (gx1 == gx2 || gy1 == gy2 || px1 == px2 || py1 == py2) continue;
    if (gx1 > gx2) std::swap(gx1, gx2);
    if (gy1 > gy2) std::swap(gy1, gy2);
    if (px1 > px2) std::swap(px1, px2);
    if (py1 > py2) std::swap(py1, py2);
    const auto c = oracle::count_cells(gx1, gy1, gx2, gy2, px1, py1, px2, py2);
    const BBox gt(gx1, gy1, gx2, gy2), pred(px1, py1, px2, py2);
    const double u = static_cast<double>(c.gt + c.pred - c.both);
    EXPECT_NEAR(iou(gt, pred), c.both / u, 1e-12);
    EXPECT_NEAR(iogt(gt, pred), static_cast<double>(c.both) / c.gt, 1e-12);
    EXPECT_NEAR(atb(gt, pred), static_cast<double>(c.pred) / c.gt, 1e-12);
    const auto pr = area_f1(gt, pred);
    EXPECT_NEAR(pr.precision, static_cast<double>(c.both) / c.pred, 1e-12);
    EXPECT_NEAR(pr.recall, static_cast<double>(c.both) / c.gt, 1e-12);
  }
}

namespace {

std::vector<FramePair> example_frames() {
  return {
      {0, BBox(0, 0, 4, 4), BBox(0, 0, 4, 4)},   // match
      {1, BBox(0, 0, 4, 4), BBox(3, 3, 7, 7)},   // miss: fp + fn
      {2, BBox(0, 0, 4, 4), std::nullopt},       // no prediction: fn
      {3, std::nullopt, BBox(0, 0, 1, 1)},       // unannotated: ignored
      {4, BBox(0, 0, 4, 4), BBox(0, 0, 4, 3)},   // iou 0.75: match
  };
}

}  // namespace

TEST(Counting, SingleObjectRule) {
  const auto f = example_frames();
  EXPECT_EQ(count_matches(f), (MatchCounts{2, 1, 2}));
  const auto pr = fscore(f);
  EXPECT_DOUBLE_EQ(pr.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pr.recall, 0.5);
  EXPECT_DOUBLE_EQ(ota(f), 1.0 - 3.0 / 4.0);
}

TEST(Counting, NothingAnnotatedThrows) {
  const std::vector<FramePair> f{{0, std::nullopt, BBox(0, 0, 1, 1)}};
  EXPECT_THROW((void)fscore(f), ValidationError);
  EXPECT_THROW((void)aggregate(f), ValidationError);
}

TEST(Aggregate, MissingPredictionCountsAsZero) {
  const auto f = example_frames();
  const MetricReport r = aggregate(f);
  EXPECT_EQ(r.frames_evaluated, 4);
  const double iou1 = 1.0 / 31.0;  // 1 shared cell over 16 + 16 - 1
  EXPECT_DOUBLE_EQ(r.iou_mean, (1.0 + iou1 + 0.0 + 0.75) / 4.0);
  EXPECT_DOUBLE_EQ(r.iogt_mean, (1.0 + 1.0 / 16 + 0.0 + 0.75) / 4.0);
  EXPECT_DOUBLE_EQ(r.atb_mean, (1.0 + 1.0 + 0.0 + 0.75) / 4.0);
  const double f1_1 = 1.0 / 16;  // precision = recall = 1/16
  const double f1_4 = 2 * 1.0 * 0.75 / 1.75;
  EXPECT_DOUBLE_EQ(r.af1, (1.0 + f1_1 + 0.0 + f1_4) / 4.0);
  EXPECT_DOUBLE_EQ(r.ota, 0.25);
}

TEST(Aggregate, IogtCanMatchWhereIouDoesNot) {
  // pred covers gt and much more: iogt 1, iou 0.25
  const std::vector<FramePair> f{{0, BBox(0, 0, 2, 2), BBox(0, 0, 4, 4)}};
  const auto r = aggregate(f);
  EXPECT_EQ(r.fscore_iou, 0.0);
  EXPECT_EQ(r.fscore_iogt, 1.0);
  EXPECT_EQ(r.atb_mean, 4.0);
}

TEST(Identities, PrecisionEqualsRecallAndOtaRelation) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FramePair> f;
    const int n = 1 + static_cast<int>(rng.below(20));
    for (int i = 0; i < n; ++i) {
      const BBox gt = BBox::from_center(rng.uniform(10, 50), rng.uniform(10, 50), rng.uniform(2, 10), rng.uniform(2, 10));
      const BBox pred = gt.translated(rng.uniform(-6, 6), rng.uniform(-6, 6));
      f.push_back({i, gt, pred});
    }
    const auto pr = fscore(f);
    EXPECT_DOUBLE_EQ(pr.precision, pr.recall);
    EXPECT_NEAR(ota(f), 2 * pr.fscore - 1, 1e-12);
  }
}
