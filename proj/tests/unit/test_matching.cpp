#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ctm/matching.hpp"
#include "oracles.hpp"
#include "synth.hpp"

namespace {

using ctm::LabelFrame;
using ctm::TrackId;
using ctm::TrackTable;

TrackTable tracks_for(std::span<const LabelFrame> frames) {
  std::map<TrackId, std::pair<ctm::Frame, ctm::Frame>> span;
  for (const auto& o : ctm::occurrences_of(frames)) {
    auto [it, fresh] = span.try_emplace(o.id, o.frame, o.frame);
    if (!fresh) it->second.second = o.frame;
  }
  std::vector<ctm::TrackRecord> recs;
  for (auto [id, s] : span) recs.push_back({id, s.first, s.second, 0});
  return TrackTable(std::move(recs));
}

LabelFrame row(std::vector<std::uint32_t> labels) {
  const auto w = static_cast<std::int32_t>(labels.size());
  return {0, w, 1, std::move(labels)};
}

double tp_sum(const ctm::MatchedSequence& m) {
  double s = 0.0;
  for (const auto& e : m.tp) s += e.jaccard;
  return s;
}

TEST(Overlaps, CountsIntersection) {
  const std::vector<LabelFrame> gt{row({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0})};
  const std::vector<LabelFrame> pr{row({0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 0})};
  const auto t = ctm::compute_overlaps(gt, pr);
  ASSERT_EQ(t.frames.size(), 1u);
  EXPECT_EQ(t.frames[0].pairs, (std::vector<ctm::OverlapEntry>{{1, 1, 6}}));
  EXPECT_EQ(t.frames[0].gt_size(1), 10);
  EXPECT_EQ(t.frames[0].pr_size(1), 7);
}

TEST(Overlaps, DisjointAndMismatch) {
  const std::vector<LabelFrame> gt{row({1, 1, 0, 0})}, pr{row({0, 0, 2, 2})};
  EXPECT_TRUE(ctm::compute_overlaps(gt, pr).frames[0].pairs.empty());
  const std::vector<LabelFrame> wide{row({0, 0, 2, 2, 0})};
  EXPECT_THROW(ctm::compute_overlaps(gt, wide), std::invalid_argument);
  const std::vector<LabelFrame> two{row({1, 1, 0, 0}), row({1, 1, 0, 0})};
  EXPECT_THROW(ctm::compute_overlaps(two, pr), std::invalid_argument);
}

TEST(Overlaps, MatchesPixelBruteForce) {
  ctmtest::Rng rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<LabelFrame> gt, pr;
    for (int f = 0; f < 3; ++f) {
      gt.push_back(ctmtest::random_label_frame(rng, 32, 32, 8, 1));
      pr.push_back(ctmtest::random_label_frame(rng, 32, 32, 8, 50));
      gt.back().frame = pr.back().frame = f;
    }
    const auto t = ctm::compute_overlaps(gt, pr);
    for (int f = 0; f < 3; ++f) {
      std::map<std::pair<TrackId, TrackId>, std::int64_t> inter;
      std::map<TrackId, std::int64_t> gs, ps;
      for (std::size_t k = 0; k < gt[f].labels.size(); ++k) {
        const auto g = gt[f].labels[k], p = pr[f].labels[k];
        if (g) ++gs[g];
        if (p) ++ps[p];
        if (g && p) ++inter[{p, g}];
      }
      const auto& fo = t.frames[f];
      ASSERT_EQ(fo.pairs.size(), inter.size());
      for (const auto& e : fo.pairs) EXPECT_EQ(inter.at({e.pr, e.gt}), e.intersection);
      ASSERT_EQ(fo.gt.size(), gs.size());
      for (const auto& s : fo.gt) EXPECT_EQ(gs.at(s.id), s.size);
      ASSERT_EQ(fo.pr.size(), ps.size());
      for (const auto& s : fo.pr) EXPECT_EQ(ps.at(s.id), s.size);
    }
  }
}

TEST(CtcMatching, StrictMajority) {
  const std::vector<LabelFrame> gt{row({1, 1, 1, 1, 1, 1, 1, 1, 1, 1})};
  const std::vector<LabelFrame> six{row({2, 2, 2, 2, 2, 2, 0, 0, 0, 0})};
  const std::vector<LabelFrame> five{row({2, 2, 2, 2, 2, 0, 0, 0, 0, 0})};
  auto m = ctm::match_ctc(ctm::compute_overlaps(gt, six), tracks_for(gt), tracks_for(six));
  ASSERT_EQ(m.tp.size(), 1u);
  EXPECT_DOUBLE_EQ(m.tp[0].jaccard, 0.6);
  EXPECT_TRUE(m.fn.empty());
  m = ctm::match_ctc(ctm::compute_overlaps(gt, five), tracks_for(gt), tracks_for(five));
  EXPECT_TRUE(m.tp.empty());
  EXPECT_EQ(m.fn.size(), 1u);
  EXPECT_EQ(m.fp.size(), 1u);
}

TEST(CtcMatching, OneDetectionCoversBothDaughters) {
  const std::vector<LabelFrame> gt{row({2, 2, 2, 0, 3, 3, 3})};
  const std::vector<LabelFrame> pr{row({9, 9, 9, 9, 9, 9, 0})};
  const auto m = ctm::match_ctc(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr));
  ASSERT_EQ(m.tp.size(), 2u);
  EXPECT_EQ(m.tp[0].gt, 2u);
  EXPECT_EQ(m.tp[1].gt, 3u);
  EXPECT_TRUE(m.fp.empty());
  EXPECT_TRUE(m.fn.empty());
}

TEST(CtcMatching, AnnotationsMatchedAtMostOnce) {
  ctmtest::Rng rng(32);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<LabelFrame> gt{ctmtest::random_label_frame(rng, 24, 24, 10, 1)};
    std::vector<LabelFrame> pr{ctmtest::random_label_frame(rng, 24, 24, 10, 1)};
    const auto m = ctm::match_ctc(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr));
    std::set<TrackId> seen;
    for (const auto& e : m.tp) EXPECT_TRUE(seen.insert(e.gt).second);
    EXPECT_EQ(m.annotation_count(), ctm::occurrences_of(gt).size());
  }
}

TEST(CtcMatching, RejectsExactBoxes) {
  const std::vector<ctm::BoxDetection> b{{0, 1, 0, 0, 1000, 1000}};
  const auto t = ctm::compute_box_overlaps(b, b, 1);
  EXPECT_THROW(ctm::match_ctc(t, TrackTable({{1, 0, 0, 0}}), TrackTable({{1, 0, 0, 0}})), std::invalid_argument);
}

TEST(Bijective, DiagonalOptimum) {
  const std::vector<LabelFrame> gt{ctmtest::paint(20, 4, {{0, 0, 10, 4, 1}, {10, 0, 20, 4, 2}})};
  const std::vector<LabelFrame> pr{ctmtest::paint(20, 4, {{1, 0, 10, 4, 5}, {10, 0, 19, 4, 6}})};
  const auto m = ctm::match_bijective(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr));
  ASSERT_EQ(m.tp.size(), 2u);
  EXPECT_EQ(m.tp[0].pr, 5u);
  EXPECT_EQ(m.tp[0].gt, 1u);
  EXPECT_DOUBLE_EQ(tp_sum(m), 1.8);
  EXPECT_FALSE(m.tp[0].jaccard <= 0.5);
}

TEST(Bijective, ThresholdIsStrict) {
  const std::vector<LabelFrame> gt{row({1, 1, 1, 1, 0, 0})};
  const std::vector<LabelFrame> pr{row({0, 0, 2, 2, 2, 2})};
  auto m = ctm::match_bijective(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr), 1.0 / 3.0);
  EXPECT_TRUE(m.tp.empty());
  EXPECT_EQ(m.fp.size() + m.fn.size(), 2u);
  m = ctm::match_bijective(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr), 0.3);
  EXPECT_EQ(m.tp.size(), 1u);
}

TEST(BijectiveProperty, OptimalAgainstExhaustiveEnumeration) {
  ctmtest::Rng rng(33);
  for (int rep = 0; rep < 300; ++rep) {
    auto [g, p] = ctmtest::jittered_frame(rng);
    const std::vector<LabelFrame> gt{g}, pr{p};
    const auto table = ctm::compute_overlaps(gt, pr);
    for (double threshold : {0.5, 0.2}) {
      const auto m = ctm::match_bijective(table, tracks_for(gt), tracks_for(pr), threshold);
      EXPECT_NEAR(tp_sum(m), ctmtest::exhaustive_frame_optimum(table.frames[0], threshold), 1e-9);
      std::set<TrackId> prs, gts;
      for (const auto& e : m.tp) {
        EXPECT_TRUE(prs.insert(e.pr).second);
        EXPECT_TRUE(gts.insert(e.gt).second);
        EXPECT_GT(e.jaccard, threshold);
      }
      EXPECT_EQ(m.tp.size() + m.fn.size(), table.frames[0].gt.size());
      EXPECT_EQ(m.tp.size() + m.fp.size(), table.frames[0].pr.size());
    }
  }
}

TEST(Boxes, ExactAreasAndRaster) {
  const std::vector<ctm::BoxDetection> gt{{0, 1, 0, 0, 10000, 10000}};
  const std::vector<ctm::BoxDetection> pr{{0, 4, 5000, 5000, 10000, 10000}};
  const auto t = ctm::compute_box_overlaps(gt, pr, 2);
  ASSERT_EQ(t.frames.size(), 2u);
  EXPECT_EQ(t.geometry, ctm::Geometry::boxes);
  ASSERT_EQ(t.frames[0].pairs.size(), 1u);
  EXPECT_EQ(t.frames[0].pairs[0].intersection, 25'000'000);
  const auto m = ctm::match_bijective(t, TrackTable({{1, 0, 0, 0}}), TrackTable({{4, 0, 0, 0}}), 0.1);
  ASSERT_EQ(m.tp.size(), 1u);
  EXPECT_DOUBLE_EQ(m.tp[0].jaccard, 25.0 / 175.0);
  EXPECT_FALSE(m.pixel_geometry);

  const std::vector<ctm::BoxDetection> a{{0, 1, 400, 0, 1000, 2000}};
  const std::vector<ctm::BoxDetection> b{{0, 2, 600, 0, 1000, 2000}};
  const auto r = ctm::rasterize_box_overlaps(a, b, 1);
  EXPECT_EQ(r.geometry, ctm::Geometry::raster);
  EXPECT_EQ(r.frames[0].gt_size(1), 2);
  EXPECT_EQ(r.frames[0].pr_size(2), 2);
  EXPECT_TRUE(r.frames[0].pairs.empty());
}

TEST(Matching, DeterministicAcrossRuns) {
  ctmtest::Rng rng(34);
  std::vector<LabelFrame> gt, pr;
  for (int f = 0; f < 8; ++f) {
    auto [g, p] = ctmtest::jittered_frame(rng);
    g.frame = p.frame = f;
    gt.push_back(g);
    pr.push_back(p);
  }
  const auto t = ctm::compute_overlaps(gt, pr);
  for (auto mode : {ctm::MatchMode::ctc, ctm::MatchMode::hungarian}) {
    const auto a = ctm::match(t, tracks_for(gt), tracks_for(pr), mode);
    const auto b = ctm::match(ctm::compute_overlaps(gt, pr), tracks_for(gt), tracks_for(pr), mode);
    EXPECT_EQ(a.tp, b.tp);
    EXPECT_EQ(a.fp, b.fp);
    EXPECT_EQ(a.fn, b.fn);
  }
}

}  // namespace
