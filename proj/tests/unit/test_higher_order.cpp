#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <stdexcept>

#include "builders.hpp"
#include "ctm/graph_metrics.hpp"
#include "ctm/higher_order.hpp"
#include "ctm/perturb.hpp"
#include "oracles.hpp"
#include "synth.hpp"

namespace {

using ctmtest::seq;
using ctmtest::track_tp;

TEST(Accumulator, CountsAndMargins) {
  std::vector<ctm::TpEntry> tp;
  track_tp(tp, 5, 1, 0, 1);
  track_tp(tp, 6, 1, 2, 3);
  const auto m = seq(tp, {{1, 7}, {2, 7}, {3, 5}}, {{4, 1}}, {{1, 0, 4, 0}}, {{5, 0, 3, 0}, {6, 2, 3, 0}, {7, 1, 2, 0}});
  const auto M = ctm::build_accumulator(m);
  EXPECT_EQ(M.at(5, 1), 2);
  EXPECT_EQ(M.at(6, 1), 2);
  EXPECT_EQ(M.at(0, 1), 1);
  EXPECT_EQ(M.at(7, 0), 2);
  EXPECT_EQ(M.at(5, 0), 1);
  EXPECT_EQ(M.at(7, 1), 0);
  EXPECT_EQ(M.row_sum(5), 3);
  EXPECT_EQ(M.row_sum(0), 1);
  EXPECT_EQ(M.col_sum(1), 5);
  EXPECT_EQ(M.col_sum(0), 3);
  EXPECT_EQ(M.tp(), 4);
  EXPECT_EQ(M.fp(), 3);
  EXPECT_EQ(M.fn(), 1);
  EXPECT_EQ(M.row_ids(), (std::vector<ctm::TrackId>{0, 5, 6, 7}));
}

TEST(AccumulatorProperty, AgreesWithDirectCounting) {
  ctmtest::Rng rng(71);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = ctmtest::random_matched(rng, {});
    std::map<std::pair<ctm::TrackId, ctm::TrackId>, std::int64_t> direct;
    for (const auto& e : m.tp) ++direct[{e.pr, e.gt}];
    for (const auto& e : m.fp) ++direct[{e.pr, 0}];
    for (const auto& e : m.fn) ++direct[{0, e.gt}];
    const auto M = ctm::build_accumulator(m);
    std::int64_t cells = 0;
    for (auto r : M.row_ids()) {
      for (const auto& c : M.row(r)) {
        ASSERT_EQ(c.count, (direct[{r, c.gt}]));
        ++cells;
      }
    }
    ASSERT_EQ(cells, static_cast<std::int64_t>(direct.size()));
  }
}

TEST(Chota, DivisionWithoutParentLinks) {
  // gt: 1 divides into 2 and 3; pr reproduces every detection but no parent links.
  std::vector<ctm::TpEntry> tp;
  track_tp(tp, 1, 1, 0, 1);
  track_tp(tp, 2, 2, 2, 3);
  track_tp(tp, 3, 3, 2, 3);
  const auto m = seq(tp, {}, {}, {{1, 0, 1, 0}, {2, 2, 3, 1}, {3, 2, 3, 1}}, {{1, 0, 1, 0}, {2, 2, 3, 0}, {3, 2, 3, 0}});
  EXPECT_DOUBLE_EQ(*ctm::chota(m), 2.0 / 3.0);
  EXPECT_EQ(*ctm::hota(m), 1.0);
  const auto linked = seq(tp, {}, {}, {{1, 0, 1, 0}, {2, 2, 3, 1}, {3, 2, 3, 1}}, {{1, 0, 1, 0}, {2, 2, 3, 1}, {3, 2, 3, 1}});
  EXPECT_EQ(*ctm::chota(linked), 1.0);
}

TEST(Chota, MidTrackIdSwitch) {
  std::vector<ctm::TpEntry> tp;
  track_tp(tp, 5, 1, 0, 1);
  track_tp(tp, 6, 1, 2, 3);
  const auto m = seq(tp, {}, {}, {{1, 0, 3, 0}}, {{5, 0, 1, 0}, {6, 2, 3, 0}});
  EXPECT_DOUBLE_EQ(*ctm::hota(m), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(*ctm::chota(m), std::sqrt(0.5));
  const auto s = ctm::higher_order(m);
  EXPECT_EQ(*s.deta, 1.0);
  EXPECT_DOUBLE_EQ(*s.assa, 0.5);
}

TEST(Chota, Undefined) {
  EXPECT_FALSE(ctm::chota(seq({}, {}, {}, {}, {}, 3)).defined());
  EXPECT_EQ(*ctm::chota(seq({}, {{0, 1}}, {{0, 2}}, {{2, 0, 0, 0}}, {{1, 0, 0, 0}})), 0.0);
  EXPECT_FALSE(ctm::higher_order(seq({}, {{0, 1}}, {}, {}, {{1, 0, 0, 0}})).assa.defined());
}

TEST(ChotaProperty, AccumulatorEqualsNaiveAndLiteral) {
  ctmtest::Rng rng(72);
  for (int rep = 0; rep < 300; ++rep) {
    ctmtest::ForestOptions o{.max_tracks = 15, .n_frames = 20, .roots = 3, .divide_prob = 0.7, .max_length = 6};
    const auto m = rep % 2 ? ctmtest::random_perturbed(rng, o) : ctmtest::random_matched(rng, {.gt = o, .pr = o});
    for (bool lineage : {true, false}) {
      const auto fast = ctm::higher_order(m, lineage).score;
      const auto naive = ctm::naive_chota(m, lineage);
      ASSERT_EQ(fast.defined(), naive.defined());
      if (!fast.defined()) continue;
      ASSERT_NEAR(*fast, *naive, 1e-12) << rep;
      ASSERT_NEAR(*fast, ctmtest::literal_chota(m, lineage), 1e-12) << rep;
    }
  }
}

TEST(ChotaProperty, ReducesToHotaWithoutParentLinks) {
  ctmtest::Rng rng(73);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = ctm::strip_parents(ctmtest::random_perturbed(rng, {.max_tracks = 30, .n_frames = 40}));
    const auto c = ctm::chota(m), h = ctm::hota(m);
    ASSERT_EQ(c.defined(), h.defined());
    if (c.defined()) ASSERT_NEAR(*c, *h, 1e-12);
  }
}

TEST(ChotaProperty, DecompositionAndRange) {
  ctmtest::Rng rng(74);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = ctmtest::random_perturbed(rng, {.max_tracks = 30, .n_frames = 40});
    for (bool lineage : {true, false}) {
      const auto s = ctm::higher_order(m, lineage);
      if (!s.score.defined()) continue;
      ASSERT_GE(*s.score, 0.0);
      ASSERT_LE(*s.score, 1.0);
      if (s.assa.defined()) ASSERT_NEAR(*s.deta * *s.assa, *s.score * *s.score, 1e-12);
    }
  }
}

TEST(ChotaProperty, PerfectResultScoresOne) {
  ctmtest::Rng rng(75);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = ctm::perfect_result(ctmtest::random_dataset(rng, {}));
    EXPECT_EQ(*ctm::chota(m), 1.0);
    EXPECT_EQ(*ctm::hota(m), 1.0);
  }
}

TEST(ChotaProperty, MissingMitosisPenalizedOnlyByChota) {
  const auto perfect = ctm::perfect_result(ctmtest::dividing_dataset(2, 4, 5));
  const auto broken = ctm::apply(perfect, {ctm::ErrorKind::remove_mitosis, 1000, 9}).result;
  EXPECT_EQ(broken.pr_tracks.parent_link_count(), 0u);
  EXPECT_EQ(*ctm::hota(broken), 1.0);
  EXPECT_LT(*ctm::chota(broken), 0.8);
  EXPECT_GT(*ctm::tra(broken), 0.95);
}

TEST(NaiveChota, RefusesLargeInputs) {
  std::vector<ctm::FpEntry> fp;
  for (ctm::Frame f = 0; f <= static_cast<ctm::Frame>(ctm::kNaiveLimit); ++f) fp.push_back({f, 1});
  const auto m = seq({}, fp, {}, {}, {{1, 0, static_cast<ctm::Frame>(ctm::kNaiveLimit), 0}});
  EXPECT_THROW(ctm::naive_chota(m), std::length_error);
  EXPECT_EQ(*ctm::chota(m), 0.0);
}

}  // namespace
