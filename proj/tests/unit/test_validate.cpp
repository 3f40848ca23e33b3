#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "ctm/validate.hpp"
#include "synth.hpp"

namespace {

using ctm::Occurrence;
using ctm::Rule;
using ctm::Severity;
using ctm::TrackTable;

std::vector<Rule> rules(const std::vector<ctm::Violation>& vs) {
  std::vector<Rule> out;
  for (const auto& v : vs) out.push_back(v.rule);
  return out;
}

TEST(Validate, PerfectDatasetIsClean) {
  ctmtest::Rng rng(1);
  const auto d = ctmtest::random_dataset(rng, {});
  EXPECT_TRUE(ctm::validate(d.tracks, std::span<const Occurrence>(d.occurrences)).empty());
  const auto frames = ctmtest::render(d);
  EXPECT_TRUE(ctm::validate(d.tracks, std::span<const ctm::LabelFrame>(frames)).empty());
}

TEST(Validate, MissingFrameInsideSpan) {
  const TrackTable t({{1, 3, 5, 0}});
  const std::vector<Occurrence> occ{{3, 1}, {5, 1}};
  const auto vs = ctm::validate(t, std::span<const Occurrence>(occ));
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].rule, Rule::no_gap);
  EXPECT_EQ(vs[0].frame, 4);
  EXPECT_EQ(vs[0].track, 1u);
  EXPECT_EQ(vs[0].severity, Severity::error);
}

TEST(Validate, ParentOverlap) {
  const TrackTable t({{1, 0, 3, 0}, {2, 3, 4, 1}});
  EXPECT_EQ(rules(ctm::validate_tracks(t)), std::vector<Rule>{Rule::parent_overlap});
}

TEST(Validate, StructuralRules) {
  EXPECT_EQ(rules(ctm::validate_tracks(TrackTable({{1, 2, 1, 0}}))), std::vector<Rule>{Rule::end_before_begin});
  EXPECT_EQ(rules(ctm::validate_tracks(TrackTable({{1, 0, 1, 1}}))), std::vector<Rule>{Rule::self_parent});
  EXPECT_EQ(rules(ctm::validate_tracks(TrackTable({{1, 0, 1, 4}}))), std::vector<Rule>{Rule::unknown_parent});
  EXPECT_EQ(rules(ctm::validate_tracks(TrackTable({{0, 0, 1, 0}}))), std::vector<Rule>{Rule::invalid_id});
  const auto cyc = rules(ctm::validate_tracks(TrackTable({{1, 0, 1, 2}, {2, 2, 3, 1}})));
  EXPECT_NE(std::find(cyc.begin(), cyc.end(), Rule::parent_cycle), cyc.end());
}

TEST(Validate, ParentGapIsOnlyAWarning) {
  const auto vs = ctm::validate_tracks(TrackTable({{1, 0, 1, 0}, {2, 4, 5, 1}}));
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].rule, Rule::parent_gap);
  EXPECT_EQ(vs[0].severity, Severity::warning);
  EXPECT_FALSE(ctm::has_errors(vs));
}

TEST(Validate, DirtyLabelsDependOnStrictness) {
  const TrackTable t({{1, 0, 1, 0}});
  const std::vector<Occurrence> occ{{0, 1}, {1, 1}, {2, 1}, {1, 9}};
  const auto lax = ctm::validate(t, std::span<const Occurrence>(occ));
  auto found = rules(lax);
  std::sort(found.begin(), found.end());
  EXPECT_EQ(found, (std::vector<Rule>{Rule::outside_span, Rule::unknown_label}));
  EXPECT_FALSE(ctm::has_errors(lax));
  EXPECT_TRUE(ctm::has_errors(ctm::validate(t, std::span<const Occurrence>(occ), {.strict = true})));
}

TEST(Validate, DimensionMismatch) {
  const TrackTable t({{1, 0, 1, 0}});
  std::vector<ctm::LabelFrame> frames{{0, 2, 2, {1, 0, 0, 0}}, {1, 3, 2, {1, 0, 0, 0, 0, 0}}};
  const auto r = rules(ctm::validate(t, std::span<const ctm::LabelFrame>(frames)));
  EXPECT_NE(std::find(r.begin(), r.end(), Rule::dimension_mismatch), r.end());
}

TEST(Validate, RuleNamesAreDistinct) {
  std::set<std::string_view> names;
  for (int r = 0; r <= static_cast<int>(Rule::dimension_mismatch); ++r) names.insert(ctm::rule_name(static_cast<Rule>(r)));
  EXPECT_EQ(names.size(), static_cast<std::size_t>(Rule::dimension_mismatch) + 1);
  EXPECT_EQ(ctm::rule_name(Rule::no_gap), "no-gap rule");
}

}  // namespace
