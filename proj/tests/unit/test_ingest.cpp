#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ctm/ingest.hpp"
#include "synth.hpp"

namespace {

namespace fs = std::filesystem;
using ctm::TrackRecord;
using ctm::TrackTable;

TrackTable parse_tracks(const std::string& text) {
  std::istringstream in(text);
  return ctm::parse_ctc_tracks(in, "tracks");
}

ctm::MotData parse_mot(const std::string& text, bool strict = false) {
  std::istringstream in(text);
  return ctm::parse_mot_boxes(in, "boxes", {strict});
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

TEST(CtcTracks, ParsesDaughters) {
  const auto t = parse_tracks("1 0 1 0\n2 2 2 1\n3 2 2 1\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t.daughters_of(1), (std::vector<ctm::TrackId>{2, 3}));
  EXPECT_EQ(t.parent_link_count(), 2u);
}

TEST(CtcTracks, Errors) {
  try {
    parse_tracks("1 0 1 0\n5 3 2 0\n");
    FAIL();
  } catch (const ctm::ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("end < begin"), std::string::npos);
  }
  EXPECT_THROW(parse_tracks("1 0 1 0\n1 2 3 0\n"), ctm::ParseError);
  EXPECT_THROW(parse_tracks("1 0 1 0\n2 2 3 9\n"), ctm::ParseError);
  EXPECT_THROW(parse_tracks("1 0 x 0\n"), ctm::ParseError);
  EXPECT_THROW(parse_tracks("1 0 1\n"), ctm::ParseError);
  EXPECT_THROW(parse_tracks("0 0 1 0\n"), ctm::ParseError);
}

TEST(CtcTracks, BlankLinesAndOrderDoNotMatter) {
  EXPECT_EQ(parse_tracks("\n3 2 2 1\n\n1 0 1 0\n2 2 2 1\n"), parse_tracks("1 0 1 0\n2 2 2 1\n3 2 2 1\n"));
}

TEST(CtcTracks, RoundTrip340Records) {
  ctmtest::Rng rng(5);
  ctmtest::ForestOptions o;
  o.max_tracks = 340;
  o.roots = 40;
  o.divide_prob = 0.9;
  o.n_frames = 400;
  const auto t = ctmtest::random_forest(rng, o);
  ASSERT_EQ(t.size(), 340u);
  std::vector<TrackRecord> shuffled(t.records().begin(), t.records().end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::ostringstream text;
  for (const auto& r : shuffled) text << r.id << ' ' << r.begin << ' ' << r.end << ' ' << r.parent << '\n';
  const auto parsed = parse_tracks(text.str());
  EXPECT_EQ(parsed, t);
  std::ostringstream again;
  ctm::write_ctc_tracks(again, parsed);
  EXPECT_EQ(parse_tracks(again.str()), t);
}

TEST(TextMask, ParsesAnyWhitespace) {
  std::istringstream in("P2L\n3 2 7\n0 1  7\n\t0 0 1\n");
  const auto f = ctm::parse_text_mask(in, 2, "m");
  EXPECT_EQ(f.frame, 2);
  EXPECT_EQ(f.labels, (std::vector<std::uint32_t>{0, 1, 7, 0, 0, 1}));
  std::ostringstream out;
  ctm::write_text_mask(out, f);
  EXPECT_EQ(out.str(), "P2L\n3 2 7\n0 1 7\n0 0 1\n");
}

TEST(TextMask, Errors) {
  for (const char* bad : {"P2 3 1 1\n0 0 0\n", "P2L\n2 1 1\n0\n", "P2L\n2 1 1\n0 2\n", "P2L\n1 1 1\n0 0\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(ctm::parse_text_mask(in, 0, "m"), ctm::ParseError) << bad;
  }
}

TEST(LabelFrames, ThreeFramesAndMissingIndex) {
  const fs::path dir = ctmtest::temp_dir("frames");
  for (int t = 0; t < 3; ++t) {
    ctm::LabelFrame f{t, 4, 4, std::vector<std::uint32_t>(16, 0)};
    f.labels[5] = 1;
    ctm::write_text_mask(dir / ("man_track" + std::to_string(t) + ".txt"), f);
  }
  const auto frames = ctm::read_label_frames(dir, "man_track");
  ASSERT_EQ(frames.size(), 3u);
  for (const auto& f : frames) EXPECT_EQ(std::count(f.labels.begin(), f.labels.end(), 1u), 1);

  ctm::write_text_mask(dir / "man_track3.txt", frames[0]);
  fs::remove(dir / "man_track2.txt");
  EXPECT_THROW(ctm::read_label_frames(dir, "man_track"), ctm::IoError);
  EXPECT_EQ(ctm::read_label_frames(dir, "man_track", {.contiguous = false}).size(), 3u);
  fs::remove_all(dir);
}

TEST(LabelFrames, InconsistentDimensions) {
  const fs::path dir = ctmtest::temp_dir("dims");
  ctm::write_text_mask(dir / "mask000.txt", ctm::LabelFrame{0, 2, 2, {0, 0, 0, 1}});
  ctm::write_text_mask(dir / "mask001.txt", ctm::LabelFrame{1, 3, 2, {0, 0, 0, 1, 0, 0}});
  EXPECT_THROW(ctm::read_label_frames(dir, "mask"), ctm::IoError);
  fs::remove_all(dir);
}

TEST(LabelFrames, ListIgnoresOtherFiles) {
  const fs::path dir = ctmtest::temp_dir("list");
  for (const char* n : {"mask0001.tif", "mask002.tif", "mask.tif", "maskx01.tif", "res_track.txt", "mask010.txt"}) {
    write_file(dir / n, "");
  }
  const auto files = ctm::list_frame_files(dir, "mask");
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].index, 1);
  EXPECT_EQ(files[1].index, 2);
  EXPECT_EQ(files[2].index, 10);
  fs::remove_all(dir);
}

TEST(Dataset, ProbeLayouts) {
  const fs::path data(CTM_TEST_DATA);
  const auto gt = ctm::probe_dataset(data / "ctc" / "01_GT");
  EXPECT_EQ(gt.kind, ctm::DatasetKind::ctc_masks);
  EXPECT_EQ(gt.sequence, "01");
  EXPECT_EQ(gt.frame_count, 6);
  EXPECT_EQ(gt.frame_prefix, "man_track");
  EXPECT_EQ(ctm::probe_dataset(data / "ctc" / "01_GT" / "TRA").tracks_file, gt.tracks_file);
  const auto res = ctm::probe_dataset(data / "ctc" / "01_RES");
  EXPECT_EQ(res.frame_prefix, "mask");
  EXPECT_EQ(res.sequence, "01");
  EXPECT_EQ(ctm::probe_dataset(data / "mot" / "gt.csv").kind, ctm::DatasetKind::mot_boxes);
  EXPECT_THROW(ctm::probe_dataset(data / "missing"), ctm::IoError);
  EXPECT_THROW(ctm::probe_dataset(data / "mot"), ctm::IoError);
}

TEST(Dataset, SparseSegAnnotations) {
  const auto seg = ctm::read_seg_frames(fs::path(CTM_TEST_DATA) / "ctc" / "01_GT");
  ASSERT_EQ(seg.size(), 2u);
  EXPECT_EQ(seg[0].frame, 1);
  EXPECT_EQ(seg[1].frame, 4);
  EXPECT_TRUE(ctm::read_seg_frames(fs::path(CTM_TEST_DATA) / "ctc" / "01_RES").empty());
}

TEST(Dataset, CtcResultRoundTrip) {
  const auto seq = ctm::read_ctc_sequence(fs::path(CTM_TEST_DATA) / "ctc" / "01_GT");
  const fs::path dir = fs::path(ctmtest::temp_dir("ctcrt")) / "01_RES";
  ctm::write_ctc_result(seq.tracks, seq.frames, dir);
  const auto back = ctm::read_ctc_sequence(dir);
  EXPECT_EQ(back.tracks, seq.tracks);
  EXPECT_EQ(back.frames, seq.frames);
  EXPECT_TRUE(fs::is_regular_file(dir / "mask005.tif"));

  const fs::path dir2 = fs::path(ctmtest::temp_dir("ctcrt2")) / "01_RES";
  ctm::write_ctc_result(back.tracks, back.frames, dir2);
  for (const char* n : {"res_track.txt", "mask000.tif", "mask003.tif"}) {
    std::ifstream a(dir / n, std::ios::binary), b(dir2 / n, std::ios::binary);
    EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));
  }
  fs::remove_all(dir.parent_path());
  fs::remove_all(dir2.parent_path());
}

TEST(Dataset, ReaderTotalsMatchOccurrences) {
  const auto seq = ctm::read_ctc_sequence(fs::path(CTM_TEST_DATA) / "ctc" / "01_GT");
  std::size_t instances = 0;
  for (const auto& f : seq.frames) {
    std::set<std::uint32_t> labels(f.labels.begin(), f.labels.end());
    labels.erase(0);
    instances += labels.size();
  }
  EXPECT_EQ(ctm::occurrences_of(seq.frames).size(), instances);
  EXPECT_EQ(instances, 3u * 2 + 3u * 3);
}

TEST(Milli, ParseAndFormat) {
  EXPECT_EQ(ctm::parse_milli("10"), 10000);
  EXPECT_EQ(ctm::parse_milli("-0.125"), -125);
  EXPECT_EQ(ctm::parse_milli("+3.5"), 3500);
  EXPECT_EQ(ctm::parse_milli("1.0005"), 1001);
  EXPECT_EQ(ctm::parse_milli("-1.0005"), -1001);
  EXPECT_EQ(ctm::parse_milli(".5"), 500);
  EXPECT_THROW(ctm::parse_milli("abc"), std::invalid_argument);
  EXPECT_THROW(ctm::parse_milli(""), std::invalid_argument);
  EXPECT_EQ(ctm::format_milli(10000), "10");
  EXPECT_EQ(ctm::format_milli(10500), "10.5");
  EXPECT_EQ(ctm::format_milli(-125), "-0.125");
  EXPECT_EQ(ctm::format_milli(0), "0");
}

TEST(Mot, OneTrackTwoFrames) {
  const auto d = parse_mot("1,1,0,0,10,10\n2,1,1,0,10,10\n");
  ASSERT_EQ(d.tracks.size(), 1u);
  EXPECT_EQ(d.tracks.records()[0], (TrackRecord{1, 0, 1, 0}));
  EXPECT_EQ(d.n_frames, 2);
  EXPECT_EQ(d.boxes[1].x, 1000);
}

TEST(Mot, Errors) {
  EXPECT_THROW(parse_mot("1,1,0,0,-5,10\n"), ctm::ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,5,0\n"), ctm::ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,5,5\n1,1,2,2,5,5\n"), ctm::ParseError);
  EXPECT_THROW(parse_mot("1,a,0,0,5,5\n"), ctm::ParseError);
  EXPECT_THROW(parse_mot("1,1,0,0,5\n"), ctm::ParseError);
  EXPECT_THROW(parse_mot("0,1,0,0,5,5\n"), ctm::ParseError);
}

TEST(Mot, GapsSplitOnlyWhenStrict) {
  const std::string text = "1,4,0,0,5,5\n2,4,0,0,5,5\n5,4,0,0,5,5\n";
  const auto lax = parse_mot(text);
  ASSERT_EQ(lax.tracks.size(), 1u);
  EXPECT_EQ(lax.tracks.records()[0].end, 4);
  EXPECT_TRUE(lax.warnings.empty());
  const auto strict = parse_mot(text, true);
  ASSERT_EQ(strict.tracks.size(), 2u);
  EXPECT_EQ(strict.tracks.records()[1], (TrackRecord{5, 4, 4, 0}));
  EXPECT_EQ(strict.boxes.back().id, 5u);
  EXPECT_EQ(strict.warnings.size(), 1u);
}

TEST(Mot, RoundTrip100Rows) {
  ctmtest::Rng rng(9);
  std::ostringstream text;
  std::uniform_int_distribution<int> coord(-5000, 900000), ext(1, 90000);
  for (int f = 1; f <= 20; ++f) {
    for (int id = 1; id <= 5; ++id) {
      text << f << ',' << id << ',' << ctm::format_milli(coord(rng)) << ',' << ctm::format_milli(coord(rng)) << ','
           << ctm::format_milli(ext(rng)) << ',' << ctm::format_milli(ext(rng)) << ",1,-1,-1,-1\n";
    }
  }
  const auto a = parse_mot(text.str());
  ASSERT_EQ(a.boxes.size(), 100u);
  std::ostringstream out;
  ctm::write_mot_boxes(out, a.boxes);
  const auto b = parse_mot(out.str());
  EXPECT_EQ(a.boxes, b.boxes);
  EXPECT_EQ(a.tracks, b.tracks);
  std::ostringstream out2;
  ctm::write_mot_boxes(out2, b.boxes);
  EXPECT_EQ(out.str(), out2.str());
}

}  // namespace
