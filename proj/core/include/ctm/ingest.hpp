#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/tiff.hpp"
#include "ctm/types.hpp"

namespace ctm {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// CTC lineage files: one `L B E P` record per line.

TrackTable parse_ctc_tracks(std::istream& in, const std::string& source);
TrackTable read_ctc_tracks(const fs::path& path);
void write_ctc_tracks(std::ostream& out, const TrackTable& tracks);
void write_ctc_tracks(const fs::path& path, const TrackTable& tracks);

// ---------------------------------------------------------------------------
// Plain-text label matrices (see docs/formats.md):
//
//   P2L
//   <width> <height> <maxlabel>
//   <row 0: width integers separated by single spaces>
//   ...
//
// Readers accept any whitespace between tokens.

LabelFrame parse_text_mask(std::istream& in, Frame frame, const std::string& source);
LabelFrame read_text_mask(const fs::path& path, Frame frame);
void write_text_mask(std::ostream& out, const LabelFrame& image);
void write_text_mask(const fs::path& path, const LabelFrame& image);

/// A per-frame file `<prefix><digits>.<tif|tiff|txt>`.
struct FrameFile {
  Frame index = 0;
  fs::path path;
};

/// Frame files in `dir` whose stem is `prefix` followed only by digits,
/// sorted by index. Zero-padding width is not significant.
std::vector<FrameFile> list_frame_files(const fs::path& dir, std::string_view prefix);

struct FrameReadOptions {
  /// Require indices to form a gap-free range (false for sparse SEG annotations).
  bool contiguous = true;
};

/// Decodes every frame file (TIFF or text) sorted by index. Throws on a
/// missing index, inconsistent dimensions or an unsupported encoding.
std::vector<LabelFrame> read_label_frames(const fs::path& dir, std::string_view prefix,
                                          const FrameReadOptions& options = {});

// ---------------------------------------------------------------------------
// CTC directory layout.

enum class DatasetKind { ctc_masks, mot_boxes };

struct DatasetHandle {
  DatasetKind kind = DatasetKind::ctc_masks;
  std::string sequence;
  Frame frame_count = 0;
  fs::path tracks_file;   // man_track.txt / res_track.txt / CSV
  fs::path frames_dir;    // empty for MOT
  std::string frame_prefix;
};

/// Recognises `<seq>_GT` (TRA/man_track.txt), `<seq>_GT/TRA`, `<seq>_RES`
/// (res_track.txt) and MOT CSV files. Throws IoError when nothing matches.
DatasetHandle probe_dataset(const fs::path& path);

struct CtcSequence {
  DatasetHandle handle;
  TrackTable tracks;
  std::vector<LabelFrame> frames;
};

CtcSequence read_ctc_sequence(const fs::path& path);

/// Sparse SEG annotations from `<seq>_GT/SEG/man_seg*.tif`; empty if absent.
std::vector<LabelFrame> read_seg_frames(const fs::path& gt_dir);

/// Writes `res_track.txt` and `mask<T>.tif` (3-digit padding below 1000 frames, else 4).
void write_ctc_result(const TrackTable& tracks, std::span<const LabelFrame> frames, const fs::path& dir,
                      tiff::Compression compression = tiff::Compression::deflate);

// ---------------------------------------------------------------------------
// MOT CSV: `frame,id,x,y,w,h[,...]`, frames 1-based on disk.

/// Decimal with at most three fractional digits; more digits round half away from zero.
Milli parse_milli(std::string_view text);
/// Shortest form: no trailing zeros, no trailing point ("10", "10.5", "-0.125").
std::string format_milli(Milli value);

struct MotData {
  std::vector<BoxDetection> boxes;  // sorted by (frame, id)
  TrackTable tracks;                // parents are always 0
  std::vector<std::string> warnings;
  Frame n_frames = 0;               // last frame + 1
};

struct MotReadOptions {
  /// Split tracks with temporal gaps into fragments with fresh ids.
  bool strict = false;
};

MotData parse_mot_boxes(std::istream& in, const std::string& source, const MotReadOptions& options = {});
MotData read_mot_boxes(const fs::path& path, const MotReadOptions& options = {});
void write_mot_boxes(std::ostream& out, std::span<const BoxDetection> boxes);
void write_mot_boxes(const fs::path& path, std::span<const BoxDetection> boxes);

}  // namespace ctm
