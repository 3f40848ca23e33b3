#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ctm/ingest.hpp"
#include "ctm/matched.hpp"
#include "ctm/options.hpp"
#include "ctm/perturb.hpp"
#include "ctm/validate.hpp"

namespace ctmcli {

namespace fs = std::filesystem;

/// One sequence as loaded from disk: masks or boxes, never both.
struct Sequence {
  ctm::DatasetHandle handle;
  ctm::TrackTable tracks;
  std::vector<ctm::LabelFrame> frames;
  std::vector<ctm::BoxDetection> boxes;
  ctm::Frame n_frames = 0;
  std::vector<std::string> warnings;

  bool masks() const noexcept { return handle.kind == ctm::DatasetKind::ctc_masks; }
  std::vector<ctm::Occurrence> occurrences() const;
  ctm::TrackingData tracking_data() const;
};

Sequence load_sequence(const fs::path& path, bool strict);

std::vector<ctm::Violation> check(const Sequence& s, bool strict);

struct MatchSettings {
  ctm::MatchMode mode = ctm::MatchMode::ctc;
  double iou_threshold = 0.5;
  bool allow_box_ctc = false;
};

/// Throws std::invalid_argument when the inputs cannot be matched as asked.
ctm::MatchedSequence match_sequences(const Sequence& gt, const Sequence& res, const MatchSettings& settings);

/// Writes a perturbed match-level result as a CTC result directory (masks
/// relabelled from the ground truth, FP detections as small discs) or as a
/// MOT CSV for box ground truth.
void export_result(const Sequence& gt, const ctm::MatchedSequence& result, std::uint64_t seed, const fs::path& out);

}  // namespace ctmcli
