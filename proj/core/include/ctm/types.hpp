#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctm {

/// Track label. 0 is reserved for "none" (background, no parent, FP/FN side).
using TrackId = std::uint32_t;
/// 0-based frame index.
using Frame = std::int32_t;

inline constexpr TrackId kNoTrack = 0;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One row of a CTC lineage file: `L B E P`.
struct TrackRecord {
  TrackId id = 0;
  Frame begin = 0;
  Frame end = 0;
  TrackId parent = kNoTrack;

  Frame length() const noexcept { return end - begin + 1; }
  bool alive_at(Frame f) const noexcept { return begin <= f && f <= end; }
  friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

/// Track records kept sorted by id. Ids need not be contiguous.
class TrackTable {
 public:
  TrackTable() = default;
  /// Throws std::invalid_argument on duplicate ids.
  explicit TrackTable(std::vector<TrackRecord> records);

  std::span<const TrackRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const TrackRecord* find(TrackId id) const noexcept;
  bool contains(TrackId id) const noexcept { return find(id) != nullptr; }
  TrackId max_id() const noexcept { return records_.empty() ? 0 : records_.back().id; }

  /// Ids of tracks whose parent is `id`, ascending.
  std::vector<TrackId> daughters_of(TrackId id) const;
  std::size_t parent_link_count() const noexcept;

  friend bool operator==(const TrackTable&, const TrackTable&) = default;

 private:
  std::vector<TrackRecord> records_;
};

/// A single 2D frame of instance labels, row-major. 0 is background.
struct LabelFrame {
  Frame frame = 0;
  std::int32_t width = 0;
  std::int32_t height = 0;
  std::vector<std::uint32_t> labels;

  std::uint32_t at(std::int32_t x, std::int32_t y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
  friend bool operator==(const LabelFrame&, const LabelFrame&) = default;
};

/// Fixed-point decimal with three fractional digits (value * 1000).
using Milli = std::int64_t;

/// Axis-aligned box, coordinates stored in thousandths of a pixel.
struct BoxDetection {
  Frame frame = 0;
  TrackId id = 0;
  Milli x = 0;
  Milli y = 0;
  Milli w = 0;
  Milli h = 0;

  friend bool operator==(const BoxDetection&, const BoxDetection&) = default;
};

/// Presence of instance `id` in `frame` (an annotation or a detection).
struct Occurrence {
  Frame frame = 0;
  TrackId id = 0;

  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

/// Match-level view of a dataset: who is present where, plus lineage.
struct TrackingData {
  TrackTable tracks;
  std::vector<Occurrence> occurrences;  // sorted, unique
  Frame n_frames = 0;
};

/// Sorted unique (frame, label) pairs for every nonzero label in `frames`.
std::vector<Occurrence> occurrences_of(std::span<const LabelFrame> frames);
std::vector<Occurrence> occurrences_of(std::span<const BoxDetection> boxes);

}  // namespace ctm
