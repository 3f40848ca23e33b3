#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/types.hpp"

namespace ctm {

enum class Severity { warning, error };

enum class Rule {
  invalid_id,          // id < 1
  self_parent,         // parent == id
  end_before_begin,    // end < begin
  unknown_parent,      // parent id has no record
  parent_overlap,      // parent.end >= daughter.begin
  parent_gap,          // daughter starts more than one frame after the parent ends
  parent_cycle,        // parent links do not form a forest
  no_gap,              // label missing from a frame inside its track span
  outside_span,        // label present in a frame outside its track span
  unknown_label,       // label present but no track record
  dimension_mismatch,  // frames of one sequence differ in size
};

std::string_view rule_name(Rule rule) noexcept;

struct Violation {
  Severity severity = Severity::error;
  Rule rule = Rule::invalid_id;
  Frame frame = -1;  // -1 when not frame-specific
  TrackId track = kNoTrack;
  std::string message;
};

struct ValidationOptions {
  /// Labels outside their span (or without a record) become errors instead of warnings.
  bool strict = false;
};

bool has_errors(std::span<const Violation> violations) noexcept;

/// Structural checks on the lineage table alone.
std::vector<Violation> validate_tracks(const TrackTable& tracks);

/// Lineage checks plus the no-gap rule against observed occurrences.
std::vector<Violation> validate(const TrackTable& tracks, std::span<const Occurrence> occurrences,
                                const ValidationOptions& options = {});

/// As above, plus consistent frame dimensions.
std::vector<Violation> validate(const TrackTable& tracks, std::span<const LabelFrame> frames,
                                const ValidationOptions& options = {});

}  // namespace ctm
