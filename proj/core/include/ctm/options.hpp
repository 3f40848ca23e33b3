#pragma once

#include <string_view>

#include "ctm/matched.hpp"

namespace ctm {

/// Per-operation weights of the graph edit cost. Defaults are the CTC
/// reference values; they are configuration, not constants.
struct AogmWeights {
  double ns = 5.0;
  double fn = 10.0;
  double fp = 1.0;
  double ed = 1.0;
  double ea = 1.5;
  double ec = 1.0;

  friend bool operator==(const AogmWeights&, const AogmWeights&) = default;
};

/// How TF counts the frames a gt track shares with one predicted id.
enum class TfMode {
  contiguous,  // longest run of consecutive matched frames
  count,       // total matched frames
};

enum class Aggregate { macro, pooled };

std::string_view to_string(TfMode mode) noexcept;
std::string_view to_string(Aggregate mode) noexcept;

struct EvalOptions {
  MatchMode matching = MatchMode::ctc;
  double iou_threshold = 0.5;
  int bc_window = 1;
  TfMode tf_mode = TfMode::contiguous;
  AogmWeights weights;
  bool bio_strict = false;
  bool mt_strict_id = false;

  friend bool operator==(const EvalOptions&, const EvalOptions&) = default;
};

}  // namespace ctm
