#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ctm/options.hpp"

namespace ctm {

/// A metric value or an explicit "undefined" with the reason why.
struct MetricValue {
  std::optional<double> value;
  std::string reason;

  static MetricValue of(double v) { return {v, {}}; }
  static MetricValue undefined(std::string why) { return {std::nullopt, std::move(why)}; }

  bool defined() const noexcept { return value.has_value(); }
  double operator*() const { return value.value(); }

  friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

enum class Metric {
  SEG, CT, TF, BC, CCA, BIO,
  TRA, DET, LNK,
  OP_CSB, OP_CTB, OP_CLB,
  MOTA, IDF1, Precision, Recall, FAF, MT, ML,
  HOTA, CHOTA, DetA, AssA,
};

inline constexpr std::array kAllMetrics = {
    Metric::SEG,    Metric::CT,     Metric::TF,     Metric::BC,        Metric::CCA,    Metric::BIO,
    Metric::TRA,    Metric::DET,    Metric::LNK,    Metric::OP_CSB,    Metric::OP_CTB, Metric::OP_CLB,
    Metric::MOTA,   Metric::IDF1,   Metric::Precision, Metric::Recall, Metric::FAF,    Metric::MT,
    Metric::ML,     Metric::HOTA,   Metric::CHOTA,  Metric::DetA,      Metric::AssA,
};

std::string_view metric_name(Metric m) noexcept;
/// Case-insensitive lookup; also accepts "bc(1)"-style aliases for BC and BIO.
std::optional<Metric> parse_metric(std::string_view name) noexcept;

struct MetricReport {
  std::string sequence;
  /// "sequence", "macro" or "pooled".
  std::string view = "sequence";
  EvalOptions provenance;
  std::map<Metric, MetricValue> metrics;
  /// Integer counters and real-valued partial sums used for pooled aggregation.
  std::map<std::string, double> counters;

  const MetricValue& at(Metric m) const { return metrics.at(m); }
};

}  // namespace ctm
