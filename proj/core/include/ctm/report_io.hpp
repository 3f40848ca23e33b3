#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ctm/metric_report.hpp"

namespace ctm {

/// JSON object with `sequence`, `view`, `provenance`, `metrics` and
/// `counters`. Each metric is `{"value": x}` or `{"value": null, "reason": "..."}`.
/// `selection` restricts the metrics written (empty = all).
std::string report_to_json(const MetricReport& r, std::span<const Metric> selection = {}, int indent = 2);
MetricReport report_from_json(const std::string& text, const std::string& source);

/// `{"sequences": [...], "aggregates": [...]}`.
std::string aggregate_to_json(std::span<const MetricReport> sequences, std::span<const MetricReport> aggregates,
                              std::span<const Metric> selection = {});

/// Wide CSV: `sequence,view,<metric>...` in canonical metric order; undefined cells are empty.
void write_reports_csv(std::ostream& out, std::span<const MetricReport> reports,
                       std::span<const Metric> selection = {});

}  // namespace ctm
