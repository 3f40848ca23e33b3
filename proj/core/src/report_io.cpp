#include "ctm/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace ctm {

namespace {

using nlohmann::ordered_json;

std::vector<Metric> chosen(std::span<const Metric> selection) {
  if (selection.empty()) return {kAllMetrics.begin(), kAllMetrics.end()};
  std::vector<Metric> out;
  for (Metric m : kAllMetrics) {
    if (std::find(selection.begin(), selection.end(), m) != selection.end()) out.push_back(m);
  }
  return out;
}

ordered_json provenance_json(const EvalOptions& o) {
  ordered_json p;
  p["matching"] = std::string(to_string(o.matching));
  p["iou_threshold"] = o.iou_threshold;
  p["bc_window"] = o.bc_window;
  p["tf_mode"] = std::string(to_string(o.tf_mode));
  p["aogm_weights"] = {{"ns", o.weights.ns}, {"fn", o.weights.fn}, {"fp", o.weights.fp},
                       {"ed", o.weights.ed}, {"ea", o.weights.ea}, {"ec", o.weights.ec}};
  p["bio_strict"] = o.bio_strict;
  p["mt_strict_id"] = o.mt_strict_id;
  return p;
}

ordered_json to_json(const MetricReport& r, std::span<const Metric> selection) {
  ordered_json j;
  j["sequence"] = r.sequence;
  j["view"] = r.view;
  j["provenance"] = provenance_json(r.provenance);
  ordered_json metrics = ordered_json::object();
  for (Metric m : chosen(selection)) {
    auto it = r.metrics.find(m);
    ordered_json v;
    if (it != r.metrics.end() && it->second.defined()) {
      v["value"] = *it->second;
    } else {
      v["value"] = nullptr;
      v["reason"] = it == r.metrics.end() ? std::string("not computed") : it->second.reason;
    }
    metrics[std::string(metric_name(m))] = v;
  }
  j["metrics"] = metrics;
  ordered_json counters = ordered_json::object();
  for (const auto& [k, v] : r.counters) counters[k] = v;
  j["counters"] = counters;
  return j;
}

EvalOptions provenance_from(const ordered_json& p) {
  EvalOptions o;
  const std::string matching = p.at("matching").get<std::string>();
  if (matching == "ctc") {
    o.matching = MatchMode::ctc;
  } else if (matching == "hungarian") {
    o.matching = MatchMode::hungarian;
  } else {
    throw std::invalid_argument("unknown matching '" + matching + "'");
  }
  o.iou_threshold = p.at("iou_threshold").get<double>();
  o.bc_window = p.at("bc_window").get<int>();
  const std::string tf = p.at("tf_mode").get<std::string>();
  o.tf_mode = tf == "count" ? TfMode::count : TfMode::contiguous;
  const auto& w = p.at("aogm_weights");
  o.weights = {w.at("ns").get<double>(), w.at("fn").get<double>(), w.at("fp").get<double>(),
               w.at("ed").get<double>(), w.at("ea").get<double>(), w.at("ec").get<double>()};
  o.bio_strict = p.at("bio_strict").get<bool>();
  o.mt_strict_id = p.at("mt_strict_id").get<bool>();
  return o;
}

}  // namespace

std::string report_to_json(const MetricReport& r, std::span<const Metric> selection, int indent) {
  return to_json(r, selection).dump(indent);
}

MetricReport report_from_json(const std::string& text, const std::string& source) {
  try {
    const auto j = ordered_json::parse(text);
    MetricReport r;
    r.sequence = j.at("sequence").get<std::string>();
    r.view = j.value("view", std::string("sequence"));
    r.provenance = provenance_from(j.at("provenance"));
    for (const auto& [name, v] : j.at("metrics").items()) {
      auto m = parse_metric(name);
      if (!m) throw std::invalid_argument("unknown metric '" + name + "'");
      const auto& value = v.at("value");
      r.metrics[*m] = value.is_null() ? MetricValue::undefined(v.value("reason", std::string("undefined")))
                                      : MetricValue::of(value.get<double>());
    }
    if (j.contains("counters")) {
      for (const auto& [k, v] : j.at("counters").items()) r.counters[k] = v.get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, 0, e.what());
  }
}

std::string aggregate_to_json(std::span<const MetricReport> sequences, std::span<const MetricReport> aggregates,
                              std::span<const Metric> selection) {
  ordered_json j;
  ordered_json seqs = ordered_json::array();
  for (const auto& r : sequences) seqs.push_back(to_json(r, selection));
  ordered_json aggs = ordered_json::array();
  for (const auto& r : aggregates) aggs.push_back(to_json(r, selection));
  j["sequences"] = seqs;
  j["aggregates"] = aggs;
  return j.dump(2);
}

void write_reports_csv(std::ostream& out, std::span<const MetricReport> reports, std::span<const Metric> selection) {
  const auto metrics = chosen(selection);
  out << "sequence,view";
  for (Metric m : metrics) out << ',' << metric_name(m);
  out << '\n';
  for (const auto& r : reports) {
    out << r.sequence << ',' << r.view;
    for (Metric m : metrics) {
      out << ',';
      auto it = r.metrics.find(m);
      if (it != r.metrics.end() && it->second.defined()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *it->second);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace ctm
