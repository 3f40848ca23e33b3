#include "ctm/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "ctm/evaluate.hpp"
#include "ctm/parallel.hpp"

namespace ctm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::add_fp: return "fp";
    case ErrorKind::remove_detection: return "fn";
    case ErrorKind::remove_match: return "match";
    case ErrorKind::remove_mitosis: return "mitosis";
    case ErrorKind::id_switch: return "idsw";
  }
  return "?";
}

std::optional<ErrorKind> parse_error_kind(std::string_view name) noexcept {
  for (ErrorKind k : kAllErrorKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

MatchedSequence perfect_result(const TrackTable& tracks, std::span<const Occurrence> occurrences, Frame n_frames) {
  std::vector<TpEntry> tp;
  tp.reserve(occurrences.size());
  for (const auto& o : occurrences) tp.push_back({o.frame, o.id, o.id, 1.0});
  return MatchedSequence::assemble(std::move(tp), {}, {}, tracks, tracks, n_frames);
}

MatchedSequence perfect_result(const TrackingData& gt) {
  return perfect_result(gt.tracks, gt.occurrences, gt.n_frames);
}

namespace {

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Mutable match-level state; track spans are recomputed at the end.
struct Work {
  std::vector<TpEntry> tp;
  std::vector<FpEntry> fp;
  std::vector<FnEntry> fn;
  std::map<TrackId, TrackRecord> pr;
  TrackId next_id = 1;
  std::vector<TrackId> fresh;

  explicit Work(const MatchedSequence& m) : tp(m.tp), fp(m.fp), fn(m.fn) {
    TrackId top = 0;
    for (const auto& r : m.pr_tracks.records()) {
      pr[r.id] = r;
      top = std::max(top, r.id);
    }
    for (const auto& e : tp) top = std::max(top, e.pr);
    for (const auto& e : fp) top = std::max(top, e.pr);
    next_id = top + 1;
  }

  TrackId fresh_id(TrackId parent = kNoTrack) {
    const TrackId id = next_id++;
    pr[id] = TrackRecord{id, 0, 0, parent};
    fresh.push_back(id);
    return id;
  }

  void repoint_daughters(TrackId from, TrackId to) {
    for (auto& [id, r] : pr) {
      if (r.parent == from && id != to) r.parent = to;
    }
  }

  /// Detections as (frame, id), sorted and unique.
  std::vector<Occurrence> detections() const {
    std::vector<Occurrence> d;
    d.reserve(tp.size() + fp.size());
    for (const auto& e : tp) d.push_back({e.frame, e.pr});
    for (const auto& e : fp) d.push_back({e.frame, e.pr});
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

  std::vector<Occurrence> matched_detections() const {
    std::vector<Occurrence> d;
    d.reserve(tp.size());
    for (const auto& e : tp) d.push_back({e.frame, e.pr});
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

  std::map<TrackId, std::vector<Frame>> frames_by_id() const {
    std::map<TrackId, std::vector<Frame>> out;
    for (const auto& d : detections()) out[d.id].push_back(d.frame);
    return out;
  }

  void relabel_from(TrackId id, Frame from, TrackId to) {
    for (auto& e : tp) {
      if (e.pr == id && e.frame >= from) e.pr = to;
    }
    for (auto& e : fp) {
      if (e.pr == id && e.frame >= from) e.pr = to;
    }
  }

  TrackTable finish_tracks() {
    const auto frames = frames_by_id();
    std::vector<TrackId> gone;
    for (auto& [id, r] : pr) {
      auto it = frames.find(id);
      if (it == frames.end()) {
        gone.push_back(id);
        continue;
      }
      r.begin = it->second.front();
      r.end = it->second.back();
    }
    for (TrackId id : gone) {
      pr.erase(id);
      repoint_daughters(id, kNoTrack);
    }
    std::vector<TrackRecord> rs;
    rs.reserve(pr.size());
    for (const auto& [id, r] : pr) rs.push_back(r);
    return TrackTable(std::move(rs));
  }
};

std::vector<TrackId> dividing_parents(const Work& w) {
  std::map<TrackId, int> n;
  for (const auto& [id, r] : w.pr) {
    if (r.parent != kNoTrack) ++n[r.parent];
  }
  std::vector<TrackId> out;
  for (const auto& [id, k] : n) {
    if (k >= 2) out.push_back(id);
  }
  return out;
}

// Frames f (ascending) paired with the ids detected at both f - 1 and f.
std::map<Frame, std::vector<TrackId>> continuing_tracks(const Work& w) {
  std::map<Frame, std::vector<TrackId>> out;
  for (const auto& [id, frames] : w.frames_by_id()) {
    for (std::size_t k = 1; k < frames.size(); ++k) {
      if (frames[k - 1] + 1 == frames[k]) out[frames[k]].push_back(id);
    }
  }
  return out;
}

std::size_t available(const Work& w, ErrorKind kind) {
  switch (kind) {
    case ErrorKind::add_fp: return kUnbounded;
    case ErrorKind::remove_detection: return w.matched_detections().size();
    case ErrorKind::remove_match: return w.tp.size();
    case ErrorKind::remove_mitosis: return dividing_parents(w).size();
    case ErrorKind::id_switch: return continuing_tracks(w).empty() ? 0 : kUnbounded;
  }
  return 0;
}

void add_fp(Work& w, SplitMix64& rng, Frame n_frames) {
  const auto f = static_cast<Frame>(rng.below(static_cast<std::uint64_t>(std::max<Frame>(n_frames, 1))));
  const TrackId id = w.fresh_id();
  w.fp.push_back({f, id});
}

void remove_detection(Work& w, SplitMix64& rng) {
  const auto targets = w.matched_detections();
  const Occurrence d = targets[rng.below(targets.size())];
  std::vector<TpEntry> kept;
  kept.reserve(w.tp.size());
  for (const auto& e : w.tp) {
    if (e.frame == d.frame && e.pr == d.id) {
      w.fn.push_back({e.frame, e.gt});
    } else {
      kept.push_back(e);
    }
  }
  w.tp = std::move(kept);

  bool prefix = false, suffix = false;
  for (const auto& o : w.detections()) {
    if (o.id != d.id) continue;
    if (o.frame < d.frame) prefix = true;
    if (o.frame > d.frame) suffix = true;
  }
  if (prefix && suffix) {
    // The gap forces a new identity on the remainder; it inherits no parent.
    const TrackId frag = w.fresh_id();
    w.relabel_from(d.id, d.frame + 1, frag);
    w.repoint_daughters(d.id, frag);
  }
}

void remove_match(Work& w, SplitMix64& rng) {
  const std::size_t k = rng.below(w.tp.size());
  const TpEntry e = w.tp[k];
  w.tp.erase(w.tp.begin() + static_cast<std::ptrdiff_t>(k));
  w.fn.push_back({e.frame, e.gt});
  const bool still_matched =
      std::any_of(w.tp.begin(), w.tp.end(), [&](const TpEntry& t) { return t.frame == e.frame && t.pr == e.pr; });
  if (!still_matched) w.fp.push_back({e.frame, e.pr});
}

void remove_mitosis(Work& w, SplitMix64& rng) {
  const auto parents = dividing_parents(w);
  const TrackId p = parents[rng.below(parents.size())];
  for (auto& [id, r] : w.pr) {
    if (r.parent == p) r.parent = kNoTrack;
  }
}

void id_switch(Work& w, SplitMix64& rng) {
  const auto cont = continuing_tracks(w);
  std::vector<std::pair<Frame, const std::vector<TrackId>*>> pairs, singles;
  for (const auto& [f, ids] : cont) {
    if (ids.size() >= 2) pairs.push_back({f, &ids});
    singles.push_back({f, &ids});
  }
  if (!pairs.empty()) {
    const auto& [f, ids] = pairs[rng.below(pairs.size())];
    const std::size_t n = ids->size();
    const std::size_t i = rng.below(n);
    std::size_t j = rng.below(n - 1);
    if (j >= i) ++j;
    const TrackId a = (*ids)[i];
    const TrackId b = (*ids)[j];
    auto swap_id = [&](TrackId& id, Frame frame) {
      if (frame < f) return;
      if (id == a) {
        id = b;
      } else if (id == b) {
        id = a;
      }
    };
    for (auto& e : w.tp) swap_id(e.pr, e.frame);
    for (auto& e : w.fp) swap_id(e.pr, e.frame);
    // Daughters follow the track end, which now carries the other id.
    for (auto& [id, r] : w.pr) {
      if (r.parent == a) {
        r.parent = b;
      } else if (r.parent == b) {
        r.parent = a;
      }
    }
    return;
  }
  const auto& [f, ids] = singles[rng.below(singles.size())];
  const TrackId a = (*ids)[rng.below(ids->size())];
  const TrackId frag = w.fresh_id();
  w.relabel_from(a, f, frag);
  w.repoint_daughters(a, frag);
}

}  // namespace

std::size_t available_targets(const MatchedSequence& m, ErrorKind kind) { return available(Work(m), kind); }

PerturbOutcome apply(const MatchedSequence& m, const Perturbation& p) {
  Work w(m);
  SplitMix64 rng(p.seed);
  PerturbOutcome out;
  std::size_t count = p.count;
  const std::size_t avail = available(w, p.kind);
  if (count > avail) {
    out.warnings.push_back("requested " + std::to_string(count) + " " + std::string(to_string(p.kind)) +
                           " errors but only " + std::to_string(avail) + " targets exist; clamped");
    count = avail;
  }
  for (std::size_t k = 0; k < count; ++k) {
    if (p.kind != ErrorKind::add_fp && available(w, p.kind) == 0) {
      out.warnings.push_back("targets exhausted after " + std::to_string(k) + " errors");
      break;
    }
    switch (p.kind) {
      case ErrorKind::add_fp: add_fp(w, rng, m.n_frames); break;
      case ErrorKind::remove_detection: remove_detection(w, rng); break;
      case ErrorKind::remove_match: remove_match(w, rng); break;
      case ErrorKind::remove_mitosis: remove_mitosis(w, rng); break;
      case ErrorKind::id_switch: id_switch(w, rng); break;
    }
    ++out.applied;
  }
  TrackTable pr = w.finish_tracks();
  for (TrackId id : w.fresh) {
    if (pr.contains(id)) out.fresh_ids.push_back(id);
  }
  out.result = MatchedSequence::assemble(std::move(w.tp), std::move(w.fp), std::move(w.fn), m.gt_tracks, std::move(pr),
                                         m.n_frames, m.mode, m.pixel_geometry);
  return out;
}

SweepResult sweep(const MatchedSequence& perfect, const SweepSpec& spec) {
  SweepResult result;
  std::vector<std::int64_t> counts;
  const std::size_t avail = available_targets(perfect, spec.kind);
  const std::size_t base = avail == kUnbounded ? perfect.annotation_count() : avail;
  for (double c : spec.counts) {
    if (c < 0) throw std::invalid_argument("error counts must be non-negative");
    counts.push_back(spec.fractions ? std::llround(c * static_cast<double>(base)) : std::llround(c));
  }
  std::vector<Metric> metrics = spec.metrics;
  if (metrics.empty()) metrics.assign(kAllMetrics.begin(), kAllMetrics.end());

  const std::size_t n_seeds = spec.seeds.size();
  const std::size_t cells = counts.size() * n_seeds;
  std::vector<std::vector<SweepRow>> rows(cells);
  std::vector<std::vector<std::string>> warnings(cells);
  parallel_for(cells, [&](std::size_t k) {
    const std::int64_t count = counts[k / n_seeds];
    const std::uint64_t seed = spec.seeds[k % n_seeds];
    auto outcome = apply(perfect, {spec.kind, static_cast<std::size_t>(count), seed});
    const MetricReport report = evaluate(outcome.result, spec.options);
    for (Metric metric : metrics) rows[k].push_back({spec.kind, count, seed, metric, report.at(metric)});
    for (auto& w : outcome.warnings) warnings[k].push_back("count " + std::to_string(count) + ", seed " +
                                                          std::to_string(seed) + ": " + w);
  });
  for (std::size_t k = 0; k < cells; ++k) {
    result.rows.insert(result.rows.end(), rows[k].begin(), rows[k].end());
    result.warnings.insert(result.warnings.end(), warnings[k].begin(), warnings[k].end());
  }
  return result;
}

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "error,count,seed,metric,value\n";
  for (const auto& r : result.rows) {
    out << to_string(r.kind) << ',' << r.count << ',' << r.seed << ',' << metric_name(r.metric) << ',';
    if (r.value.defined()) out << format_real(*r.value);
    out << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in, const std::string& source) {
  SweepResult result;
  result.dataset = source;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (n == 1 && !f.empty() && f[0] == "error") continue;
    if (f.size() != 5) throw ParseError(source, n, "expected 5 fields, got " + std::to_string(f.size()));
    SweepRow row;
    auto kind = parse_error_kind(f[0]);
    auto metric = parse_metric(f[3]);
    if (!kind) throw ParseError(source, n, "unknown error kind '" + f[0] + "'");
    if (!metric) throw ParseError(source, n, "unknown metric '" + f[3] + "'");
    row.kind = *kind;
    row.metric = *metric;
    try {
      std::size_t pos = 0;
      row.count = std::stoll(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument(f[1]);
      row.seed = std::stoull(f[2], &pos);
      if (pos != f[2].size()) throw std::invalid_argument(f[2]);
      if (f[4].empty()) {
        row.value = MetricValue::undefined("undefined in sweep");
      } else {
        const double v = std::stod(f[4], &pos);
        if (pos != f[4].size()) throw std::invalid_argument(f[4]);
        row.value = MetricValue::of(v);
      }
    } catch (const std::logic_error&) {
      throw ParseError(source, n, "malformed number");
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<SeriesSummary> summarize(const SweepResult& result) {
  std::map<std::tuple<ErrorKind, Metric, std::int64_t>, std::vector<double>> groups;
  for (const auto& r : result.rows) {
    auto& g = groups[{r.kind, r.metric, r.count}];
    if (r.value.defined()) g.push_back(*r.value);
  }
  std::vector<SeriesSummary> out;
  for (const auto& [key, vals] : groups) {
    SeriesSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key), vals.size(), 0.0, 0.0};
    if (!vals.empty()) {
      for (double v : vals) s.mean += v;
      s.mean /= static_cast<double>(vals.size());
      for (double v : vals) s.variance += (v - s.mean) * (v - s.mean);
      s.variance /= static_cast<double>(vals.size());
    }
    out.push_back(s);
  }
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  if (syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CorrelationRow> correlate(std::span<const SweepResult> results) {
  std::map<std::pair<ErrorKind, Metric>, std::vector<double>> magnitudes;
  std::set<std::pair<ErrorKind, Metric>> seen;
  for (const auto& result : results) {
    std::map<std::pair<ErrorKind, Metric>, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const auto& r : result.rows) {
      seen.insert({r.kind, r.metric});
      auto& s = series[{r.kind, r.metric}];
      if (!r.value.defined()) continue;
      s.first.push_back(static_cast<double>(r.count));
      s.second.push_back(*r.value);
    }
    for (const auto& [key, s] : series) {
      if (auto r = pearson(s.first, s.second)) magnitudes[key].push_back(std::abs(*r));
    }
  }
  std::vector<CorrelationRow> out;
  for (const auto& key : seen) {
    CorrelationRow row{key.first, key.second, MetricValue::undefined("no defined series with two distinct counts"), 0};
    auto it = magnitudes.find(key);
    if (it != magnitudes.end() && !it->second.empty()) {
      double sum = 0.0;
      for (double v : it->second) sum += v;
      row.datasets = it->second.size();
      row.magnitude = MetricValue::of(sum / static_cast<double>(row.datasets));
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows) {
  out << "error,metric,correlation,datasets\n";
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << metric_name(r.metric) << ',';
    if (r.magnitude.defined()) out << format_real(*r.magnitude);
    out << ',' << r.datasets << '\n';
  }
}

}  // namespace ctm
