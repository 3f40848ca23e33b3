#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/matched.hpp"
#include "ctm/metric_report.hpp"
#include "ctm/options.hpp"

namespace ctm {

/// SplitMix64 generator; the exact stream is documented in docs/formats.md.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, n) by rejection; n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

enum class ErrorKind { add_fp, remove_detection, remove_match, remove_mitosis, id_switch };

inline constexpr ErrorKind kAllErrorKinds[] = {ErrorKind::add_fp, ErrorKind::remove_detection,
                                               ErrorKind::remove_match, ErrorKind::remove_mitosis,
                                               ErrorKind::id_switch};

/// Short names used on the command line and in CSV: fp, fn, match, mitosis, idsw.
std::string_view to_string(ErrorKind kind) noexcept;
std::optional<ErrorKind> parse_error_kind(std::string_view name) noexcept;

struct Perturbation {
  ErrorKind kind = ErrorKind::add_fp;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Ground truth used as its own prediction: every annotation a TP with J = 1.
MatchedSequence perfect_result(const TrackingData& gt);
MatchedSequence perfect_result(const TrackTable& tracks, std::span<const Occurrence> occurrences, Frame n_frames);

/// How many errors of `kind` can currently be induced (SIZE_MAX when unbounded).
std::size_t available_targets(const MatchedSequence& m, ErrorKind kind);

struct PerturbOutcome {
  MatchedSequence result;
  std::size_t applied = 0;
  std::vector<std::string> warnings;
  /// Predicted ids created by the perturbation (FP tracks, fragments).
  std::vector<TrackId> fresh_ids;
};

/// Applies `p.count` errors one at a time, each drawn uniformly from the
/// targets left by the previous one, so the errors for count k are a
/// prefix of those for count k + 1 under the same seed.
PerturbOutcome apply(const MatchedSequence& m, const Perturbation& p);

struct SweepSpec {
  ErrorKind kind = ErrorKind::add_fp;
  /// Absolute counts, or fractions of the available targets when `fractions`.
  std::vector<double> counts;
  bool fractions = false;
  std::vector<std::uint64_t> seeds;
  std::vector<Metric> metrics;  // empty = all
  EvalOptions options;
};

struct SweepRow {
  ErrorKind kind = ErrorKind::add_fp;
  std::int64_t count = 0;
  std::uint64_t seed = 0;
  Metric metric = Metric::CHOTA;
  MetricValue value;
};

struct SweepResult {
  std::string dataset;
  std::vector<SweepRow> rows;  // ordered by (count, seed, metric)
  std::vector<std::string> warnings;
};

/// Full factorial (count x seed) evaluation, cells run in parallel.
SweepResult sweep(const MatchedSequence& perfect, const SweepSpec& spec);

/// CSV columns: error,count,seed,metric,value. Undefined values are empty.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
SweepResult read_sweep_csv(std::istream& in, const std::string& source);

struct SeriesSummary {
  ErrorKind kind;
  Metric metric;
  std::int64_t count;
  std::size_t n;
  double mean;
  double variance;  // population variance
};

std::vector<SeriesSummary> summarize(const SweepResult& result);

/// Pearson correlation of paired samples; nullopt with fewer than two
/// points or constant x, 0 for constant y.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationRow {
  ErrorKind kind;
  Metric metric;
  MetricValue magnitude;  // |r|, averaged over datasets
  std::size_t datasets = 0;
};

/// |r| between induced-error count and metric value per (kind, metric),
/// undefined values excluded pairwise; averaged across `results`.
std::vector<CorrelationRow> correlate(std::span<const SweepResult> results);

void write_correlation_csv(std::ostream& out, std::span<const CorrelationRow> rows);

}  // namespace ctm
