#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ctm/bio_metrics.hpp"
#include "ctm/evaluate.hpp"
#include "ctm/higher_order.hpp"
#include "ctm/perturb.hpp"
#include "ctm/report_io.hpp"
#include "dataset.hpp"

namespace {

using namespace ctmcli;

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kInvalid = 2;

struct EvalFlags {
  std::string match = "ctc";
  double iou_threshold = 0.5;
  std::vector<double> weights;
  int bc_window = 1;
  std::string tf_mode = "contiguous";
  bool bio_strict = false;
  bool mt_strict_id = false;
  bool allow_box_ctc = false;
  bool strict = false;

  void attach(CLI::App* app) {
    app->add_option("--match", match, "Matching protocol")->check(CLI::IsMember({"ctc", "hungarian"}));
    app->add_option("--iou-threshold", iou_threshold, "Jaccard threshold for bijective matching")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--aogm-weights", weights, "Edit weights ns,fn,fp,ed,ea,ec")->delimiter(',')->expected(6);
    app->add_option("--bc-window", bc_window, "Frame tolerance for branching events")->check(CLI::NonNegativeNumber);
    app->add_option("--tf-mode", tf_mode, "How TF counts matched frames")
        ->check(CLI::IsMember({"contiguous", "count"}));
    app->add_flag("--bio-strict", bio_strict, "Undefined components make composites undefined");
    app->add_flag("--mt-strict-id", mt_strict_id, "MT/ML coverage by the dominant predicted id only");
    app->add_flag("--allow-box-ctc", allow_box_ctc, "Rasterize boxes for majority-overlap matching");
    app->add_flag("--strict", strict, "Treat dirty labels as errors; split gapped MOT tracks");
  }

  ctm::EvalOptions options() const {
    ctm::EvalOptions o;
    o.matching = match == "hungarian" ? ctm::MatchMode::hungarian : ctm::MatchMode::ctc;
    o.iou_threshold = iou_threshold;
    o.bc_window = bc_window;
    o.tf_mode = tf_mode == "count" ? ctm::TfMode::count : ctm::TfMode::contiguous;
    if (!weights.empty()) o.weights = {weights[0], weights[1], weights[2], weights[3], weights[4], weights[5]};
    o.bio_strict = bio_strict;
    o.mt_strict_id = mt_strict_id;
    return o;
  }

  MatchSettings match_settings() const {
    return {match == "hungarian" ? ctm::MatchMode::hungarian : ctm::MatchMode::ctc, iou_threshold, allow_box_ctc};
  }
};

std::vector<ctm::Metric> parse_metrics(const std::vector<std::string>& names) {
  std::vector<ctm::Metric> out;
  for (const auto& n : names) {
    if (n == "all") return {};
    auto m = ctm::parse_metric(n);
    if (!m) throw std::invalid_argument("unknown metric '" + n + "'");
    out.push_back(*m);
  }
  return out;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ctm::IoError("cannot write " + out);
  f << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// Prints violations; returns true when any is an error.
bool report_violations(const std::string& what, const std::vector<ctm::Violation>& vs) {
  for (const auto& v : vs) {
    std::cerr << what << ": " << (v.severity == ctm::Severity::error ? "error" : "warning") << ": "
              << ctm::rule_name(v.rule) << ": " << v.message << '\n';
  }
  return ctm::has_errors(vs);
}

int cmd_validate(const std::string& path, bool strict) {
  const Sequence s = load_sequence(path, strict);
  print_warnings(s.warnings);
  const auto vs = check(s, strict);
  for (const auto& v : vs) {
    std::cout << (v.severity == ctm::Severity::error ? "error" : "warning") << '\t' << ctm::rule_name(v.rule) << '\t'
              << (v.frame >= 0 ? std::to_string(v.frame) : "-") << '\t'
              << (v.track ? std::to_string(v.track) : "-") << '\t' << v.message << '\n';
  }
  std::cerr << s.handle.sequence << ": " << s.tracks.size() << " tracks, " << s.n_frames << " frames, "
            << vs.size() << " violations\n";
  return ctm::has_errors(vs) ? kInvalid : kOk;
}

struct EvaluateArgs {
  std::string gt, res, out, format = "json", seg_source = "tra";
  std::vector<std::string> metrics{"all"};
  bool oracle_check = false;
  EvalFlags flags;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const Sequence gt = load_sequence(a.gt, a.flags.strict);
  const Sequence res = load_sequence(a.res, a.flags.strict);
  print_warnings(gt.warnings);
  print_warnings(res.warnings);
  const bool bad_gt = report_violations("ground truth", check(gt, a.flags.strict));
  const bool bad_res = report_violations("result", check(res, a.flags.strict));
  if (bad_gt || bad_res) return kInvalid;

  const auto selection = parse_metrics(a.metrics);
  const ctm::MatchedSequence m = match_sequences(gt, res, a.flags.match_settings());

  std::optional<ctm::SegTotals> seg_override;
  if (a.seg_source == "seg") {
    if (!gt.masks()) throw std::invalid_argument("--seg-source seg needs mask ground truth");
    const auto seg_frames = ctm::read_seg_frames(gt.handle.frames_dir.parent_path());
    if (seg_frames.empty()) throw ctm::IoError("no SEG annotations next to " + gt.handle.frames_dir.string());
    seg_override = ctm::seg_totals(seg_frames, res.frames);
  }
  const ctm::MetricReport report = ctm::evaluate(m, a.flags.options(), seg_override, res.handle.sequence);

  if (a.oracle_check) {
    for (bool lineage : {true, false}) {
      const auto fast = lineage ? report.at(ctm::Metric::CHOTA) : report.at(ctm::Metric::HOTA);
      const auto slow = ctm::naive_chota(m, lineage);
      const bool same = fast.defined() == slow.defined() && (!fast.defined() || std::abs(*fast - *slow) <= 1e-12);
      if (!same) {
        std::cerr << "oracle mismatch for " << (lineage ? "CHOTA" : "HOTA") << ": "
                  << (fast.defined() ? std::to_string(*fast) : "undefined") << " vs "
                  << (slow.defined() ? std::to_string(*slow) : "undefined") << '\n';
        return kIoError;
      }
    }
    std::cerr << "oracle check passed\n";
  }

  if (a.format == "csv") {
    std::ostringstream os;
    ctm::write_reports_csv(os, std::span<const ctm::MetricReport>(&report, 1), selection);
    emit(os.str(), a.out);
  } else {
    emit(ctm::report_to_json(report, selection) + "\n", a.out);
  }
  return kOk;
}

struct PerturbArgs {
  std::string gt, out, error = "fp";
  std::size_t count = 0;
  std::uint64_t seed = 0;
  bool strict = false;
};

ctm::ErrorKind error_kind(const std::string& name) {
  auto k = ctm::parse_error_kind(name);
  if (!k) throw std::invalid_argument("unknown error kind '" + name + "'");
  return *k;
}

int cmd_perturb(const PerturbArgs& a) {
  const Sequence gt = load_sequence(a.gt, a.strict);
  if (report_violations("ground truth", check(gt, a.strict))) return kInvalid;
  const auto perfect = ctm::perfect_result(gt.tracking_data());
  const auto outcome = ctm::apply(perfect, {error_kind(a.error), a.count, a.seed});
  print_warnings(outcome.warnings);
  export_result(gt, outcome.result, a.seed, a.out);
  std::cerr << "applied " << outcome.applied << " " << a.error << " errors; wrote " << a.out << '\n';
  return kOk;
}

struct SweepArgs {
  std::string gt, out, error = "fp";
  std::vector<double> counts, fractions;
  std::vector<std::uint64_t> seeds{10};
  std::vector<std::string> metrics{"all"};
  EvalFlags flags;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.counts.empty() == a.fractions.empty()) throw std::invalid_argument("give exactly one of --counts or --fractions");
  const Sequence gt = load_sequence(a.gt, a.flags.strict);
  if (report_violations("ground truth", check(gt, a.flags.strict))) return kInvalid;

  ctm::SweepSpec spec;
  spec.kind = error_kind(a.error);
  spec.fractions = !a.fractions.empty();
  spec.counts = spec.fractions ? a.fractions : a.counts;
  // A single value is a seed count (0..n-1); a list is taken literally.
  if (a.seeds.size() == 1) {
    for (std::uint64_t s = 0; s < a.seeds.front(); ++s) spec.seeds.push_back(s);
  } else {
    spec.seeds = a.seeds;
  }
  if (spec.seeds.size() < 10) std::cerr << "warning: fewer than 10 seeds per count\n";
  spec.metrics = parse_metrics(a.metrics);
  spec.options = a.flags.options();

  auto perfect = ctm::perfect_result(gt.tracking_data());
  perfect.mode = spec.options.matching;
  const auto result = ctm::sweep(perfect, spec);
  print_warnings(result.warnings);
  std::ostringstream os;
  ctm::write_sweep_csv(os, result);
  emit(os.str(), a.out);
  return kOk;
}

int cmd_correlate(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<ctm::SweepResult> results;
  for (const auto& in : inputs) {
    std::ifstream f(in, std::ios::binary);
    if (!f) throw ctm::IoError("cannot read " + in);
    results.push_back(ctm::read_sweep_csv(f, in));
  }
  const auto rows = ctm::correlate(results);
  std::ostringstream os;
  ctm::write_correlation_csv(os, rows);
  emit(os.str(), out);
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string aggregate = "macro", format = "json", out;
  std::vector<std::string> metrics{"all"};
  bool force = false;
};

int cmd_report(const ReportArgs& a) {
  std::vector<ctm::MetricReport> reports;
  for (const auto& in : a.inputs) {
    std::ifstream f(in, std::ios::binary);
    if (!f) throw ctm::IoError("cannot read " + in);
    std::stringstream ss;
    ss << f.rdbuf();
    reports.push_back(ctm::report_from_json(ss.str(), in));
  }
  const auto selection = parse_metrics(a.metrics);
  std::vector<ctm::MetricReport> aggs;
  if (a.aggregate == "macro" || a.aggregate == "both") {
    aggs.push_back(ctm::aggregate(reports, ctm::Aggregate::macro, a.force));
  }
  if (a.aggregate == "pooled" || a.aggregate == "both") {
    aggs.push_back(ctm::aggregate(reports, ctm::Aggregate::pooled, a.force));
  }
  if (a.format == "csv") {
    std::vector<ctm::MetricReport> all = reports;
    all.insert(all.end(), aggs.begin(), aggs.end());
    std::ostringstream os;
    ctm::write_reports_csv(os, all, selection);
    emit(os.str(), a.out);
  } else {
    emit(ctm::aggregate_to_json(reports, aggs, selection) + "\n", a.out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell tracking evaluation: CTC, CTMC, HOTA and CHOTA metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ctmetrics 0.1.0");

  std::string validate_path;
  bool validate_strict = false;
  auto* validate = app.add_subcommand("validate", "Check structural invariants of a dataset");
  validate->add_option("path", validate_path, "Dataset directory or MOT CSV")->required();
  validate->add_flag("--strict", validate_strict, "Treat dirty labels as errors");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics of a result against ground truth");
  evaluate->add_option("gt", ev.gt, "Ground-truth dataset")->required();
  evaluate->add_option("res", ev.res, "Result dataset")->required();
  evaluate->add_option("--metrics", ev.metrics, "Metrics to report (default all)")->delimiter(',');
  evaluate->add_option("--format", ev.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  evaluate->add_option("--seg-source", ev.seg_source, "Annotations feeding SEG")->check(CLI::IsMember({"tra", "seg"}));
  evaluate->add_option("--out", ev.out, "Output file (default stdout)");
  evaluate->add_flag("--oracle-check", ev.oracle_check, "Cross-check CHOTA/HOTA with the pairwise evaluation");
  ev.flags.attach(evaluate);

  PerturbArgs pa;
  auto* perturb = app.add_subcommand("perturb", "Induce errors into the ground truth and write the result");
  perturb->add_option("--gt", pa.gt, "Ground-truth dataset")->required();
  perturb->add_option("--error", pa.error, "fp, fn, match, mitosis or idsw")->required();
  perturb->add_option("--count", pa.count, "Number of errors")->required();
  perturb->add_option("--seed", pa.seed, "Generator seed");
  perturb->add_option("--out", pa.out, "Result directory (masks) or CSV file (boxes)")->required();
  perturb->add_flag("--strict", pa.strict, "Treat dirty labels as errors");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Evaluate metrics over error counts and seeds");
  sweep->add_option("--gt", sw.gt, "Ground-truth dataset")->required();
  sweep->add_option("--error", sw.error, "fp, fn, match, mitosis or idsw")->required();
  sweep->add_option("--counts", sw.counts, "Absolute error counts")->delimiter(',');
  sweep->add_option("--fractions", sw.fractions, "Error counts as fractions of the available targets")
      ->delimiter(',');
  sweep->add_option("--seeds", sw.seeds, "Number of seeds, or an explicit seed list")->delimiter(',');
  sweep->add_option("--metrics", sw.metrics, "Metrics to record (default all)")->delimiter(',');
  sweep->add_option("--out", sw.out, "CSV output (default stdout)");
  sw.flags.attach(sweep);

  std::vector<std::string> corr_in;
  std::string corr_out;
  auto* correlate = app.add_subcommand("correlate", "Correlation of error count and metric value");
  correlate->add_option("--in", corr_in, "Sweep CSV files (one per dataset)")->required()->delimiter(',');
  correlate->add_option("--out", corr_out, "CSV output (default stdout)");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Aggregate per-sequence JSON reports");
  report->add_option("inputs", ra.inputs, "Report files")->required();
  report->add_option("--aggregate", ra.aggregate, "Aggregation")->check(CLI::IsMember({"macro", "pooled", "both"}));
  report->add_option("--format", ra.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--metrics", ra.metrics, "Metrics to report (default all)")->delimiter(',');
  report->add_option("--out", ra.out, "Output file (default stdout)");
  report->add_flag("--force", ra.force, "Aggregate reports with differing provenance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kIoError;
  }

  try {
    if (*validate) return cmd_validate(validate_path, validate_strict);
    if (*evaluate) return cmd_evaluate(ev);
    if (*perturb) return cmd_perturb(pa);
    if (*sweep) return cmd_sweep(sw);
    if (*correlate) return cmd_correlate(corr_in, corr_out);
    if (*report) return cmd_report(ra);
  } catch (const ctm::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}
