#include <benchmark/benchmark.h>

#include <random>

#include "ctm/evaluate.hpp"
#include "ctm/higher_order.hpp"
#include "ctm/matching.hpp"
#include "ctm/perturb.hpp"

namespace {

// Full binary lineages: `roots` trees of `depth` levels, each track alive `cycle` frames.
ctm::MatchedSequence lineage_sequence(int roots, int depth, ctm::Frame cycle) {
  std::vector<ctm::TrackRecord> recs;
  ctm::TrackId next = 1;
  for (int r = 0; r < roots; ++r) {
    std::vector<ctm::TrackId> level{next};
    recs.push_back({next++, 0, cycle - 1, ctm::kNoTrack});
    for (int d = 1; d < depth; ++d) {
      std::vector<ctm::TrackId> below;
      for (auto p : level) {
        for (int k = 0; k < 2; ++k) {
          recs.push_back({next, d * cycle, (d + 1) * cycle - 1, p});
          below.push_back(next++);
        }
      }
      level = std::move(below);
    }
  }
  std::vector<ctm::Occurrence> occ;
  for (const auto& t : recs) {
    for (auto f = t.begin; f <= t.end; ++f) occ.push_back({f, t.id});
  }
  std::sort(occ.begin(), occ.end());
  return ctm::perfect_result(ctm::TrackTable(std::move(recs)), occ, depth * cycle);
}

ctm::MatchedSequence noisy(int roots) {
  auto m = lineage_sequence(roots, 5, 8);
  m = ctm::apply(m, {ctm::ErrorKind::id_switch, m.tp.size() / 20, 1}).result;
  m = ctm::apply(m, {ctm::ErrorKind::remove_detection, m.tp.size() / 10, 2}).result;
  return ctm::apply(m, {ctm::ErrorKind::add_fp, m.tp.size() / 10, 3}).result;
}

void BM_ChotaAccumulator(benchmark::State& state) {
  const auto m = noisy(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctm::chota(m));
  state.counters["elements"] = static_cast<double>(m.tp.size() + m.fp.size() + m.fn.size());
  state.SetComplexityN(static_cast<std::int64_t>(m.tp.size() + m.fp.size() + m.fn.size()));
}
BENCHMARK(BM_ChotaAccumulator)->RangeMultiplier(2)->Range(1, 32)->Complexity();

void BM_ChotaNaive(benchmark::State& state) {
  const auto m = noisy(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctm::naive_chota(m));
  state.counters["elements"] = static_cast<double>(m.tp.size() + m.fp.size() + m.fn.size());
  state.SetComplexityN(static_cast<std::int64_t>(m.tp.size() + m.fp.size() + m.fn.size()));
}
BENCHMARK(BM_ChotaNaive)->RangeMultiplier(2)->Range(1, 4)->Complexity();

void BM_EvaluateAll(benchmark::State& state) {
  const auto m = noisy(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ctm::evaluate(m));
}
BENCHMARK(BM_EvaluateAll)->Arg(8)->Arg(32);

std::vector<ctm::LabelFrame> random_frames(std::mt19937_64& rng, int n, int size, int objects, int shift) {
  std::vector<ctm::LabelFrame> out;
  std::uniform_int_distribution<int> pos(0, size - 12), jitter(-shift, shift);
  for (int f = 0; f < n; ++f) {
    ctm::LabelFrame fr{f, size, size, std::vector<std::uint32_t>(static_cast<std::size_t>(size) * size, 0)};
    for (int k = 1; k <= objects; ++k) {
      const int x0 = std::clamp(pos(rng) + jitter(rng), 0, size - 10), y0 = std::clamp(pos(rng), 0, size - 10);
      for (int y = y0; y < y0 + 10; ++y) {
        for (int x = x0; x < x0 + 10; ++x) fr.labels[static_cast<std::size_t>(y) * size + x] = k;
      }
    }
    out.push_back(std::move(fr));
  }
  return out;
}

ctm::TrackTable labels_as_tracks(int objects, ctm::Frame n) {
  std::vector<ctm::TrackRecord> recs;
  for (int k = 1; k <= objects; ++k) recs.push_back({static_cast<ctm::TrackId>(k), 0, n - 1, 0});
  return ctm::TrackTable(std::move(recs));
}

void BM_MatchFrames(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const int objects = static_cast<int>(state.range(0));
  const auto gt = random_frames(rng, 20, 256, objects, 0);
  const auto pr = random_frames(rng, 20, 256, objects, 2);
  const auto mode = state.range(1) ? ctm::MatchMode::hungarian : ctm::MatchMode::ctc;
  for (auto _ : state) {
    const auto table = ctm::compute_overlaps(gt, pr);
    benchmark::DoNotOptimize(ctm::match(table, labels_as_tracks(objects, 20), labels_as_tracks(objects, 20), mode));
  }
}
BENCHMARK(BM_MatchFrames)->ArgsProduct({{16, 64, 256}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
