#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <filesystem>
#include <numeric>
#include <unistd.h>

#include "ctm/perturb.hpp"

namespace ctmtest {

using ctm::Frame;
using ctm::TrackId;
using ctm::TrackRecord;

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

ctm::TrackTable random_forest(Rng& rng, const ForestOptions& o) {
  struct Pending {
    Frame begin;
    std::size_t parent;  // index + 1, 0 = root
  };
  std::deque<Pending> queue;
  const int roots = std::max(1, std::min(o.roots, o.max_tracks));
  for (int r = 0; r < roots; ++r) queue.push_back({uniform(rng, 0, std::max(0, o.n_frames - 1)), 0});

  std::vector<TrackRecord> recs;
  while (!queue.empty() && static_cast<int>(recs.size()) < o.max_tracks) {
    const Pending p = queue.front();
    queue.pop_front();
    const Frame len = uniform(rng, o.min_length, std::max(o.min_length, o.max_length));
    const Frame end = std::min(p.begin + len - 1, o.n_frames - 1);
    recs.push_back({static_cast<TrackId>(recs.size() + 1), p.begin, end, static_cast<TrackId>(p.parent)});
    const std::size_t self = recs.size();
    const int room = o.max_tracks - static_cast<int>(recs.size() + queue.size());
    if (end + 1 < o.n_frames && room >= 2 && chance(rng, o.divide_prob)) {
      queue.push_back({end + 1, self});
      queue.push_back({end + 1, self});
    }
  }

  std::vector<TrackId> ids(recs.size());
  std::iota(ids.begin(), ids.end(), TrackId{1});
  if (o.sparse_ids) {
    std::vector<TrackId> pool(recs.size() * 4);
    std::iota(pool.begin(), pool.end(), TrackId{1});
    std::shuffle(pool.begin(), pool.end(), rng);
    std::copy_n(pool.begin(), ids.size(), ids.begin());
  }
  for (auto& r : recs) {
    r.id = ids[r.id - 1];
    if (r.parent != ctm::kNoTrack) r.parent = ids[r.parent - 1];
  }
  return ctm::TrackTable(std::move(recs));
}

std::vector<ctm::Occurrence> dense_occurrences(const ctm::TrackTable& tracks) {
  std::vector<ctm::Occurrence> occ;
  for (const auto& r : tracks.records()) {
    for (Frame f = r.begin; f <= r.end; ++f) occ.push_back({f, r.id});
  }
  std::sort(occ.begin(), occ.end());
  return occ;
}

ctm::TrackingData random_dataset(Rng& rng, const ForestOptions& o) {
  ctm::TrackingData d;
  d.tracks = random_forest(rng, o);
  d.occurrences = dense_occurrences(d.tracks);
  for (const auto& r : d.tracks.records()) d.n_frames = std::max(d.n_frames, r.end + 1);
  return d;
}

ctm::TrackingData dividing_dataset(int roots, int depth, Frame cycle) {
  std::vector<TrackRecord> recs;
  TrackId next = 1;
  for (int r = 0; r < roots; ++r) {
    std::vector<TrackId> level{next};
    recs.push_back({next++, 0, cycle - 1, ctm::kNoTrack});
    for (int d = 1; d < depth; ++d) {
      std::vector<TrackId> below;
      for (TrackId p : level) {
        for (int k = 0; k < 2; ++k) {
          recs.push_back({next, d * cycle, (d + 1) * cycle - 1, p});
          below.push_back(next++);
        }
      }
      level = std::move(below);
    }
  }
  ctm::TrackingData data;
  data.tracks = ctm::TrackTable(std::move(recs));
  data.occurrences = dense_occurrences(data.tracks);
  data.n_frames = depth * cycle;
  return data;
}

std::vector<ctm::LabelFrame> render(const ctm::TrackingData& data, int cell) {
  const auto n = static_cast<int>(std::max<std::size_t>(1, data.tracks.size()));
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  const int rows = (n + cols - 1) / cols;
  const int pitch = cell + 1;

  std::vector<ctm::LabelFrame> frames(static_cast<std::size_t>(data.n_frames));
  for (Frame f = 0; f < data.n_frames; ++f) {
    auto& fr = frames[static_cast<std::size_t>(f)];
    fr.frame = f;
    fr.width = cols * pitch;
    fr.height = rows * pitch;
    fr.labels.assign(static_cast<std::size_t>(fr.width) * fr.height, 0);
  }
  const auto recs = data.tracks.records();
  for (const auto& o : data.occurrences) {
    const auto it = std::lower_bound(recs.begin(), recs.end(), o.id,
                                     [](const TrackRecord& r, TrackId id) { return r.id < id; });
    const int slot = static_cast<int>(it - recs.begin());
    auto& fr = frames[static_cast<std::size_t>(o.frame)];
    const int x0 = (slot % cols) * pitch, y0 = (slot / cols) * pitch;
    for (int y = y0; y < y0 + cell; ++y) {
      for (int x = x0; x < x0 + cell; ++x) fr.labels[static_cast<std::size_t>(y) * fr.width + x] = o.id;
    }
  }
  return frames;
}

ctm::MatchedSequence random_matched(Rng& rng, const MatchedOptions& o) {
  ctm::TrackTable gt = random_forest(rng, o.gt);
  ctm::TrackTable pr = random_forest(rng, o.pr);
  const Frame n_frames = std::max(o.gt.n_frames, o.pr.n_frames);
  std::uniform_real_distribution<double> jac(0.3, 1.0);

  std::vector<ctm::TpEntry> tp;
  std::vector<ctm::FpEntry> fp;
  std::vector<ctm::FnEntry> fn;
  for (Frame f = 0; f < n_frames; ++f) {
    std::vector<TrackId> gs, ps;
    for (const auto& r : gt.records()) {
      if (r.alive_at(f)) gs.push_back(r.id);
    }
    for (const auto& r : pr.records()) {
      if (r.alive_at(f)) ps.push_back(r.id);
    }
    std::shuffle(gs.begin(), gs.end(), rng);
    std::vector<char> used(ps.size(), 0);
    for (TrackId g : gs) {
      std::vector<std::size_t> options;
      for (std::size_t k = 0; k < ps.size(); ++k) {
        if (o.multi || !used[k]) options.push_back(k);
      }
      if (!options.empty() && chance(rng, o.tp_prob)) {
        const std::size_t k = options[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(options.size()) - 1))];
        used[k] = 1;
        tp.push_back({f, ps[k], g, jac(rng)});
      } else {
        fn.push_back({f, g});
      }
    }
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (!used[k]) fp.push_back({f, ps[k]});
    }
  }
  return ctm::MatchedSequence::assemble(std::move(tp), std::move(fp), std::move(fn), std::move(gt), std::move(pr),
                                        n_frames, o.multi ? ctm::MatchMode::ctc : ctm::MatchMode::hungarian);
}

ctm::MatchedSequence random_perturbed(Rng& rng, const ForestOptions& o, int max_steps) {
  ctm::MatchedSequence m = ctm::perfect_result(random_dataset(rng, o));
  const int steps = uniform(rng, 1, max_steps);
  for (int s = 0; s < steps; ++s) {
    const auto kind = ctm::kAllErrorKinds[uniform(rng, 0, 4)];
    ctm::Perturbation p{kind, static_cast<std::size_t>(uniform(rng, 0, 6)), rng()};
    m = ctm::apply(m, p).result;
  }
  return m;
}

ctm::LabelFrame random_label_frame(Rng& rng, std::int32_t width, std::int32_t height, int objects,
                                   TrackId first_id) {
  ctm::LabelFrame fr{0, width, height, std::vector<std::uint32_t>(static_cast<std::size_t>(width) * height, 0)};
  for (int k = 0; k < objects; ++k) {
    const int x0 = uniform(rng, 0, width - 1), y0 = uniform(rng, 0, height - 1);
    const int x1 = std::min(width, x0 + uniform(rng, 1, std::max(1, width / 2)));
    const int y1 = std::min(height, y0 + uniform(rng, 1, std::max(1, height / 2)));
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) fr.labels[static_cast<std::size_t>(y) * width + x] = first_id + k;
    }
  }
  return fr;
}

ctm::LabelFrame paint(std::int32_t width, std::int32_t height, const std::vector<Rect>& rects) {
  ctm::LabelFrame f{0, width, height, std::vector<std::uint32_t>(static_cast<std::size_t>(width) * height, 0)};
  for (const auto& r : rects) {
    for (int y = std::max(0, r.y0); y < std::min(height, r.y1); ++y) {
      for (int x = std::max(0, r.x0); x < std::min(width, r.x1); ++x) {
        f.labels[static_cast<std::size_t>(y) * width + x] = r.id;
      }
    }
  }
  return f;
}

std::pair<ctm::LabelFrame, ctm::LabelFrame> jittered_frame(Rng& rng) {
  std::uniform_int_distribution<int> count(1, 7), pos(0, 20), size(3, 9), jit(-3, 3), coin(0, 5);
  std::vector<Rect> g, p;
  const int n = count(rng);
  for (int k = 0; k < n; ++k) {
    const int x = pos(rng), y = pos(rng);
    g.push_back({x, y, x + size(rng), y + size(rng), static_cast<TrackId>(k + 1)});
  }
  for (const auto& r : g) {
    if (coin(rng) == 0) continue;
    p.push_back({r.x0 + jit(rng), r.y0 + jit(rng), r.x1 + jit(rng), r.y1 + jit(rng), r.id + 20});
  }
  while (p.size() < 7 && coin(rng) == 0) {
    const int x = pos(rng), y = pos(rng);
    p.push_back({x, y, x + size(rng), y + size(rng), static_cast<TrackId>(40 + p.size())});
  }
  return {paint(30, 30, g), paint(30, 30, p)};
}

std::string temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / ("ctm_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

}  // namespace ctmtest
