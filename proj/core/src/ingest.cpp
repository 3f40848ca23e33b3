#include "ctm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "ctm/parallel.hpp"

namespace ctm {

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

TrackTable parse_ctc_tracks(std::istream& in, const std::string& source) {
  std::vector<TrackRecord> records;
  std::unordered_map<TrackId, std::size_t> line_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) throw ParseError(source, lineno, "expected 4 integers `L B E P`");
    std::int64_t v[4];
    for (int k = 0; k < 4; ++k) {
      if (!parse_int(tokens[k], v[k])) {
        throw ParseError(source, lineno, "not an integer: '" + std::string(tokens[k]) + "'");
      }
    }
    if (v[0] < 1 || v[0] > UINT32_MAX) throw ParseError(source, lineno, "track label must be >= 1");
    if (v[1] < 0 || v[2] < 0) throw ParseError(source, lineno, "negative frame index");
    if (v[2] < v[1]) throw ParseError(source, lineno, "end < begin");
    if (v[3] < 0 || v[3] > UINT32_MAX) throw ParseError(source, lineno, "invalid parent label");
    const auto id = static_cast<TrackId>(v[0]);
    if (!line_of.emplace(id, lineno).second) {
      throw ParseError(source, lineno, "duplicate track label " + std::to_string(id));
    }
    records.push_back({id, static_cast<Frame>(v[1]), static_cast<Frame>(v[2]), static_cast<TrackId>(v[3])});
  }
  for (const auto& r : records) {
    if (r.parent != kNoTrack && !line_of.count(r.parent)) {
      throw ParseError(source, line_of[r.id], "dangling parent " + std::to_string(r.parent));
    }
  }
  return TrackTable(std::move(records));
}

TrackTable read_ctc_tracks(const fs::path& path) {
  auto in = open_in(path);
  return parse_ctc_tracks(in, path.string());
}

void write_ctc_tracks(std::ostream& out, const TrackTable& tracks) {
  for (const auto& r : tracks.records()) {
    out << r.id << ' ' << r.begin << ' ' << r.end << ' ' << r.parent << '\n';
  }
}

void write_ctc_tracks(const fs::path& path, const TrackTable& tracks) {
  auto out = open_out(path);
  write_ctc_tracks(out, tracks);
  if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

LabelFrame parse_text_mask(std::istream& in, Frame frame, const std::string& source) {
  std::string magic;
  if (!(in >> magic) || magic != "P2L") throw ParseError(source, 1, "missing P2L header");
  std::int64_t w = 0, h = 0, maxlabel = 0;
  if (!(in >> w >> h >> maxlabel) || w <= 0 || h <= 0 || maxlabel < 0 || maxlabel > UINT32_MAX) {
    throw ParseError(source, 2, "bad dimensions line");
  }
  LabelFrame out;
  out.frame = frame;
  out.width = static_cast<std::int32_t>(w);
  out.height = static_cast<std::int32_t>(h);
  out.labels.resize(static_cast<std::size_t>(w * h));
  std::string tok;
  for (std::size_t k = 0; k < out.labels.size(); ++k) {
    std::int64_t v = 0;
    if (!(in >> tok) || !parse_int(tok, v)) {
      throw ParseError(source, 3 + k / static_cast<std::size_t>(w), "expected " + std::to_string(w * h) + " labels");
    }
    if (v < 0 || v > maxlabel) {
      throw ParseError(source, 3 + k / static_cast<std::size_t>(w), "label out of range [0, maxlabel]");
    }
    out.labels[k] = static_cast<std::uint32_t>(v);
  }
  if (in >> tok) throw ParseError(source, 0, "trailing data after " + std::to_string(w * h) + " labels");
  return out;
}

LabelFrame read_text_mask(const fs::path& path, Frame frame) {
  auto in = open_in(path);
  return parse_text_mask(in, frame, path.string());
}

void write_text_mask(std::ostream& out, const LabelFrame& image) {
  std::uint32_t maxlabel = 0;
  for (auto v : image.labels) maxlabel = std::max(maxlabel, v);
  out << "P2L\n" << image.width << ' ' << image.height << ' ' << maxlabel << '\n';
  for (std::int32_t y = 0; y < image.height; ++y) {
    for (std::int32_t x = 0; x < image.width; ++x) {
      if (x) out << ' ';
      out << image.at(x, y);
    }
    out << '\n';
  }
}

void write_text_mask(const fs::path& path, const LabelFrame& image) {
  auto out = open_out(path);
  write_text_mask(out, image);
  if (!out) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

std::vector<FrameFile> list_frame_files(const fs::path& dir, std::string_view prefix) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<FrameFile> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".tif" && ext != ".tiff" && ext != ".txt") continue;
    const std::string stem = entry.path().stem().string();
    if (!stem.starts_with(prefix) || stem.size() == prefix.size()) continue;
    const std::string_view digits = std::string_view(stem).substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) continue;
    Frame index = 0;
    if (!parse_int(digits, index)) continue;
    out.push_back({index, entry.path()});
  }
  std::sort(out.begin(), out.end(), [](const FrameFile& a, const FrameFile& b) {
    return a.index != b.index ? a.index < b.index : a.path < b.path;
  });
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].index == out[k - 1].index) {
      throw IoError("two files for frame " + std::to_string(out[k].index) + " in " + dir.string());
    }
  }
  return out;
}

std::vector<LabelFrame> read_label_frames(const fs::path& dir, std::string_view prefix,
                                          const FrameReadOptions& options) {
  const auto files = list_frame_files(dir, prefix);
  if (options.contiguous && !files.empty()) {
    for (std::size_t k = 0; k < files.size(); ++k) {
      const Frame expected = files.front().index + static_cast<Frame>(k);
      if (files[k].index != expected) {
        throw IoError("missing frame " + std::to_string(expected) + " in " + dir.string());
      }
    }
    if (files.front().index != 0) {
      throw IoError("missing frame 0 in " + dir.string() + " (first frame is " +
                    std::to_string(files.front().index) + ")");
    }
  }
  std::vector<LabelFrame> frames(files.size());
  parallel_for(files.size(), [&](std::size_t k) {
    const auto& f = files[k];
    frames[k] = f.path.extension() == ".txt" ? read_text_mask(f.path, f.index) : tiff::read(f.path, f.index);
  });
  for (const auto& f : frames) {
    if (f.width != frames.front().width || f.height != frames.front().height) {
      throw IoError("inconsistent dimensions: frame " + std::to_string(f.frame) + " is " +
                    std::to_string(f.width) + "x" + std::to_string(f.height) + ", frame " +
                    std::to_string(frames.front().frame) + " is " + std::to_string(frames.front().width) + "x" +
                    std::to_string(frames.front().height));
    }
  }
  return frames;
}

// ---------------------------------------------------------------------------

namespace {

std::string sequence_name(const fs::path& dir) {
  std::string name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  for (std::string_view suffix : {"_GT", "_RES"}) {
    if (name.size() > suffix.size() && name.ends_with(suffix)) return name.substr(0, name.size() - suffix.size());
  }
  return name;
}

}  // namespace

DatasetHandle probe_dataset(const fs::path& path) {
  DatasetHandle h;
  if (fs::is_regular_file(path)) {
    h.kind = DatasetKind::mot_boxes;
    h.sequence = path.stem().string();
    h.tracks_file = path;
    return h;
  }
  if (!fs::is_directory(path)) throw IoError("no such dataset: " + path.string());
  h.kind = DatasetKind::ctc_masks;
  fs::path norm = path;
  if (norm.filename().empty()) norm = norm.parent_path();
  if (fs::is_regular_file(norm / "TRA" / "man_track.txt")) {
    h.sequence = sequence_name(norm);
    h.tracks_file = norm / "TRA" / "man_track.txt";
    h.frames_dir = norm / "TRA";
    h.frame_prefix = "man_track";
  } else if (fs::is_regular_file(norm / "man_track.txt")) {
    h.sequence = sequence_name(norm.filename() == "TRA" ? norm.parent_path() : norm);
    h.tracks_file = norm / "man_track.txt";
    h.frames_dir = norm;
    h.frame_prefix = "man_track";
  } else if (fs::is_regular_file(norm / "res_track.txt")) {
    h.sequence = sequence_name(norm);
    h.tracks_file = norm / "res_track.txt";
    h.frames_dir = norm;
    h.frame_prefix = "mask";
  } else {
    throw IoError("no man_track.txt or res_track.txt under " + path.string());
  }
  h.frame_count = static_cast<Frame>(list_frame_files(h.frames_dir, h.frame_prefix).size());
  return h;
}

CtcSequence read_ctc_sequence(const fs::path& path) {
  CtcSequence seq;
  seq.handle = probe_dataset(path);
  if (seq.handle.kind != DatasetKind::ctc_masks) throw IoError(path.string() + " is not a CTC directory");
  seq.tracks = read_ctc_tracks(seq.handle.tracks_file);
  seq.frames = read_label_frames(seq.handle.frames_dir, seq.handle.frame_prefix);
  return seq;
}

std::vector<LabelFrame> read_seg_frames(const fs::path& gt_dir) {
  const fs::path dir = gt_dir / "SEG";
  if (!fs::is_directory(dir)) return {};
  return read_label_frames(dir, "man_seg", {.contiguous = false});
}

void write_ctc_result(const TrackTable& tracks, std::span<const LabelFrame> frames, const fs::path& dir,
                      tiff::Compression compression) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_ctc_tracks(dir / "res_track.txt", tracks);
  Frame last = 0;
  for (const auto& f : frames) last = std::max(last, f.frame);
  const int width = last < 1000 ? 3 : 4;
  for (const auto& f : frames) {
    char name[32];
    std::snprintf(name, sizeof name, "mask%0*d.tif", width, f.frame);
    tiff::write(dir / name, f, compression);
  }
}

// ---------------------------------------------------------------------------

Milli parse_milli(std::string_view text) {
  text = trim(text);
  bool neg = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  auto digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || whole.size() > 15) {
    throw std::invalid_argument("not a decimal number: '" + std::string(text) + "'");
  }
  std::int64_t value = 0;
  for (char c : whole) value = value * 10 + (c - '0');
  std::int64_t milli = 0;
  for (std::size_t k = 0; k < 3; ++k) milli = milli * 10 + (k < frac.size() ? frac[k] - '0' : 0);
  value = value * 1000 + milli;
  if (frac.size() > 3 && frac[3] >= '5') ++value;
  return neg ? -value : value;
}

std::string format_milli(Milli value) {
  std::string out;
  if (value < 0) {
    out.push_back('-');
    value = -value;
  }
  out += std::to_string(value / 1000);
  std::int64_t frac = value % 1000;
  if (frac) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ".%03lld", static_cast<long long>(frac));
    std::string f(buf);
    while (f.back() == '0') f.pop_back();
    out += f;
  }
  return out;
}

MotData parse_mot_boxes(std::istream& in, const std::string& source, const MotReadOptions& options) {
  MotData data;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::pair<Frame, TrackId>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      fields.push_back(trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 6) throw ParseError(source, lineno, "expected at least 6 fields `frame,id,x,y,w,h`");
    std::int64_t frame = 0, id = 0;
    if (!parse_int(fields[0], frame)) {
      throw ParseError(source, lineno, "non-numeric frame '" + std::string(fields[0]) + "'");
    }
    if (!parse_int(fields[1], id)) throw ParseError(source, lineno, "non-numeric id '" + std::string(fields[1]) + "'");
    if (frame < 1) throw ParseError(source, lineno, "frame numbers start at 1");
    if (id < 1 || id > UINT32_MAX) throw ParseError(source, lineno, "id must be >= 1");
    BoxDetection b;
    b.frame = static_cast<Frame>(frame - 1);
    b.id = static_cast<TrackId>(id);
    try {
      b.x = parse_milli(fields[2]);
      b.y = parse_milli(fields[3]);
      b.w = parse_milli(fields[4]);
      b.h = parse_milli(fields[5]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, std::string("non-numeric field: ") + e.what());
    }
    if (b.w <= 0 || b.h <= 0) throw ParseError(source, lineno, "non-positive extent");
    if (!seen.emplace(std::pair{b.frame, b.id}, lineno).second) {
      throw ParseError(source, lineno, "duplicate (frame, id) = (" + std::to_string(frame) + ", " +
                                           std::to_string(id) + ")");
    }
    data.boxes.push_back(b);
  }

  std::sort(data.boxes.begin(), data.boxes.end(),
            [](const BoxDetection& a, const BoxDetection& b) { return std::tie(a.frame, a.id) < std::tie(b.frame, b.id); });

  std::map<TrackId, std::vector<Frame>> frames_of;
  for (const auto& b : data.boxes) {
    frames_of[b.id].push_back(b.frame);
    data.n_frames = std::max(data.n_frames, b.frame + 1);
  }

  std::vector<TrackRecord> records;
  TrackId next_id = frames_of.empty() ? 1 : frames_of.rbegin()->first + 1;
  // (original id, first frame of fragment) -> fragment id, only for split tracks.
  std::map<std::pair<TrackId, Frame>, TrackId> fragments;
  for (auto& [id, frames] : frames_of) {
    TrackRecord current{id, frames.front(), frames.front(), kNoTrack};
    for (std::size_t k = 1; k < frames.size(); ++k) {
      if (frames[k] == frames[k - 1] + 1 || !options.strict) {
        current.end = frames[k];
        continue;
      }
      records.push_back(current);
      const TrackId fresh = next_id++;
      data.warnings.push_back(source + ": track " + std::to_string(id) + " has a gap before frame " +
                              std::to_string(frames[k] + 1) + "; fragment relabelled " + std::to_string(fresh));
      fragments[{id, frames[k]}] = fresh;
      current = {fresh, frames[k], frames[k], kNoTrack};
    }
    records.push_back(current);
  }
  if (!fragments.empty()) {
    for (auto& b : data.boxes) {
      auto it = fragments.upper_bound({b.id, b.frame});
      if (it == fragments.begin()) continue;
      --it;
      if (it->first.first == b.id) b.id = it->second;
    }
    std::sort(data.boxes.begin(), data.boxes.end(), [](const BoxDetection& a, const BoxDetection& b) {
      return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });
  }
  data.tracks = TrackTable(std::move(records));
  return data;
}

MotData read_mot_boxes(const fs::path& path, const MotReadOptions& options) {
  auto in = open_in(path);
  return parse_mot_boxes(in, path.string(), options);
}

void write_mot_boxes(std::ostream& out, std::span<const BoxDetection> boxes) {
  std::vector<BoxDetection> sorted(boxes.begin(), boxes.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const BoxDetection& a, const BoxDetection& b) { return std::tie(a.frame, a.id) < std::tie(b.frame, b.id); });
  for (const auto& b : sorted) {
    out << (b.frame + 1) << ',' << b.id << ',' << format_milli(b.x) << ',' << format_milli(b.y) << ','
        << format_milli(b.w) << ',' << format_milli(b.h) << '\n';
  }
}

void write_mot_boxes(const fs::path& path, std::span<const BoxDetection> boxes) {
  auto out = open_out(path);
  write_mot_boxes(out, boxes);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace ctm
