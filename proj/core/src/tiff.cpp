#include "ctm/tiff.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>

namespace ctm::tiff {

namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kSampleFormat = 339,
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, 0, "TIFF: " + what); }

  void set_big_endian(bool big) { big_ = big; }
  bool big_endian() const { return big_; }

  std::uint16_t u16(std::size_t off) const {
    need(off, 2);
    const auto a = bytes_[off], b = bytes_[off + 1];
    return big_ ? static_cast<std::uint16_t>(a << 8 | b) : static_cast<std::uint16_t>(b << 8 | a);
  }
  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
      const std::uint32_t byte = bytes_[off + (big_ ? k : 3 - k)];
      v = v << 8 | byte;
    }
    return v;
  }
  void need(std::size_t off, std::size_t n) const {
    if (off > bytes_.size() || bytes_.size() - off < n) fail("truncated file");
  }
  std::span<const std::uint8_t> slice(std::size_t off, std::size_t n) const {
    need(off, n);
    return bytes_.subspan(off, n);
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string source_;
  bool big_ = false;
};

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;  // BYTE ASCII SBYTE UNDEFINED
    case 3: case 8: return 2;                  // SHORT SSHORT
    case 4: case 9: case 11: return 4;         // LONG SLONG FLOAT
    case 5: case 10: case 12: return 8;        // RATIONAL SRATIONAL DOUBLE
    default: return 0;
  }
}

std::vector<std::uint64_t> entry_values(const Reader& r, std::size_t entry_off) {
  const std::uint16_t type = r.u16(entry_off + 2);
  const std::uint32_t count = r.u32(entry_off + 4);
  const std::size_t size = type_size(type);
  if (size == 0) return {};
  const std::size_t total = size * count;
  const std::size_t base = total <= 4 ? entry_off + 8 : r.u32(entry_off + 8);
  r.need(base, total);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    switch (type) {
      case 1: case 6: case 7: out.push_back(r.slice(base + k, 1)[0]); break;
      case 3: case 8: out.push_back(r.u16(base + 2 * k)); break;
      case 4: case 9: out.push_back(r.u32(base + 4 * k)); break;
      default: out.push_back(0); break;
    }
  }
  return out;
}

std::vector<std::uint8_t> inflate_strip(std::span<const std::uint8_t> in, std::size_t expected, const Reader& r) {
  std::vector<std::uint8_t> out(expected);
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) r.fail("zlib init failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END && !(rc == Z_BUF_ERROR && produced == expected) && !(rc == Z_OK && produced == expected)) {
    r.fail("corrupt deflate stream");
  }
  if (produced < expected) r.fail("deflate strip shorter than expected");
  return out;
}

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) b.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

}  // namespace

LabelFrame decode(std::span<const std::uint8_t> bytes, Frame frame, const std::string& source) {
  Reader r(bytes, source);
  r.need(0, 8);
  if (bytes[0] == 'I' && bytes[1] == 'I') {
    r.set_big_endian(false);
  } else if (bytes[0] == 'M' && bytes[1] == 'M') {
    r.set_big_endian(true);
  } else {
    r.fail("bad byte-order mark");
  }
  const auto magic = r.u16(2);
  if (magic == 43) r.fail("BigTIFF is not supported");
  if (magic != 42) r.fail("bad magic number");

  const std::size_t ifd = r.u32(4);
  const std::uint16_t n_entries = r.u16(ifd);
  std::map<std::uint16_t, std::vector<std::uint64_t>> tags;
  for (std::uint16_t k = 0; k < n_entries; ++k) {
    const std::size_t e = ifd + 2 + 12 * static_cast<std::size_t>(k);
    tags[r.u16(e)] = entry_values(r, e);
  }
  auto scalar = [&](std::uint16_t tag, std::uint64_t fallback) -> std::uint64_t {
    auto it = tags.find(tag);
    return (it == tags.end() || it->second.empty()) ? fallback : it->second.front();
  };

  if (tags.count(kTileWidth)) r.fail("tiled images are not supported");
  const auto width = scalar(kImageWidth, 0);
  const auto height = scalar(kImageLength, 0);
  if (width == 0 || height == 0) r.fail("missing image dimensions");
  if (scalar(kSamplesPerPixel, 1) != 1) r.fail("only single-channel images are supported");
  const auto bits = scalar(kBitsPerSample, 1);
  if (bits != 8 && bits != 16) r.fail("unsupported bit depth " + std::to_string(bits));
  const auto format = scalar(kSampleFormat, 1);
  if (format != 1) r.fail("only unsigned integer samples are supported");
  const auto compression = scalar(kCompression, 1);
  if (compression != 1 && compression != 8 && compression != 32946) {
    r.fail("unsupported compression " + std::to_string(compression));
  }
  const auto predictor = scalar(kPredictor, 1);
  if (predictor != 1 && predictor != 2) r.fail("unsupported predictor " + std::to_string(predictor));

  const auto rows_per_strip = std::min<std::uint64_t>(scalar(kRowsPerStrip, height), height);
  const auto& offsets = tags[kStripOffsets];
  const auto& counts = tags[kStripByteCounts];
  if (offsets.empty() || offsets.size() != counts.size()) r.fail("inconsistent strip tables");

  const std::size_t bps = bits / 8;
  const std::size_t row_bytes = width * bps;
  std::vector<std::uint8_t> raw;
  raw.reserve(row_bytes * height);
  std::uint64_t rows_left = height;
  for (std::size_t s = 0; s < offsets.size() && rows_left > 0; ++s) {
    const auto rows = std::min(rows_per_strip, rows_left);
    const std::size_t expected = rows * row_bytes;
    auto chunk = r.slice(offsets[s], counts[s]);
    if (compression == 1) {
      if (chunk.size() < expected) r.fail("strip shorter than expected");
      raw.insert(raw.end(), chunk.begin(), chunk.begin() + static_cast<std::ptrdiff_t>(expected));
    } else {
      auto strip = inflate_strip(chunk, expected, r);
      raw.insert(raw.end(), strip.begin(), strip.begin() + static_cast<std::ptrdiff_t>(expected));
    }
    rows_left -= rows;
  }
  if (rows_left != 0) r.fail("not enough strips for image height");

  LabelFrame out;
  out.frame = frame;
  out.width = static_cast<std::int32_t>(width);
  out.height = static_cast<std::int32_t>(height);
  out.labels.resize(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    std::uint32_t prev = 0;
    for (std::size_t x = 0; x < width; ++x) {
      const std::size_t off = y * row_bytes + x * bps;
      std::uint32_t v = raw[off];
      if (bps == 2) {
        v = r.big_endian() ? (static_cast<std::uint32_t>(raw[off]) << 8 | raw[off + 1])
                           : (static_cast<std::uint32_t>(raw[off + 1]) << 8 | raw[off]);
      }
      if (predictor == 2) {
        v = (v + prev) & (bps == 2 ? 0xffffu : 0xffu);
        prev = v;
      }
      out.labels[y * width + x] = v;
    }
  }
  return out;
}

std::vector<std::uint8_t> encode(const LabelFrame& image, Compression compression) {
  if (image.width <= 0 || image.height <= 0) throw std::invalid_argument("TIFF: empty image");
  std::vector<std::uint8_t> pixels;
  pixels.reserve(image.labels.size() * 2);
  for (auto v : image.labels) {
    if (v > 0xffff) throw std::invalid_argument("TIFF: label " + std::to_string(v) + " exceeds 16 bits");
    put16(pixels, static_cast<std::uint16_t>(v));
  }
  if (compression == Compression::deflate) {
    uLongf size = compressBound(static_cast<uLong>(pixels.size()));
    std::vector<std::uint8_t> packed(size);
    if (compress2(packed.data(), &size, pixels.data(), static_cast<uLong>(pixels.size()), 6) != Z_OK) {
      throw std::runtime_error("TIFF: deflate failed");
    }
    packed.resize(size);
    pixels = std::move(packed);
  }

  std::vector<std::uint8_t> out;
  out.reserve(pixels.size() + 256);
  out.push_back('I');
  out.push_back('I');
  put16(out, 42);
  const std::uint32_t data_off = 8;
  std::uint32_t ifd_off = data_off + static_cast<std::uint32_t>(pixels.size());
  ifd_off += ifd_off & 1u;
  put32(out, ifd_off);
  out.insert(out.end(), pixels.begin(), pixels.end());
  if (out.size() < ifd_off) out.push_back(0);

  struct Entry {
    std::uint16_t tag, type;
    std::uint32_t value;
  };
  const std::uint32_t w = static_cast<std::uint32_t>(image.width);
  const std::uint32_t h = static_cast<std::uint32_t>(image.height);
  const Entry entries[] = {
      {kImageWidth, 4, w},
      {kImageLength, 4, h},
      {kBitsPerSample, 3, 16},
      {kCompression, 3, compression == Compression::deflate ? 8u : 1u},
      {kPhotometric, 3, 1},
      {kStripOffsets, 4, data_off},
      {kSamplesPerPixel, 3, 1},
      {kRowsPerStrip, 4, h},
      {kStripByteCounts, 4, static_cast<std::uint32_t>(pixels.size())},
      {kPlanarConfig, 3, 1},
      {kSampleFormat, 3, 1},
  };
  put16(out, static_cast<std::uint16_t>(std::size(entries)));
  for (const auto& e : entries) {
    put16(out, e.tag);
    put16(out, e.type);
    put32(out, 1);
    if (e.type == 3) {
      put16(out, static_cast<std::uint16_t>(e.value));
      put16(out, 0);
    } else {
      put32(out, e.value);
    }
  }
  put32(out, 0);
  return out;
}

LabelFrame read(const std::filesystem::path& path, Frame frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes, frame, path.string());
}

void write(const std::filesystem::path& path, const LabelFrame& image, Compression compression) {
  const auto bytes = encode(image, compression);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace ctm::tiff
