#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ctm/types.hpp"

/// Minimal baseline TIFF codec for single-channel label images.
///
/// Reads the first image of a classic (non-Big) TIFF in either byte order,
/// 8 or 16 bit unsigned samples, strip layout, uncompressed or deflate
/// (compression 8 / 32946), optional horizontal predictor. Writes 16 bit
/// little-endian single-strip files.
namespace ctm::tiff {

enum class Compression { none, deflate };

LabelFrame decode(std::span<const std::uint8_t> bytes, Frame frame, const std::string& source = "<memory>");
std::vector<std::uint8_t> encode(const LabelFrame& image, Compression compression = Compression::deflate);

LabelFrame read(const std::filesystem::path& path, Frame frame);
void write(const std::filesystem::path& path, const LabelFrame& image,
           Compression compression = Compression::deflate);

}  // namespace ctm::tiff
