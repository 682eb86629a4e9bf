#pragma once

#include "rgbspeckle/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rgbspeckle::io {

/// Reads an 8- or 16-bit RGB/RGBA/gray/gray-alpha PNG. Samples are divided by
/// the channel maximum (255 or 65535); gray is replicated into all planes and
/// alpha is dropped.
RgbImage read_png(const std::filesystem::path& path);

/// Writes 8-bit RGB. Samples are clamped to [0,1] and quantized as
/// floor(v*255 + 0.5).
void write_png(const RgbImage& img, const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG from a single plane (same quantization).
void write_png(const GrayImage& img, const std::filesystem::path& path);

/// Masks are stored as 8-bit grayscale, 255 = true. Any nonzero reads as true.
void write_mask_png(const ValidityMask& mask, const std::filesystem::path& path);
ValidityMask read_mask_png(const std::filesystem::path& path);

/// 8-bit quantization used at the PNG boundary.
std::uint8_t quantize8(float v);

/// Single-channel "Pf" PFM. Writing always emits little-endian (scale -1.0)
/// with the bottom row first; reading also accepts big-endian files.
DisparityMap read_pfm(const std::filesystem::path& path);
void write_pfm(const DisparityMap& map, const std::filesystem::path& path);
GrayImage read_pfm_gray(const std::filesystem::path& path);
void write_pfm(const GrayImage& img, const std::filesystem::path& path);

/// PFM encoding in memory; used for golden-byte tests and hashing.
std::vector<std::uint8_t> encode_pfm(std::span<const float> row_major, int width, int height);

struct ColoredPoint {
    double x = 0, y = 0, z = 0;
    std::uint8_t r = 0, g = 0, b = 0;
};

/// ASCII PLY with one `x y z red green blue` line per vertex. `comments`
/// become `comment` header lines.
void write_ply(std::span<const ColoredPoint> points, const std::filesystem::path& path,
               std::span<const std::string> comments = {});
std::string encode_ply(std::span<const ColoredPoint> points, std::span<const std::string> comments = {});

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace rgbspeckle::io
