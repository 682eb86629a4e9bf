#include "rgbspeckle/io.hpp"

#include "rgbspeckle/error.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace rgbspeckle::io {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("imgcore", msg); }

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngRaw {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
    int channels = 0;
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    char error[256] = {};
};

void png_error_cb(png_structp png, png_const_charp msg) {
    auto* raw = static_cast<PngRaw*>(png_get_error_ptr(png));
    std::snprintf(raw->error, sizeof(raw->error), "%s", msg);
    std::longjmp(png_jmpbuf(png), 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

// Only trivially destructible locals live in this frame; it is the setjmp target.
// Returns 0 on success, 1 on libpng error, 2 on unsupported format.
int decode_png(std::FILE* fp, PngRaw* raw) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, raw, png_error_cb, png_warning_cb);
    if (!png) return 1;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return 1;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return 1;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    raw->width = png_get_image_width(png, info);
    raw->height = png_get_image_height(png, info);
    raw->bit_depth = png_get_bit_depth(png, info);
    raw->color_type = png_get_color_type(png, info);
    if ((raw->bit_depth != 8 && raw->bit_depth != 16) ||
        (raw->color_type != PNG_COLOR_TYPE_GRAY && raw->color_type != PNG_COLOR_TYPE_RGB &&
         raw->color_type != PNG_COLOR_TYPE_GRAY_ALPHA && raw->color_type != PNG_COLOR_TYPE_RGB_ALPHA)) {
        png_destroy_read_struct(&png, &info, nullptr);
        return 2;
    }
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    raw->channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw->pixels.resize(rowbytes * raw->height);
    raw->rows.resize(raw->height);
    for (png_uint_32 y = 0; y < raw->height; ++y) raw->rows[y] = raw->pixels.data() + y * rowbytes;
    png_read_image(png, raw->rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return 0;
}

struct PngOut {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int color_type = 0;
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    char error[256] = {};
};

int encode_png(std::FILE* fp, PngOut* out) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, out, png_error_cb, png_warning_cb);
    if (!png) return 1;
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        return 1;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return 1;
    }
    png_init_io(png, fp);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, out->width, out->height, 8, out->color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, out->rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return 0;
}

void write_png_bytes(PngOut& out, const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open '" + path.string() + "' for writing");
    const int channels = out.color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
    out.rows.resize(out.height);
    for (png_uint_32 y = 0; y < out.height; ++y)
        out.rows[y] = out.pixels.data() + static_cast<std::size_t>(y) * out.width * channels;
    if (encode_png(fp.get(), &out) != 0)
        fail("PNG encode failed for '" + path.string() + "': " + out.error);
    if (std::fflush(fp.get()) != 0) fail("write failed for '" + path.string() + "'");
}

std::string color_type_name(int ct) {
    switch (ct) {
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    case PNG_COLOR_TYPE_GRAY: return "gray";
    case PNG_COLOR_TYPE_RGB: return "rgb";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "gray+alpha";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "rgba";
    default: return std::to_string(ct);
    }
}

} // namespace

std::uint8_t quantize8(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<std::uint8_t>(std::floor(c * 255.0f + 0.5f));
}

RgbImage read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open '" + path.string() + "'");
    PngRaw raw;
    const int rc = decode_png(fp.get(), &raw);
    if (rc == 2) {
        if (raw.bit_depth != 8 && raw.bit_depth != 16)
            fail("unsupported PNG bit depth " + std::to_string(raw.bit_depth) + " in '" + path.string() + "'");
        fail("unsupported PNG color type " + color_type_name(raw.color_type) + " in '" + path.string() + "'");
    }
    if (rc != 0) fail("PNG decode failed for '" + path.string() + "': " + raw.error);

    const int w = static_cast<int>(raw.width);
    const int h = static_cast<int>(raw.height);
    RgbImage img(w, h);
    const bool wide = raw.bit_depth == 16;
    const float maxv = wide ? 65535.0f : 255.0f;
    const int bytes_per_sample = wide ? 2 : 1;
    const bool gray = raw.color_type == PNG_COLOR_TYPE_GRAY || raw.color_type == PNG_COLOR_TYPE_GRAY_ALPHA;
    for (int y = 0; y < h; ++y) {
        const png_byte* row = raw.rows[y];
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < 3; ++c) {
                const int src = gray ? 0 : c;
                const png_byte* p = row + (static_cast<std::size_t>(x) * raw.channels + src) * bytes_per_sample;
                const unsigned v = wide ? (static_cast<unsigned>(p[0]) << 8) | p[1] : p[0];
                img.plane(c)(x, y) = static_cast<float>(v) / maxv;
            }
        }
    }
    return img;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
    PngOut out;
    out.width = static_cast<png_uint_32>(img.width());
    out.height = static_cast<png_uint_32>(img.height());
    out.color_type = PNG_COLOR_TYPE_RGB;
    out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
    std::size_t k = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) out.pixels[k++] = quantize8(img.plane(c)(x, y));
    write_png_bytes(out, path);
}

void write_png(const GrayImage& img, const std::filesystem::path& path) {
    PngOut out;
    out.width = static_cast<png_uint_32>(img.width());
    out.height = static_cast<png_uint_32>(img.height());
    out.color_type = PNG_COLOR_TYPE_GRAY;
    out.pixels.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) out.pixels[i] = quantize8(img[i]);
    write_png_bytes(out, path);
}

void write_mask_png(const ValidityMask& mask, const std::filesystem::path& path) {
    PngOut out;
    out.width = static_cast<png_uint_32>(mask.width());
    out.height = static_cast<png_uint_32>(mask.height());
    out.color_type = PNG_COLOR_TYPE_GRAY;
    out.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) out.pixels[i] = mask[i] ? 255 : 0;
    write_png_bytes(out, path);
}

ValidityMask read_mask_png(const std::filesystem::path& path) {
    const RgbImage img = read_png(path);
    ValidityMask m(img.width(), img.height(), false);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.set(i, img.r()[i] > 0.0f || img.g()[i] > 0.0f || img.b()[i] > 0.0f);
    return m;
}

// ---------------------------------------------------------------------------
// PFM

std::vector<std::uint8_t> encode_pfm(std::span<const float> row_major, int width, int height) {
    if (row_major.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        fail("PFM sample count does not match dimensions");
    const std::string header = "Pf\n" + std::to_string(width) + " " + std::to_string(height) + "\n-1.0\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(header.size() + row_major.size() * 4);
    for (int y = height - 1; y >= 0; --y) {
        for (int x = 0; x < width; ++x) {
            const auto bits = std::bit_cast<std::uint32_t>(row_major[static_cast<std::size_t>(y) * width + x]);
            for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        }
    }
    return bytes;
}

namespace {

struct PfmData {
    int width = 0;
    int height = 0;
    std::vector<float> row_major;
};

PfmData decode_pfm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    };
    auto token = [&] {
        skip_ws();
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
        return t;
    };
    const std::string magic = token();
    if (magic == "PF") fail("unsupported 3-channel PFM 'PF' in '" + name + "'");
    if (magic != "Pf") fail("malformed PFM header in '" + name + "': bad magic");
    int width = 0, height = 0;
    double scale = 0;
    try {
        width = std::stoi(token());
        height = std::stoi(token());
        scale = std::stod(token());
    } catch (const std::exception&) {
        fail("malformed PFM header in '" + name + "'");
    }
    if (width < 1 || height < 1 || scale == 0.0) fail("malformed PFM header in '" + name + "'");
    // exactly one whitespace byte separates the header from the raster
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail("malformed PFM header in '" + name + "'");
    ++pos;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos != n * 4)
        fail("PFM byte count mismatch in '" + name + "': expected " + std::to_string(n * 4) + ", found " +
             std::to_string(bytes.size() - pos));
    const bool little = scale < 0;
    PfmData out{width, height, std::vector<float>(n)};
    for (int y = height - 1; y >= 0; --y) {
        for (int x = 0; x < width; ++x) {
            std::uint32_t bits = 0;
            for (int i = 0; i < 4; ++i) {
                const std::uint32_t b = bytes[pos + i];
                bits |= little ? b << (8 * i) : b << (8 * (3 - i));
            }
            pos += 4;
            out.row_major[static_cast<std::size_t>(y) * width + x] = std::bit_cast<float>(bits);
        }
    }
    return out;
}

} // namespace

DisparityMap read_pfm(const std::filesystem::path& path) {
    PfmData d = decode_pfm(read_file_bytes(path), path.string());
    return DisparityMap(d.width, d.height, std::move(d.row_major));
}

GrayImage read_pfm_gray(const std::filesystem::path& path) {
    PfmData d = decode_pfm(read_file_bytes(path), path.string());
    return GrayImage(d.width, d.height, std::move(d.row_major));
}

void write_pfm(const DisparityMap& map, const std::filesystem::path& path) {
    write_file_bytes(path, encode_pfm(map.data(), map.width(), map.height()));
}

void write_pfm(const GrayImage& img, const std::filesystem::path& path) {
    write_file_bytes(path, encode_pfm(img.data(), img.width(), img.height()));
}

// ---------------------------------------------------------------------------
// PLY

std::string encode_ply(std::span<const ColoredPoint> points, std::span<const std::string> comments) {
    std::ostringstream os;
    os << "ply\nformat ascii 1.0\n";
    for (const auto& c : comments) os << "comment " << c << "\n";
    os << "element vertex " << points.size() << "\n"
       << "property float x\nproperty float y\nproperty float z\n"
       << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
       << "end_header\n";
    char line[128];
    for (const auto& p : points) {
        std::snprintf(line, sizeof(line), "%.6f %.6f %.6f %u %u %u\n", p.x, p.y, p.z, unsigned{p.r}, unsigned{p.g},
                      unsigned{p.b});
        os << line;
    }
    return os.str();
}

void write_ply(std::span<const ColoredPoint> points, const std::filesystem::path& path,
               std::span<const std::string> comments) {
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            fail("PLY point has non-finite coordinates");
    write_text_file(path, encode_ply(points, comments));
}

// ---------------------------------------------------------------------------

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail("write failed for '" + path.string() + "'");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

} // namespace rgbspeckle::io
