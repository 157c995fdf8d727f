#ifndef MBSTEREO_IMAGEIO_HPP
#define MBSTEREO_IMAGEIO_HPP

// Image, disparity and mask carriers used by stereo datasets:
//   PGM/PPM binary (P5/P6, 8- or 16-bit), PNG (8/16-bit gray, 8/16-bit RGB),
//   PFM ("Pf", monochrome), KITTI disparity PNG (uint16, 256 * d, 0 = invalid).
// Every writer goes through write_file_atomic (temp file + rename).

#include "core.hpp"

#include <png.h>

#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mbstereo {

enum class DisparityFormat { pfm, kitti_png };

namespace io_detail {

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return bytes;
}

inline std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext;
}

inline float to_unit(unsigned v, unsigned maxval) { return static_cast<float>(static_cast<double>(v) / maxval); }

inline unsigned quantize(float v, unsigned maxval) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    return static_cast<unsigned>(std::floor(c * maxval + 0.5));
}

// Header tokenizer shared by PNM and PFM; '#' starts a comment in PNM headers.
struct HeaderReader {
    const std::vector<unsigned char>& bytes;
    std::size_t pos = 0;
    bool allow_comments = true;

    std::string token() {
        for (;;) {
            while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
            if (allow_comments && pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            break;
        }
        std::string t;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
        if (t.empty()) throw IoError("malformed header: unexpected end of file");
        return t;
    }

    long integer() {
        const std::string t = token();
        char* end = nullptr;
        const long v = std::strtol(t.c_str(), &end, 10);
        if (*end != '\0') throw IoError("malformed header: expected integer, got '" + t + "'");
        return v;
    }

    // Exactly one whitespace byte separates the header from the raster.
    void end_of_header() {
        if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw IoError("malformed header terminator");
        ++pos;
    }
};

struct PngReadHandles {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadHandles() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteHandles {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteHandles() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct MemoryReader {
    const std::vector<unsigned char>* bytes;
    std::size_t pos;
};

inline void png_memory_read(png_structp png, png_bytep out, png_size_t n) {
    auto* r = static_cast<MemoryReader*>(png_get_io_ptr(png));
    if (r->pos + n > r->bytes->size()) png_error(png, "truncated PNG stream");
    std::memcpy(out, r->bytes->data() + r->pos, n);
    r->pos += n;
}

inline void png_memory_write(png_structp png, png_bytep in, png_size_t n) {
    auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
    out->insert(out->end(), in, in + n);
}

inline void png_memory_flush(png_structp) {}

inline void png_silent_warning(png_structp, png_const_charp) {}

// Raw decoded PNG raster: samples as unsigned integers, row-major interleaved.
struct PngRaster {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<unsigned> samples;
};

inline PngRaster decode_png(const std::vector<unsigned char>& bytes, const std::string& path) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("'" + path + "' is not a PNG file");
    PngReadHandles h;
    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_silent_warning);
    if (!h.png) throw IoError("png_create_read_struct failed");
    h.info = png_create_info_struct(h.png);
    if (!h.info) throw IoError("png_create_info_struct failed");
    MemoryReader reader{&bytes, 0};
    PngRaster r;
    std::vector<unsigned char> row;
    bool unsupported = false;
    if (setjmp(png_jmpbuf(h.png))) throw IoError("corrupt PNG data in '" + path + "'");
    png_set_read_fn(h.png, &reader, png_memory_read);
    png_read_info(h.png, h.info);
    const int color = png_get_color_type(h.png, h.info);
    r.width = static_cast<int>(png_get_image_width(h.png, h.info));
    r.height = static_cast<int>(png_get_image_height(h.png, h.info));
    r.bit_depth = png_get_bit_depth(h.png, h.info);
    if (png_get_interlace_type(h.png, h.info) != PNG_INTERLACE_NONE) unsupported = true;
    if (color == PNG_COLOR_TYPE_GRAY) r.channels = 1;
    else if (color == PNG_COLOR_TYPE_RGB) r.channels = 3;
    else unsupported = true;
    if (r.bit_depth != 8 && r.bit_depth != 16) unsupported = true;
    if (unsupported)
        throw IoError("unsupported PNG layout in '" + path + "' (need 8/16-bit gray or RGB, non-interlaced)");
    const std::size_t bytes_per_sample = r.bit_depth / 8;
    row.resize(static_cast<std::size_t>(r.width) * r.channels * bytes_per_sample);
    r.samples.resize(static_cast<std::size_t>(r.width) * r.height * r.channels);
    std::size_t k = 0;
    for (int y = 0; y < r.height; ++y) {
        png_read_row(h.png, row.data(), nullptr);
        for (std::size_t i = 0; i < static_cast<std::size_t>(r.width) * r.channels; ++i)
            r.samples[k++] = bytes_per_sample == 1 ? row[i] : (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1];
    }
    return r;
}

inline std::vector<unsigned char> encode_png(int width, int height, int channels, int bit_depth,
                                             const std::vector<unsigned>& samples) {
    PngWriteHandles h;
    h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_silent_warning);
    if (!h.png) throw IoError("png_create_write_struct failed");
    h.info = png_create_info_struct(h.png);
    if (!h.info) throw IoError("png_create_info_struct failed");
    std::vector<unsigned char> out;
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * channels * (bit_depth / 8));
    if (setjmp(png_jmpbuf(h.png))) throw IoError("PNG encoding failed");
    png_set_write_fn(h.png, &out, png_memory_write, png_memory_flush);
    png_set_IHDR(h.png, h.info, width, height, bit_depth, channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(h.png, h.info);
    std::size_t k = 0;
    for (int y = 0; y < height; ++y) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * channels; ++i) {
            const unsigned v = samples[k++];
            if (bit_depth == 8) {
                row[i] = static_cast<unsigned char>(v);
            } else {
                row[2 * i] = static_cast<unsigned char>(v >> 8);
                row[2 * i + 1] = static_cast<unsigned char>(v & 0xFF);
            }
        }
        png_write_row(h.png, row.data());
    }
    png_write_end(h.png, nullptr);
    return out;
}

}  // namespace io_detail

/// Writes bytes to `path` via a sibling temp file and rename, so readers never see partial output.
inline void write_file_atomic(const std::string& path, const void* data, std::size_t size) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw IoError("write failure on '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

inline void write_file_atomic(const std::string& path, std::string_view text) {
    write_file_atomic(path, text.data(), text.size());
}

// ---------------------------------------------------------------------------
// Images

inline Image decode_pnm(const std::vector<unsigned char>& bytes, const std::string& path) {
    io_detail::HeaderReader hr{bytes};
    const std::string magic = hr.token();
    int channels = 0;
    if (magic == "P5") channels = 1;
    else if (magic == "P6") channels = 3;
    else throw IoError("'" + path + "': unsupported PNM magic '" + magic + "'");
    const long w = hr.integer();
    const long h = hr.integer();
    const long maxval = hr.integer();
    hr.end_of_header();
    if (w <= 0 || h <= 0) throw IoError("'" + path + "': nonpositive dimensions");
    if (maxval <= 0 || maxval > 65535) throw IoError("'" + path + "': unsupported bit depth (maxval " + std::to_string(maxval) + ")");
    const std::size_t bps = maxval < 256 ? 1 : 2;
    const std::size_t n = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() - hr.pos < n * bps) throw IoError("'" + path + "': raster shorter than header dimensions");
    Image img(static_cast<int>(w), static_cast<int>(h), channels);
    const unsigned char* p = bytes.data() + hr.pos;
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned v = bps == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
        if (v > static_cast<unsigned>(maxval)) throw IoError("'" + path + "': sample exceeds maxval");
        img.data[i] = io_detail::to_unit(v, static_cast<unsigned>(maxval));
    }
    return img;
}

/// Loads PGM/PPM (P5/P6) or PNG, normalizing samples to [0,1]. The format is sniffed from the content.
inline Image load_image(const std::string& path) {
    const auto bytes = io_detail::read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) return decode_pnm(bytes, path);
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
        const auto r = io_detail::decode_png(bytes, path);
        const unsigned maxval = r.bit_depth == 8 ? 255u : 65535u;
        Image img(r.width, r.height, r.channels);
        for (std::size_t i = 0; i < r.samples.size(); ++i) img.data[i] = io_detail::to_unit(r.samples[i], maxval);
        return img;
    }
    throw IoError("'" + path + "': unrecognized image format");
}

/// Stores an image. The extension selects the carrier: .png (8 or 16 bit), .pgm (gray), .ppm (RGB).
inline void store_image(const std::string& path, const Image& img, int bit_depth = 8) {
    require(bit_depth == 8 || bit_depth == 16, "store_image: bit depth must be 8 or 16");
    require(img.width > 0 && img.height > 0, "store_image: empty image");
    const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
    std::vector<unsigned> samples(img.data.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = io_detail::quantize(img.data[i], maxval);

    const std::string ext = io_detail::lower_extension(path);
    if (ext == ".png") {
        const auto bytes = io_detail::encode_png(img.width, img.height, img.channels, bit_depth, samples);
        write_file_atomic(path, bytes.data(), bytes.size());
        return;
    }
    if (ext == ".pgm" || ext == ".ppm") {
        if ((ext == ".pgm") != (img.channels == 1))
            throw InvalidArgument("store_image: " + ext + " does not match channel count");
        std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                          std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
        for (unsigned v : samples) {
            if (bit_depth == 16) out.push_back(static_cast<char>(v >> 8));
            out.push_back(static_cast<char>(v & 0xFF));
        }
        write_file_atomic(path, out);
        return;
    }
    throw InvalidArgument("store_image: unsupported extension '" + ext + "'");
}

// ---------------------------------------------------------------------------
// Disparities

inline DisparityMap decode_pfm(const std::vector<unsigned char>& bytes, const std::string& path) {
    io_detail::HeaderReader hr{bytes};
    hr.allow_comments = false;
    const std::string magic = hr.token();
    if (magic == "PF") throw IoError("'" + path + "': color PFM is not a disparity map (need monochrome 'Pf')");
    if (magic != "Pf") throw IoError("'" + path + "': wrong PFM magic '" + magic + "'");
    const long w = hr.integer();
    const long h = hr.integer();
    const std::string scale_tok = hr.token();
    hr.end_of_header();
    char* end = nullptr;
    const double scale = std::strtod(scale_tok.c_str(), &end);
    if (*end != '\0' || scale == 0.0 || !std::isfinite(scale)) throw IoError("'" + path + "': malformed PFM scale");
    if (w <= 0 || h <= 0) throw IoError("'" + path + "': nonpositive dimensions");
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() - hr.pos != n * 4) throw IoError("'" + path + "': raster size does not match header dimensions");

    const bool little = scale < 0;
    DisparityMap d(static_cast<int>(w), static_cast<int>(h), 0.0f, false);
    const unsigned char* p = bytes.data() + hr.pos;
    for (long row = 0; row < h; ++row) {
        const int y = static_cast<int>(h - 1 - row);  // stored bottom-to-top
        for (long x = 0; x < w; ++x) {
            const unsigned char* q = p + 4 * (static_cast<std::size_t>(row) * w + x);
            const std::uint32_t bits = little ? (std::uint32_t(q[0]) | std::uint32_t(q[1]) << 8 |
                                                 std::uint32_t(q[2]) << 16 | std::uint32_t(q[3]) << 24)
                                              : (std::uint32_t(q[3]) | std::uint32_t(q[2]) << 8 |
                                                 std::uint32_t(q[1]) << 16 | std::uint32_t(q[0]) << 24);
            const float v = std::bit_cast<float>(bits);
            if (std::isfinite(v) && v >= 0.0f) d.set(static_cast<int>(x), y, v);
        }
    }
    return d;
}

/// Loads a disparity map. PFM: non-finite or negative samples read as invalid.
/// KITTI PNG: 16-bit gray, disparity = stored / 256, stored 0 is invalid.
inline DisparityMap load_disparity(const std::string& path, DisparityFormat format) {
    const auto bytes = io_detail::read_file(path);
    if (format == DisparityFormat::pfm) return decode_pfm(bytes, path);
    const auto r = io_detail::decode_png(bytes, path);
    if (r.channels != 1 || r.bit_depth != 16)
        throw IoError("'" + path + "': KITTI disparity must be a 16-bit grayscale PNG");
    DisparityMap d(r.width, r.height, 0.0f, false);
    for (std::size_t i = 0; i < r.samples.size(); ++i)
        if (r.samples[i] != 0) {
            d.values[i] = static_cast<float>(r.samples[i] / 256.0);
            d.valid[i] = 1;
        }
    return d;
}

/// Stores a disparity map. PFM is little-endian (scale -1), rows bottom-to-top, invalid pixels as +inf.
/// KITTI PNG stores round(256 * d) clamped to [1, 65535] for valid pixels and 0 for invalid ones.
inline void store_disparity(const std::string& path, const DisparityMap& d, DisparityFormat format) {
    require(d.width > 0 && d.height > 0, "store_disparity: empty map");
    if (format == DisparityFormat::pfm) {
        std::string out = "Pf\n" + std::to_string(d.width) + " " + std::to_string(d.height) + "\n-1\n";
        out.reserve(out.size() + d.values.size() * 4);
        for (int y = d.height - 1; y >= 0; --y)
            for (int x = 0; x < d.width; ++x) {
                const float v = d.is_valid(x, y) ? d.value(x, y) : std::numeric_limits<float>::infinity();
                const auto bits = std::bit_cast<std::uint32_t>(v);
                for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
            }
        write_file_atomic(path, out);
        return;
    }
    std::vector<unsigned> samples(d.values.size(), 0);
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (d.valid[i]) {
            const double s = std::floor(static_cast<double>(d.values[i]) * 256.0 + 0.5);
            samples[i] = static_cast<unsigned>(std::clamp(s, 1.0, 65535.0));
        }
    const auto bytes = io_detail::encode_png(d.width, d.height, 1, 16, samples);
    write_file_atomic(path, bytes.data(), bytes.size());
}

// ---------------------------------------------------------------------------
// Masks

inline void store_mask(const std::string& path, const Mask& m) {
    require(m.width > 0 && m.height > 0, "store_mask: empty mask");
    std::vector<unsigned> samples(m.data.size());
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = m.data[i] ? 255u : 0u;
    const auto bytes = io_detail::encode_png(m.width, m.height, 1, 8, samples);
    write_file_atomic(path, bytes.data(), bytes.size());
}

/// Any nonzero sample of the first channel reads as set.
inline Mask load_mask(const std::string& path) {
    const Image img = load_image(path);
    Mask m(img.width, img.height, 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) m(x, y) = img.at(x, y, 0) > 0.0f ? 1 : 0;
    return m;
}

// ---------------------------------------------------------------------------
// Resampling

/// Corner-aligned bilinear resampling with clamped edges: output corners map onto input corners.
/// A single output column/row samples the input center.
inline Image resample_bilinear(const Image& img, int new_width, int new_height) {
    require(new_width >= 1 && new_height >= 1, "resample_bilinear: target dimensions must be >= 1");
    require(img.width >= 1 && img.height >= 1, "resample_bilinear: empty source image");
    Image out(new_width, new_height, img.channels);
    const auto coord = [](int i, int n_out, int n_in) {
        if (n_out == 1) return 0.5 * (n_in - 1);
        return static_cast<double>(i) * (n_in - 1) / (n_out - 1);
    };
    for (int y = 0; y < new_height; ++y) {
        const double sy = coord(y, new_height, img.height);
        const int y0 = std::min(static_cast<int>(std::floor(sy)), img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < new_width; ++x) {
            const double sx = coord(x, new_width, img.width);
            const int x0 = std::min(static_cast<int>(std::floor(sx)), img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double a = img.at(x0, y0, c), b = img.at(x1, y0, c);
                const double p = img.at(x0, y1, c), q = img.at(x1, y1, c);
                const double top = a + fx * (b - a);
                const double bottom = p + fx * (q - p);
                out.at(x, y, c) = static_cast<float>(top + fy * (bottom - top));
            }
        }
    }
    return out;
}

}  // namespace mbstereo

#endif
