#include "unmix/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

namespace unmix {
namespace {

struct RawImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;                 // 8 or 16
    std::vector<std::uint16_t> pixels; // interleaved, host endian
    std::uint16_t maxval() const { return bit_depth == 16 ? 65535 : 255; }
};

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool host_is_little_endian() {
    return std::endian::native == std::endian::little;
}

// ---------------------------------------------------------------- PNG

RawImage read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw std::runtime_error("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }

    RawImage raw;
    std::vector<png_bytep> row_ptrs;
    std::vector<png_byte> buffer;
    volatile bool failed = false;

    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, fp.get());
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);

        png_uint_32 w = png_get_image_width(png, info);
        png_uint_32 h = png_get_image_height(png, info);
        int depth = png_get_bit_depth(png, info);
        int color = png_get_color_type(png, info);

        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (depth == 16 && host_is_little_endian()) png_set_swap(png);

        png_read_update_info(png, info);

        raw.width = static_cast<int>(w);
        raw.height = static_cast<int>(h);
        raw.bit_depth = png_get_bit_depth(png, info);
        raw.channels = png_get_channels(png, info);

        std::size_t rowbytes = png_get_rowbytes(png, info);
        buffer.resize(rowbytes * h);
        row_ptrs.resize(h);
        for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = buffer.data() + y * rowbytes;
        png_read_image(png, row_ptrs.data());
        png_read_end(png, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    if (failed) throw std::runtime_error("failed to decode PNG: " + path);

    if (raw.width < 1 || raw.height < 1)
        throw std::runtime_error("zero-size PNG: " + path);
    if (raw.channels != 1 && raw.channels != 3)
        throw std::runtime_error("unsupported PNG channel count: " + path);
    if (raw.bit_depth != 8 && raw.bit_depth != 16)
        throw std::runtime_error("unsupported PNG bit depth: " + path);

    std::size_t n = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
    raw.pixels.resize(n);
    if (raw.bit_depth == 8) {
        for (std::size_t i = 0; i < n; ++i) raw.pixels[i] = buffer[i];
    } else {
        std::memcpy(raw.pixels.data(), buffer.data(), n * sizeof(std::uint16_t));
    }
    return raw;
}

void write_png(const RawImage& raw, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write file: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }

    std::vector<png_bytep> row_ptrs(raw.height);
    std::vector<png_byte> buffer;
    volatile bool failed = false;

    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, fp.get());
        int color = raw.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
        png_set_IHDR(png, info, raw.width, raw.height, raw.bit_depth, color,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        if (raw.bit_depth == 16 && host_is_little_endian()) png_set_swap(png);

        std::size_t samples_per_row = static_cast<std::size_t>(raw.width) * raw.channels;
        if (raw.bit_depth == 8) {
            buffer.resize(samples_per_row * raw.height);
            for (std::size_t i = 0; i < buffer.size(); ++i)
                buffer[i] = static_cast<png_byte>(raw.pixels[i]);
            for (int y = 0; y < raw.height; ++y)
                row_ptrs[y] = buffer.data() + y * samples_per_row;
        } else {
            for (int y = 0; y < raw.height; ++y)
                row_ptrs[y] = reinterpret_cast<png_bytep>(
                    const_cast<std::uint16_t*>(raw.pixels.data()) + y * samples_per_row);
        }
        png_write_image(png, row_ptrs.data());
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    if (failed) throw std::runtime_error("failed to encode PNG: " + path);
}

// ---------------------------------------------------------------- PNM

int pnm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
        } else if (!std::isspace(ch)) {
            break;
        }
    }
    if (ch == EOF) return -1;
    while (ch != EOF && !std::isspace(ch)) {
        tok.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    return 0;
}

RawImage read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string magic, tok;
    if (pnm_next_token(in, magic) < 0 || (magic != "P5" && magic != "P6"))
        throw std::runtime_error("not a binary PGM/PPM file: " + path);

    RawImage raw;
    raw.channels = magic == "P5" ? 1 : 3;
    long maxval = 0;
    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("truncated PNM header: " + path);
    raw.width = std::stoi(tok);
    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("truncated PNM header: " + path);
    raw.height = std::stoi(tok);
    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("truncated PNM header: " + path);
    maxval = std::stol(tok);
    if (raw.width < 1 || raw.height < 1) throw std::runtime_error("zero-size PNM: " + path);
    if (maxval != 255 && maxval != 65535)
        throw std::runtime_error("unsupported PNM maxval (must be 255 or 65535): " + path);
    raw.bit_depth = maxval == 255 ? 8 : 16;

    std::size_t n = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
    raw.pixels.resize(n);
    if (raw.bit_depth == 8) {
        std::vector<unsigned char> buf(n);
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n)))
            throw std::runtime_error("truncated PNM payload: " + path);
        for (std::size_t i = 0; i < n; ++i) raw.pixels[i] = buf[i];
    } else {
        std::vector<unsigned char> buf(n * 2);
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2)))
            throw std::runtime_error("truncated PNM payload: " + path);
        for (std::size_t i = 0; i < n; ++i)  // PNM 16-bit is big endian
            raw.pixels[i] = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
    }
    return raw;
}

void write_pnm(const RawImage& raw, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << (raw.channels == 1 ? "P5" : "P6") << "\n"
        << raw.width << " " << raw.height << "\n"
        << (raw.bit_depth == 8 ? 255 : 65535) << "\n";
    std::size_t n = raw.pixels.size();
    if (raw.bit_depth == 8) {
        std::vector<unsigned char> buf(n);
        for (std::size_t i = 0; i < n; ++i) buf[i] = static_cast<unsigned char>(raw.pixels[i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
    } else {
        std::vector<unsigned char> buf(n * 2);
        for (std::size_t i = 0; i < n; ++i) {
            buf[2 * i] = static_cast<unsigned char>(raw.pixels[i] >> 8);
            buf[2 * i + 1] = static_cast<unsigned char>(raw.pixels[i] & 0xff);
        }
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n * 2));
    }
    if (!out) throw std::runtime_error("failed writing PNM: " + path);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suffix;
}

RawImage read_raw(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw std::runtime_error("cannot open file: " + path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    probe.close();
    if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) return read_pnm(path);
    return read_png(path);
}

}  // namespace

PlanarImage load_image(const std::string& path) {
    RawImage raw = read_raw(path);
    if (raw.width < 2 || raw.height < 2)
        throw std::runtime_error("image too small (need at least 2x2): " + path);
    double scale = 1.0 / raw.maxval();
    std::vector<double> samples(raw.pixels.size());
    // interleaved -> planar
    std::size_t px = static_cast<std::size_t>(raw.width) * raw.height;
    for (std::size_t i = 0; i < px; ++i)
        for (int c = 0; c < raw.channels; ++c)
            samples[c * px + i] = raw.pixels[i * raw.channels + c] * scale;
    return PlanarImage::from_data(raw.width, raw.height, raw.channels,
                                  std::move(samples));
}

void save_image(const PlanarImage& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("save_image: bit depth must be 8 or 16");
    if (img.empty()) throw std::invalid_argument("save_image: empty image");

    RawImage raw;
    raw.width = img.width();
    raw.height = img.height();
    raw.channels = img.channels();
    raw.bit_depth = bit_depth;
    double maxval = raw.maxval();
    ValueRange r = img.range();
    std::size_t px = static_cast<std::size_t>(raw.width) * raw.height;
    raw.pixels.resize(px * raw.channels);
    for (int c = 0; c < raw.channels; ++c) {
        auto plane = img.plane(c);
        for (std::size_t i = 0; i < px; ++i) {
            double v = std::clamp(plane[i], r.lo, r.hi);
            double unit = (v - r.lo) / r.span();
            raw.pixels[i * raw.channels + c] =
                static_cast<std::uint16_t>(std::lround(unit * maxval));
        }
    }
    if (has_suffix(path, ".ppm") || has_suffix(path, ".pgm"))
        write_pnm(raw, path);
    else
        write_png(raw, path);
}

// ---------------------------------------------------------------- PFM

DisparityMap load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::string magic, tok;
    if (pnm_next_token(in, magic) < 0) throw std::runtime_error("empty PFM file: " + path);
    if (magic == "PF")
        throw std::runtime_error("color PFM not supported (expected grayscale Pf): " + path);
    if (magic != "Pf") throw std::runtime_error("malformed PFM header: " + path);

    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("malformed PFM header: " + path);
    int w = std::stoi(tok);
    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("malformed PFM header: " + path);
    int h = std::stoi(tok);
    if (pnm_next_token(in, tok) < 0) throw std::runtime_error("malformed PFM header: " + path);
    double scale = std::stod(tok);
    if (w < 1 || h < 1) throw std::runtime_error("zero-size PFM: " + path);
    if (scale == 0.0) throw std::runtime_error("malformed PFM scale: " + path);
    bool file_little = scale < 0.0;

    std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<unsigned char> buf(n * 4);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4)))
        throw std::runtime_error("truncated PFM payload: " + path);

    DisparityMap map(w, h);
    for (int y = 0; y < h; ++y) {
        int src_row = h - 1 - y;  // bottom-up to top-down
        for (int x = 0; x < w; ++x) {
            const unsigned char* p = buf.data() + (static_cast<std::size_t>(src_row) * w + x) * 4;
            std::uint32_t bits;
            if (file_little == host_is_little_endian()) {
                std::memcpy(&bits, p, 4);
            } else {
                unsigned char rev[4] = {p[3], p[2], p[1], p[0]};
                std::memcpy(&bits, rev, 4);
            }
            float f = std::bit_cast<float>(bits);
            bool ok = std::isfinite(f) && f > 0.0f;
            map.at(x, y) = ok ? static_cast<double>(f) : 0.0;
            map.set_valid(x, y, ok);
        }
    }
    return map;
}

void save_pfm(const DisparityMap& map, const std::string& path) {
    if (map.pixel_count() == 0) throw std::invalid_argument("save_pfm: empty map");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "Pf\n" << map.width << " " << map.height << "\n-1.0\n";
    std::vector<unsigned char> buf(static_cast<std::size_t>(map.width) * 4);
    for (int y = map.height - 1; y >= 0; --y) {  // bottom-up
        for (int x = 0; x < map.width; ++x) {
            float f = map.is_valid(x, y) ? static_cast<float>(map.at(x, y)) : 0.0f;
            std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
            if (!host_is_little_endian()) {
                bits = ((bits & 0xff) << 24) | ((bits & 0xff00) << 8) |
                       ((bits >> 8) & 0xff00) | (bits >> 24);
            }
            std::memcpy(buf.data() + static_cast<std::size_t>(x) * 4, &bits, 4);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw std::runtime_error("failed writing PFM: " + path);
}

// ---------------------------------------------------------------- KITTI

DisparityMap load_kitti_disparity(const std::string& path) {
    RawImage raw = read_png(path);
    if (raw.bit_depth != 16)
        throw std::runtime_error("KITTI disparity must be a 16-bit PNG: " + path);
    if (raw.channels != 1)
        throw std::runtime_error("KITTI disparity must be single channel: " + path);
    DisparityMap map(raw.width, raw.height);
    for (int y = 0; y < raw.height; ++y) {
        for (int x = 0; x < raw.width; ++x) {
            std::uint16_t stored = raw.pixels[static_cast<std::size_t>(y) * raw.width + x];
            map.at(x, y) = stored / 256.0;
            map.set_valid(x, y, stored != 0);
        }
    }
    return map;
}

void save_kitti_disparity(const DisparityMap& map, const std::string& path) {
    if (map.pixel_count() == 0) throw std::invalid_argument("save_kitti_disparity: empty map");
    RawImage raw;
    raw.width = map.width;
    raw.height = map.height;
    raw.channels = 1;
    raw.bit_depth = 16;
    raw.pixels.resize(map.pixel_count());
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            long stored = 0;
            if (map.is_valid(x, y))
                stored = std::clamp(std::lround(map.at(x, y) * 256.0), 0L, 65535L);
            raw.pixels[static_cast<std::size_t>(y) * map.width + x] =
                static_cast<std::uint16_t>(stored);
        }
    }
    write_png(raw, path);
}

}  // namespace unmix
