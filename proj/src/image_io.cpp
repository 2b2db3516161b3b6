#include "rubs/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "file_util.hpp"
#include "rubs/errors.hpp"

namespace rubs {

namespace {

struct HeaderReader {
    const std::vector<unsigned char>& b;
    size_t pos = 0;

    void skip_space_and_comments() {
        while (pos < b.size()) {
            if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else if (std::isspace(b[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    }

    long number() {
        skip_space_and_comments();
        if (pos >= b.size() || !std::isdigit(b[pos])) throw IoError("malformed PGM header");
        long v = 0;
        while (pos < b.size() && std::isdigit(b[pos])) {
            v = v * 10 + (b[pos++] - '0');
            if (v > 1L << 30) throw IoError("PGM header value too large");
        }
        return v;
    }
};

}  // namespace

PgmImage decode_pgm(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw IoError("not a binary PGM (P5) file");
    HeaderReader r{bytes, 2};
    PgmImage img;
    img.width = static_cast<int>(r.number());
    img.height = static_cast<int>(r.number());
    img.maxval = static_cast<int>(r.number());
    if (img.width <= 0 || img.height <= 0) throw IoError("PGM dimensions must be positive");
    if (img.maxval < 1 || img.maxval > 65535) throw IoError("PGM maxval out of range");
    if (r.pos >= bytes.size() || !std::isspace(bytes[r.pos])) throw IoError("malformed PGM header");
    ++r.pos;
    const size_t n = static_cast<size_t>(img.width) * static_cast<size_t>(img.height);
    const size_t bps = img.maxval > 255 ? 2 : 1;
    if (bytes.size() - r.pos < n * bps) throw IoError("PGM pixel data truncated");
    img.pixels.resize(n);
    const unsigned char* p = bytes.data() + r.pos;
    for (size_t i = 0; i < n; ++i) {
        const std::uint16_t v = bps == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1])
                                         : p[i];
        if (v > img.maxval) throw IoError("PGM sample exceeds maxval");
        img.pixels[i] = v;
    }
    return img;
}

std::vector<unsigned char> encode_pgm(const PgmImage& img) {
    if (img.width <= 0 || img.height <= 0 || img.maxval < 1 || img.maxval > 65535 ||
        img.pixels.size() != static_cast<size_t>(img.width) * img.height)
        throw DomainError("invalid PGM image");
    const std::string header = "P5\n" + std::to_string(img.width) + " " +
                               std::to_string(img.height) + "\n" + std::to_string(img.maxval) + "\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    for (std::uint16_t v : img.pixels) {
        if (img.maxval > 255) out.push_back(static_cast<unsigned char>(v >> 8));
        out.push_back(static_cast<unsigned char>(v & 0xff));
    }
    return out;
}

PgmImage read_pgm(const std::string& path) { return decode_pgm(detail::read_file(path)); }

void write_pgm(const std::string& path, const PgmImage& img) {
    detail::write_file_atomic(path, encode_pgm(img));
}

ImagePlane to_plane(const PgmImage& img) {
    std::vector<double> s(img.pixels.begin(), img.pixels.end());
    return ImagePlane(img.width, img.height, std::move(s));
}

PgmImage quantize(const ImagePlane& f, int maxval) {
    if (maxval < 1 || maxval > 65535) throw DomainError("maxval out of range");
    PgmImage img;
    img.width = f.width;
    img.height = f.height;
    img.maxval = maxval;
    img.pixels.resize(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        double v = f.samples[i];
        if (std::isnan(v)) v = 0.0;
        v = std::clamp(v, 0.0, static_cast<double>(maxval));
        // Default rounding mode is round-half-to-even.
        img.pixels[i] = static_cast<std::uint16_t>(std::nearbyint(v));
    }
    return img;
}

ImagePlane decode_raw_f64(const std::vector<unsigned char>& b) {
    if (b.size() < 12 || b[0] != 'R' || b[1] != 'F' || b[2] != '6' || b[3] != '4')
        throw IoError("not a raw f64 plane (bad magic)");
    const std::uint32_t w = detail::get_u32(&b[4]), h = detail::get_u32(&b[8]);
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20))
        throw IoError("raw plane dimensions out of range");
    const size_t n = static_cast<size_t>(w) * h;
    if (b.size() != 12 + 8 * n) throw IoError("raw plane size does not match its header");
    std::vector<double> s(n);
    for (size_t i = 0; i < n; ++i) s[i] = detail::get_f64(&b[12 + 8 * i]);
    return ImagePlane(static_cast<int>(w), static_cast<int>(h), std::move(s));
}

std::vector<unsigned char> encode_raw_f64(const ImagePlane& f) {
    std::vector<unsigned char> out{'R', 'F', '6', '4'};
    detail::put_u32(out, static_cast<std::uint32_t>(f.width));
    detail::put_u32(out, static_cast<std::uint32_t>(f.height));
    out.reserve(out.size() + 8 * f.size());
    for (double v : f.samples) detail::put_f64(out, v);
    return out;
}

ImagePlane read_raw_f64(const std::string& path) { return decode_raw_f64(detail::read_file(path)); }

void write_raw_f64(const std::string& path, const ImagePlane& f) {
    detail::write_file_atomic(path, encode_raw_f64(f));
}

ImagePlane read_image(const std::string& path) {
    const auto bytes = detail::read_file(path);
    if (bytes.size() >= 4 && bytes[0] == 'R' && bytes[1] == 'F') return decode_raw_f64(bytes);
    return to_plane(decode_pgm(bytes));
}

}  // namespace rubs
