#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rubs/image.hpp"

namespace rubs {

// Binary greymap (P5), maxval 1..65535; samples above 255 stored big-endian.
struct PgmImage {
    int width = 0, height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> pixels;
};

PgmImage decode_pgm(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> encode_pgm(const PgmImage& img);
PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& img);

ImagePlane to_plane(const PgmImage& img);
// Clip to [0, maxval], then round half to even.
PgmImage quantize(const ImagePlane& f, int maxval = 255);

// "RF64", u32 width, u32 height, width*height little-endian f64, row-major.
ImagePlane decode_raw_f64(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> encode_raw_f64(const ImagePlane& f);
ImagePlane read_raw_f64(const std::string& path);
void write_raw_f64(const std::string& path, const ImagePlane& f);

// Dispatches on the file magic (P5 or RF64).
ImagePlane read_image(const std::string& path);

}  // namespace rubs
