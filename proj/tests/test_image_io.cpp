#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rubs/errors.hpp"
#include "rubs/image_io.hpp"

using namespace rubs;

namespace {

std::vector<unsigned char> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("rubs_test_" + name)).string();
}

}  // namespace

TEST(Pgm, DecodeWithComments) {
    auto b = bytes("P5\n# comment\n3 2\n# another\n255\n");
    for (unsigned char c : {1, 2, 3, 4, 5, 255}) b.push_back(c);
    const PgmImage img = decode_pgm(b);
    EXPECT_EQ(img.width, 3);
    EXPECT_EQ(img.height, 2);
    EXPECT_EQ(img.maxval, 255);
    EXPECT_EQ(img.pixels, (std::vector<std::uint16_t>{1, 2, 3, 4, 5, 255}));
}

TEST(Pgm, SixteenBitBigEndian) {
    PgmImage img{2, 1, 1000, {258, 999}};
    const auto b = encode_pgm(img);
    const std::string head = "P5\n2 1\n1000\n";
    EXPECT_EQ(std::string(b.begin(), b.begin() + head.size()), head);
    EXPECT_EQ(b[head.size()], 1);
    EXPECT_EQ(b[head.size() + 1], 2);
    EXPECT_EQ(decode_pgm(b).pixels, img.pixels);
}

TEST(Pgm, RoundTripIsBitExact) {
    auto b = bytes("P5\n4 2\n255\n");
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<unsigned char>(i * 30));
    EXPECT_EQ(encode_pgm(decode_pgm(b)), b);
    const std::string p = temp_path("rt.pgm");
    write_pgm(p, decode_pgm(b));
    EXPECT_EQ(encode_pgm(read_pgm(p)), b);
    std::filesystem::remove(p);
}

TEST(Pgm, Malformed) {
    EXPECT_THROW(decode_pgm(bytes("P2\n1 1\n255\n0")), IoError);
    EXPECT_THROW(decode_pgm(bytes("P5\n2 2\n255\nab")), IoError);
    EXPECT_THROW(decode_pgm(bytes("P5\n0 2\n255\n")), IoError);
    EXPECT_THROW(decode_pgm(bytes("P5\n1 1\n70000\n\x01\x02")), IoError);
    auto b = bytes("P5\n1 1\n10\n");
    b.push_back(11);
    EXPECT_THROW(decode_pgm(b), IoError);
}

TEST(Quantize, ClipsAndRoundsHalfToEven) {
    ImagePlane f(6, 1, std::vector<double>{-3, 0.5, 1.5, 2.5, 254.7, 300});
    EXPECT_EQ(quantize(f).pixels, (std::vector<std::uint16_t>{0, 0, 2, 2, 255, 255}));
    f.samples[0] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(quantize(f).pixels[0], 0);
    EXPECT_EQ(to_plane(quantize(f, 1000)).samples[5], 300.0);
}

TEST(RawF64, RoundTrip) {
    ImagePlane f(3, 2, std::vector<double>{0.1, -2, 1e300, 5e-324, 7, 8});
    const auto b = encode_raw_f64(f);
    EXPECT_EQ(b.size(), 12u + 6 * 8);
    EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "RF64");
    EXPECT_EQ(b[4], 3);
    EXPECT_EQ(b[8], 2);
    EXPECT_EQ(decode_raw_f64(b).samples, f.samples);
    const std::string p = temp_path("rt.rf64");
    write_raw_f64(p, f);
    EXPECT_EQ(read_image(p).samples, f.samples);
    std::filesystem::remove(p);
    auto bad = b;
    bad.pop_back();
    EXPECT_THROW(decode_raw_f64(bad), IoError);
}

TEST(ReadImage, DispatchAndMissingFile) {
    const std::string p = temp_path("d.pgm");
    write_pgm(p, PgmImage{2, 2, 255, {1, 2, 3, 4}});
    EXPECT_EQ(read_image(p).samples, (std::vector<double>{1, 2, 3, 4}));
    std::filesystem::remove(p);
    EXPECT_THROW(read_image(temp_path("missing")), IoError);
}

TEST(AtomicWrite, NoPartialFileOnFailure) {
    EXPECT_THROW(write_pgm("/nonexistent-dir/x.pgm", PgmImage{1, 1, 255, {0}}), IoError);
    EXPECT_FALSE(std::filesystem::exists("/nonexistent-dir/x.pgm"));
}

TEST(Synthetic, StripesAndNoise) {
    const ImagePlane s = synthetic_stripes(64, 64, 8, 0.0);
    EXPECT_NEAR(s.at(0, 5), 255.0, 1e-12);
    EXPECT_NEAR(s.at(4, 5), 0.0, 1e-12);
    const ImagePlane n = add_noise_at_psnr(synthetic_stripes(256, 256, 8, 0.5), 18, 255, 3);
    EXPECT_NEAR(psnr(n, synthetic_stripes(256, 256, 8, 0.5), 255), 18.0, 0.1);
    EXPECT_EQ(n.samples, add_noise_at_psnr(synthetic_stripes(256, 256, 8, 0.5), 18, 255, 3).samples);
}
