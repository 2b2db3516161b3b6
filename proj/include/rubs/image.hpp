#pragma once

#include <cstddef>
#include <vector>

namespace rubs {

// Row-major plane; x is the column (first coordinate), y the row.
struct ImagePlane {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    ImagePlane() = default;
    ImagePlane(int width, int height, double fill = 0.0);
    ImagePlane(int width, int height, std::vector<double> samples);

    size_t size() const { return samples.size(); }
    double& at(int x, int y) { return samples[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return samples[static_cast<size_t>(y) * width + x]; }
};

}  // namespace rubs

#include <cstdint>

namespace rubs {

// Raised-cosine stripes in [lo, hi] with the given period (pixels); the
// wave vector points along angle, so stripes run along angle + pi/2.
ImagePlane synthetic_stripes(int width, int height, double period, double angle, double lo = 0.0,
                             double hi = 255.0);

// Additive white Gaussian noise with sigma chosen so that the noisy image
// has the requested PSNR against `peak`.
ImagePlane add_noise_at_psnr(const ImagePlane& f, double psnr_db, double peak, uint64_t seed);
double noise_sigma_for_psnr(double psnr_db, double peak);

double mse(const ImagePlane& a, const ImagePlane& b);
double psnr(const ImagePlane& a, const ImagePlane& b, double peak);

}  // namespace rubs
