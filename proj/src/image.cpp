#include "rubs/image.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rubs/errors.hpp"

namespace rubs {

ImagePlane::ImagePlane(int w, int h, double fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw DomainError("image dimensions must be positive");
    samples.assign(static_cast<size_t>(w) * static_cast<size_t>(h), fill);
}

ImagePlane::ImagePlane(int w, int h, std::vector<double> s)
    : width(w), height(h), samples(std::move(s)) {
    if (w <= 0 || h <= 0) throw DomainError("image dimensions must be positive");
    if (samples.size() != static_cast<size_t>(w) * static_cast<size_t>(h))
        throw DomainError("sample count does not match image dimensions");
}

ImagePlane synthetic_stripes(int width, int height, double period, double angle, double lo,
                             double hi) {
    if (!(period > 0.0)) throw DomainError("stripe period must be positive");
    ImagePlane out(width, height);
    const double k = 2.0 * std::numbers::pi / period;
    const double c = std::cos(angle), s = std::sin(angle);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double v = 0.5 + 0.5 * std::cos(k * (c * x + s * y));
            out.at(x, y) = lo + (hi - lo) * v;
        }
    return out;
}

double noise_sigma_for_psnr(double psnr_db, double peak) {
    return peak * std::pow(10.0, -psnr_db / 20.0);
}

ImagePlane add_noise_at_psnr(const ImagePlane& f, double psnr_db, double peak, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise_sigma_for_psnr(psnr_db, peak));
    ImagePlane out = f;
    for (double& v : out.samples) v += n(rng);
    return out;
}

double mse(const ImagePlane& a, const ImagePlane& b) {
    if (a.width != b.width || a.height != b.height) throw DomainError("image size mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.samples[i] - b.samples[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b, double peak) {
    return 10.0 * std::log10(peak * peak / mse(a, b));
}

}  // namespace rubs
