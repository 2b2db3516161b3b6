#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rubs/geometry.hpp"
#include "rubs/image.hpp"
#include "rubs/zp.hpp"

namespace rubs {

// Per-pixel scale-vectors, row-major like ImagePlane.
class ScaleField {
public:
    ScaleField(int width, int height, std::vector<ScaleVector> scales);
    static ScaleField uniform(int width, int height, const ScaleVector& a);
    static ScaleField from_function(int width, int height,
                                    const std::function<ScaleVector(int, int)>& fn);

    int width() const { return width_; }
    int height() const { return height_; }
    const ScaleVector& at(int x, int y) const {
        return scales_[static_cast<size_t>(y) * width_ + x];
    }

private:
    int width_, height_;
    std::vector<ScaleVector> scales_;
};

// 16-tap difference stencil: vertex[i] = sum_k bit_k(i) a_k u_k,
// weight[i] = (-1)^popcount(i) / (a1 a2 a3 a4), and the shift tau.
struct FDMesh {
    std::array<Vec2, 16> vertex{};
    std::array<double, 16> weight{};
    Vec2 tau;
    // Componentwise bounds of the vertices.
    Vec2 lo, hi;
};

FDMesh fd_mesh(const ScaleVector& a);

// Running sums over [-pad, W+pad) x [-pad, H+pad) with zero input outside
// the image and zero initial conditions outside that box. Throws
// PrecisionError if max |g_b| reaches 2^53.
IntegratedImage preintegrate(const ImagePlane& f, int pad = 0);

struct FilterOptions {
    int iterations = 1;
    double scale_floor = 0.05;
    // Support half-width limit (pixels) for any kernel.
    double max_support_radius = 64.0;
    // Divide by the filtered all-ones image so that constants are preserved.
    bool normalize = false;
    // 0 selects default_thread_count().
    int threads = 0;
};

// Output is sum_k f[k] beta_a(n) (n - k) with f zero outside the image.
ImagePlane filter_space_variant(const ImagePlane& f, const ScaleField& s,
                                const FilterOptions& opt = {});
ImagePlane filter_space_variant(const ImagePlane& f, const ScaleField& s, int iterations);
ImagePlane filter_space_invariant(const ImagePlane& f, const ScaleVector& a,
                                  const FilterOptions& opt = {});
ImagePlane filter_space_invariant(const ImagePlane& f, const ScaleVector& a, int iterations);

// 1 where the kernel footprint of the pixel lies inside the image.
std::vector<unsigned char> support_inside_mask(const ScaleField& s);

// One-dimensional variable-width box average via running sum and difference.
std::vector<double> average_1d(const std::vector<double>& f, const std::vector<double>& a);

// RUBS_THREADS if set and positive, else the hardware concurrency.
int default_thread_count();

}  // namespace rubs
