#pragma once

#include <vector>

#include "rubs/engine.hpp"
#include "rubs/image.hpp"
#include "rubs/scale_solver.hpp"

namespace rubs {

struct Tensor2 {
    double j11 = 0.0, j12 = 0.0, j22 = 0.0;
};

struct TensorField {
    int width = 0, height = 0;
    double window_sigma = 0.0;
    std::vector<Tensor2> J;
    const Tensor2& at(int x, int y) const { return J[static_cast<size_t>(y) * width + x]; }
};

struct Anisotropy {
    double s = 0.0, rho = 1.0, theta = 0.0;
};

struct AnisotropyField {
    int width = 0, height = 0;
    std::vector<Anisotropy> values;
    const Anisotropy& at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

struct AnisotropyOptions {
    // Eigenvalues below rel * tr(J) + abs count as zero.
    double zero_rel = 1e-8;
    double zero_abs = 1e-12;
    // rho is clamped to clamp_factor * U(theta).
    double clamp_factor = 0.95;
    // Hard cap near principal directions, where U(theta) is unbounded.
    double rho_cap = 1e6;
    // Robust range of lambda_max + lambda_min mapped onto [s_min, s_max].
    double percentile_lo = 0.05;
    double percentile_hi = 0.95;
    double s_min = 0.5;
    // s_max = s_max_gain * noise_sigma^2 + s_min.
    double s_max_gain = 3.0;
    // Isotropic fallback scale sigma = iso_gain * noise_sigma^2.
    double iso_gain = 1.0;
};

// Central-difference gradients (reflected borders); outer products smoothed
// by the normalized isotropic box spline with covariance window_sigma^2 I.
TensorField structure_tensor(const ImagePlane& f, double window_sigma, int threads = 0);

AnisotropyField anisotropy_from_tensor(const TensorField& t, double noise_sigma,
                                       const AnisotropyOptions& opt = {});

// Scale field for the anisotropy triples: LUT lookup, exact optimizer when
// the elongation lies outside the table. Isotropic fallback pixels
// (rho = 1, J = 0) use the uniform vector of the same covariance.
ScaleField scale_field_from(const AnisotropyField& a, const ScaleLUT& lut, double scale_floor = 0.05);

struct AdaptiveOptions {
    AnisotropyOptions anisotropy;
    const ScaleLUT* lut = nullptr;  // null: a shared default table
    int threads = 0;
};

// structure_tensor -> anisotropy_from_tensor -> scale-vectors -> normalized
// space-variant filtering with m iterations.
ImagePlane adaptive_smooth(const ImagePlane& f, double window_sigma, double noise_sigma, int m,
                           const AdaptiveOptions& opt = {});

const ScaleLUT& default_lut();

}  // namespace rubs
