#pragma once

#include <vector>

#include "rubs/engine.hpp"
#include "rubs/geometry.hpp"
#include "rubs/image.hpp"
#include "rubs/scale_solver.hpp"
#include "rubs/zp.hpp"

// Slow, independent reference implementations for tests and rendering.
namespace rubs::oracle {

// Samples on a centred W x W grid: value(i, j) is the kernel at
// x = ((i - W/2) h, (j - W/2) h). Row index j, column index i.
struct SampledKernel {
    double h = 1.0;
    int W = 0;
    std::vector<double> values;
    GeneralBoxSplineSpec spec{4, {1.0, 1.0, 1.0, 1.0}, 1};

    double coord(int i) const { return (i - W / 2) * h; }
    double at(int i, int j) const { return values[static_cast<size_t>(j) * W + i]; }
    double mass() const;
};

// Fourier transform of the kernel at frequency (w1, w2).
double box_spline_spectrum(const GeneralBoxSplineSpec& spec, double w1, double w2);

// Half-width of the support along x and y (iterations included).
Vec2 support_half_extent(const GeneralBoxSplineSpec& spec);

// Inverse DFT of the truncated spectrum on a periodic grid of period W h.
// Throws DomainError unless W h / 2 >= 1.2 * support half-width. W must be even.
SampledKernel synthesize_kernel(const GeneralBoxSplineSpec& spec, double h, int W);

// Kernel samples at integer offsets d in [-R, R]^2, R = ceil(support half-width),
// computed spectrally with q frequency samples per unit frequency period.
// Row-major (2R+1)^2, entry (d1 + R) + (2R+1) (d2 + R).
struct LatticeKernel {
    int R = 0;
    std::vector<double> values;
    double at(int d1, int d2) const {
        if (d1 < -R || d1 > R || d2 < -R || d2 > R) return 0.0;
        return values[static_cast<size_t>(d2 + R) * (2 * R + 1) + (d1 + R)];
    }
};
LatticeKernel lattice_kernel(const ScaleVector& a, int m = 1, int q = 64);

// Exact value of the four-directional box spline by integrating the overlap
// length of the a1 x a3 rectangle at x with the a2/a4 parallelogram.
double box_spline4_spatial(const ScaleVector& a, Vec2 x);
LatticeKernel lattice_kernel_spatial(const ScaleVector& a);

// sum_k beta_a(x - k) over the integer lattice.
double lattice_sum(const ScaleVector& a, Vec2 x);

enum class KernelSource { Spectral, Spatial };

// out[n] = sum_k f[k] beta_{a(n)}(n - k), zero outside the image.
ImagePlane dense_convolve_sv(const ImagePlane& f, const ScaleField& s,
                             KernelSource src = KernelSource::Spectral, int q = 64);
ImagePlane dense_convolve(const ImagePlane& f, const LatticeKernel& k);

struct Moments {
    double mass = 0.0;
    double c11 = 0.0, c12 = 0.0, c22 = 0.0;
    FourthMoments fourth;
};
Moments numeric_moments(const SampledKernel& k);

// Anisotropic Gaussian density with covariance C.
double gaussian(const CovarianceMatrix& c, Vec2 x);

// Discrete L2 distance between samples and the Gaussian with covariance C.
double l2_error_to_gaussian(const SampledKernel& k, const CovarianceMatrix& c);
double normalized_correlation(const SampledKernel& k, const CovarianceMatrix& c);

// L2 error of beta^N_{a(N)}, a_k(N) = sigma sqrt(24/N), to the isotropic
// Gaussian of variance sigma^2, for each N.
std::vector<double> convergence_experiment(double sigma, const std::vector<int>& N_list,
                                           double h = 1.0 / 64, int W = 1024);
// L2 error of the m-fold iterate with scales a / sqrt(m) to the Gaussian with
// covariance covariance_of(a), for each m.
std::vector<double> iterate_convergence(const ScaleVector& a, const std::vector<int>& m_list,
                                        double h = 1.0 / 64, int W = 1024);

// Direct sum over every lattice point whose ZP translate covers x.
double zp_support_sum(const IntegratedImage& F, Vec2 x);

}  // namespace rubs::oracle
