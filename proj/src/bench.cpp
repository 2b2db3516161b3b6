#include "rubs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include "rubs/engine.hpp"
#include "rubs/errors.hpp"
#include "rubs/scale_solver.hpp"

namespace rubs {

BenchResult bench_sizes(const std::vector<double>& sizes, const BenchConfig& cfg) {
    if (sizes.empty()) throw DomainError("no sizes to benchmark");
    if (cfg.runs < 1 || cfg.warmup < 0) throw DomainError("run counts must be positive");
    ImagePlane img(cfg.width, cfg.height);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 255.0);
    for (double& v : img.samples) v = u(rng);

    std::vector<ScaleVector> vecs;
    std::vector<ScaleField> fields;
    for (double s : sizes) {
        vecs.push_back(optimize_scale_vector(EllipseParams(s, cfg.rho, cfg.theta)));
        fields.push_back(ScaleField::uniform(cfg.width, cfg.height, vecs.back()));
    }
    FilterOptions fo;
    fo.threads = cfg.threads;
    auto once = [&](size_t i) {
        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();
        ImagePlane out = cfg.space_variant ? filter_space_variant(img, fields[i], fo)
                                           : filter_space_invariant(img, vecs[i], fo);
        const auto t1 = clock::now();
        volatile double sink = out.samples[out.size() / 2];
        (void)sink;
        return std::chrono::duration<double, std::milli>(t1 - t0).count();
    };

    for (int w = 0; w < cfg.warmup; ++w)
        for (size_t i = 0; i < sizes.size(); ++i) once(i);
    std::vector<std::vector<double>> times(sizes.size());
    for (int r = 0; r < cfg.runs; ++r)
        for (size_t i = 0; i < sizes.size(); ++i) times[i].push_back(once(i));

    BenchResult res;
    double lo = 0.0, hi = 0.0;
    for (size_t i = 0; i < sizes.size(); ++i) {
        BenchRow row;
        row.s = sizes[i];
        double sum = 0.0;
        for (double t : times[i]) sum += t;
        row.mean_ms = sum / static_cast<double>(times[i].size());
        row.min_ms = *std::min_element(times[i].begin(), times[i].end());
        row.max_ms = *std::max_element(times[i].begin(), times[i].end());
        lo = i == 0 ? row.mean_ms : std::min(lo, row.mean_ms);
        hi = i == 0 ? row.mean_ms : std::max(hi, row.mean_ms);
        res.rows.push_back(row);
    }
    res.ratio = hi / lo;
    return res;
}

}  // namespace rubs
