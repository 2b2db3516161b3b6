#pragma once

#include <cstdint>
#include <vector>

namespace rubs {

struct BenchConfig {
    int width = 512, height = 512;
    int runs = 5;
    int warmup = 1;
    // Passed to the engine; 1 keeps the measurement single-threaded.
    int threads = 1;
    double rho = 1.0, theta = 0.0;
    // Space-variant path with a uniform field (the engine code path of
    // interest); false runs filter_space_invariant.
    bool space_variant = true;
    std::uint64_t seed = 1;
};

struct BenchRow {
    double s = 0.0;
    double mean_ms = 0.0, min_ms = 0.0, max_ms = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    // max / min of the per-size means.
    double ratio = 0.0;
};

// Times one filtering pass per size. Runs are interleaved round-robin over
// the sizes so that slow drift of the machine hits every size equally.
BenchResult bench_sizes(const std::vector<double>& sizes, const BenchConfig& cfg = {});

}  // namespace rubs
