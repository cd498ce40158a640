#pragma once

// Sliding-window extraction with per-slice z-score standardization.
// Window b covers [b*s, b*s + w - 1] with its prediction target at step
// b*s + w, so every emitted window has a valid next-step target.

#include <cstdint>
#include <vector>

#include "gpad/data/series.hpp"

namespace gpad::data {

struct WindowBatch {
    std::int64_t n_nodes = 0, n_modalities = 0, width = 0;
    std::vector<std::int64_t> start;  // per-window start index

    Tensor windows_std;   // [B, N, M, w] standardized per (window, node, modality)
    Tensor targets_raw;   // [B, N, M] raw-scale next-step targets
    Tensor targets_std;   // [B, N, M] same targets on each window's standardized scale
    Tensor labels;        // [B, N, M] binary target-step labels (zero when unlabeled)
    Tensor mu, sigma;     // [B, N, M] per-slice statistics (sigma without epsilon)

    std::int64_t count() const { return static_cast<std::int64_t>(start.size()); }
};

// Number of windows for series length T, window w, stride s.
std::int64_t window_count(std::int64_t T, std::int64_t w, std::int64_t s);

// labels may be null; otherwise [N, M, T] binary.
WindowBatch slide_windows(const SensorSeries& series, const Tensor* labels, std::int64_t w, std::int64_t s,
                          double epsilon = 1e-8);

// Z-score over the slice's own steps: out = (x - mu) / (sigma + epsilon),
// population statistics. Returns the (mu, sigma) pair used.
void standardize_slice(const double* x, std::int64_t n, double epsilon, double* out, double& mu, double& sigma);
void destandardize_slice(const double* z, std::int64_t n, double epsilon, double mu, double sigma, double* out);

// Subset of windows by index range [from, to).
WindowBatch slice_batch(const WindowBatch& b, std::int64_t from, std::int64_t to);

}  // namespace gpad::data
