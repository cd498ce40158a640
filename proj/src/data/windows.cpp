#include "gpad/data/windows.hpp"

#include <cmath>
#include <stdexcept>

namespace gpad::data {

std::int64_t window_count(std::int64_t T, std::int64_t w, std::int64_t s) {
    if (w < 1 || s < 1) throw std::invalid_argument("window_count: w and s must be >= 1");
    if (w >= T) throw std::invalid_argument("window_count: w must leave room for a target step (w <= T-1)");
    return (T - 1 - w) / s + 1;
}

void standardize_slice(const double* x, std::int64_t n, double epsilon, double* out, double& mu, double& sigma) {
    if (epsilon <= 0.0) throw std::invalid_argument("standardize_slice: epsilon must be positive");
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += x[i];
    mu = s / static_cast<double>(n);
    double v = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = x[i] - mu;
        v += d * d;
    }
    sigma = std::sqrt(v / static_cast<double>(n));
    const double inv = 1.0 / (sigma + epsilon);
    for (std::int64_t i = 0; i < n; ++i) out[i] = (x[i] - mu) * inv;
}

void destandardize_slice(const double* z, std::int64_t n, double epsilon, double mu, double sigma, double* out) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = z[i] * (sigma + epsilon) + mu;
}

WindowBatch slide_windows(const SensorSeries& series, const Tensor* labels, std::int64_t w, std::int64_t s,
                          double epsilon) {
    const std::int64_t N = series.n_nodes(), M = series.n_modalities(), T = series.n_steps();
    const std::int64_t B = window_count(T, w, s);
    if (labels && (labels->rank() != 3 || labels->dim(0) != N || labels->dim(1) != M || labels->dim(2) != T))
        throw std::invalid_argument("slide_windows: labels must be [N,M,T]");

    WindowBatch out;
    out.n_nodes = N;
    out.n_modalities = M;
    out.width = w;
    out.windows_std = Tensor({B, N, M, w});
    out.targets_raw = Tensor({B, N, M});
    out.targets_std = Tensor({B, N, M});
    out.labels = Tensor({B, N, M});
    out.mu = Tensor({B, N, M});
    out.sigma = Tensor({B, N, M});

    for (std::int64_t b = 0; b < B; ++b) {
        const std::int64_t t0 = b * s;
        out.start.push_back(t0);
        for (std::int64_t n = 0; n < N; ++n) {
            for (std::int64_t m = 0; m < M; ++m) {
                const double* src = series.values.data() + (n * M + m) * T + t0;
                double mu, sigma;
                double* dst = out.windows_std.data() + ((b * N + n) * M + m) * w;
                standardize_slice(src, w, epsilon, dst, mu, sigma);
                const std::int64_t flat = (b * N + n) * M + m;
                out.mu[flat] = mu;
                out.sigma[flat] = sigma;
                const double target = series.values.at3(n, m, t0 + w);
                out.targets_raw[flat] = target;
                out.targets_std[flat] = (target - mu) / (sigma + epsilon);
                if (labels) out.labels[flat] = labels->at3(n, m, t0 + w) != 0.0 ? 1.0 : 0.0;
            }
        }
    }
    return out;
}

WindowBatch slice_batch(const WindowBatch& b, std::int64_t from, std::int64_t to) {
    if (from < 0 || to > b.count() || from >= to) throw std::invalid_argument("slice_batch: bad range");
    const std::int64_t B = to - from, N = b.n_nodes, M = b.n_modalities, w = b.width;
    WindowBatch out;
    out.n_nodes = N;
    out.n_modalities = M;
    out.width = w;
    out.start.assign(b.start.begin() + from, b.start.begin() + to);
    out.windows_std = Tensor({B, N, M, w});
    out.targets_raw = Tensor({B, N, M});
    out.targets_std = Tensor({B, N, M});
    out.labels = Tensor({B, N, M});
    out.mu = Tensor({B, N, M});
    out.sigma = Tensor({B, N, M});
    const std::int64_t cells = N * M;
    for (std::int64_t i = 0; i < B; ++i) {
        const std::int64_t src = from + i;
        std::copy(b.windows_std.data() + src * cells * w, b.windows_std.data() + (src + 1) * cells * w,
                  out.windows_std.data() + i * cells * w);
        std::copy(b.targets_raw.data() + src * cells, b.targets_raw.data() + (src + 1) * cells,
                  out.targets_raw.data() + i * cells);
        std::copy(b.targets_std.data() + src * cells, b.targets_std.data() + (src + 1) * cells,
                  out.targets_std.data() + i * cells);
        std::copy(b.labels.data() + src * cells, b.labels.data() + (src + 1) * cells, out.labels.data() + i * cells);
        std::copy(b.mu.data() + src * cells, b.mu.data() + (src + 1) * cells, out.mu.data() + i * cells);
        std::copy(b.sigma.data() + src * cells, b.sigma.data() + (src + 1) * cells, out.sigma.data() + i * cells);
    }
    return out;
}

}  // namespace gpad::data
