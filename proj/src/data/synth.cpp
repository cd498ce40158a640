#include "gpad/data/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpad/core/rng.hpp"
#include "gpad/data/graph.hpp"

namespace gpad::data {

namespace {

// AR(1) with stationary standard deviation `sd`.
void fill_ar1(RngStream& rng, double rho, double sd, std::vector<double>& out) {
    const double innov = sd * std::sqrt(1.0 - rho * rho);
    double x = sd * rng.normal();
    for (auto& v : out) {
        v = x;
        x = rho * x + innov * rng.normal();
    }
}

}  // namespace

SynthResult synth_generate(const SynthConfig& cfg, std::uint64_t seed) {
    if (cfg.n_modalities < 2)
        throw std::invalid_argument("synth_generate: need >= 2 modalities for cross-modal coupling");
    if (cfg.n_nodes < 2) throw std::invalid_argument("synth_generate: need >= 2 nodes");
    const std::int64_t N = cfg.n_nodes, M = cfg.n_modalities, T = cfg.n_steps;
    const double two_pi = 2.0 * std::numbers::pi;

    RngStream root(seed);

    // Random layout, then symmetric kNN adjacency.
    RngStream geo = root.substream(1);
    std::vector<std::array<double, 2>> coords(static_cast<std::size_t>(N));
    for (auto& c : coords) c = {geo.uniform(0.0, cfg.field_size), geo.uniform(0.0, cfg.field_size)};
    const int k = std::min<int>(cfg.knn_k, static_cast<int>(N - 1));
    SensorGraph graph = build_adjacency(coords, k);

    Tensor values({N, M, T});
    std::vector<double> ar(static_cast<std::size_t>(T));

    for (std::int64_t i = 0; i < N; ++i) {
        RngStream node_rng = root.substream(100 + static_cast<std::uint64_t>(i));

        // Periods are spread across nodes so same-modality series at
        // different nodes decorrelate over T before mixing is applied.
        const double spread = (N > 1) ? 0.8 + 0.5 * static_cast<double>(i) / static_cast<double>(N - 1) : 1.0;

        // modality 0: diurnal-like sinusoid + AR(1)
        const double period0 = cfg.base_period * spread * node_rng.uniform(0.98, 1.02);
        const double phase0 = node_rng.uniform(0.0, two_pi);
        const double amp0 = 3.0 * node_rng.uniform(0.8, 1.2);
        const double base0 = node_rng.uniform(18.0, 26.0);
        fill_ar1(node_rng, cfg.ar_rho, cfg.noise_std, ar);
        for (std::int64_t t = 0; t < T; ++t)
            values.at3(i, 0, t) =
                base0 + amp0 * std::sin(two_pi * static_cast<double>(t) / period0 + phase0) + ar[static_cast<std::size_t>(t)];

        // modality 1: negatively coupled to modality 0 plus its own AR(1)
        const double offset1 = node_rng.uniform(40.0, 60.0);
        fill_ar1(node_rng, cfg.ar_rho, cfg.noise_std, ar);
        for (std::int64_t t = 0; t < T; ++t)
            values.at3(i, 1, t) =
                offset1 - cfg.coupling * (values.at3(i, 0, t) - base0) + ar[static_cast<std::size_t>(t)];

        // further modalities: slower sinusoid families + AR(1), amplitudes kept
        // near the noise floor so cross-series correlation stays low
        for (std::int64_t m = 2; m < M; ++m) {
            const double fam = 1.8 + 0.9 * static_cast<double>(m - 2);
            const double rot = (N > 1) ? 0.8 + 0.5 * static_cast<double>((i + m) % N) / static_cast<double>(N - 1) : 1.0;
            const double period = cfg.base_period * fam * rot * node_rng.uniform(0.98, 1.02);
            const double phase = node_rng.uniform(0.0, two_pi);
            const double amp = cfg.noise_std * node_rng.uniform(0.8, 1.2);
            const double base = 100.0 * static_cast<double>(m) + node_rng.uniform(-10.0, 10.0);
            fill_ar1(node_rng, cfg.ar_rho, cfg.noise_std, ar);
            for (std::int64_t t = 0; t < T; ++t)
                values.at3(i, m, t) =
                    base + amp * std::sin(two_pi * static_cast<double>(t) / period + phase) + ar[static_cast<std::size_t>(t)];
        }
    }

    // One spatial mixing pass from the pre-mix values.
    if (cfg.mixing != 0.0) {
        auto nbrs = neighbor_lists(graph.adjacency);
        Tensor mixed = values;
        for (std::int64_t i = 0; i < N; ++i) {
            const auto& ni = nbrs[static_cast<std::size_t>(i)];
            if (ni.empty()) continue;
            for (std::int64_t m = 0; m < M; ++m)
                for (std::int64_t t = 0; t < T; ++t) {
                    double nb = 0.0;
                    for (auto j : ni) nb += values.at3(j, m, t);
                    nb /= static_cast<double>(ni.size());
                    mixed.at3(i, m, t) = (1.0 - cfg.mixing) * values.at3(i, m, t) + cfg.mixing * nb;
                }
        }
        values = std::move(mixed);
    }

    SynthResult out;
    out.series.values = std::move(values);
    out.series.node_ids.resize(static_cast<std::size_t>(N));
    for (std::int64_t i = 0; i < N; ++i) out.series.node_ids[static_cast<std::size_t>(i)] = static_cast<int>(i + 1);
    out.series.modality_names = {"temperature", "humidity"};
    for (std::int64_t m = 2; m < M; ++m) out.series.modality_names.push_back("aux" + std::to_string(m - 1));
    out.series.sample_interval_s = 31.0;
    out.graph = std::move(graph);
    return out;
}

}  // namespace gpad::data
