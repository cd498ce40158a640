#pragma once

// Seeded synthetic telemetry with the couplings the detector is meant to
// exploit: a sinusoid+AR(1) primary modality, a negatively coupled secondary
// modality, drift-like extra modalities, and one spatial mixing pass so
// neighbouring nodes correlate.

#include <cstdint>

#include "gpad/data/series.hpp"

namespace gpad::data {

struct SynthConfig {
    std::int64_t n_nodes = 8;
    std::int64_t n_modalities = 3;
    std::int64_t n_steps = 5000;
    int knn_k = 2;

    double coupling = 1.0;      // modality 1 = -coupling * modality-0 signal + noise
    double mixing = 0.3;        // neighbour mixing weight (one pass)
    double base_period = 200.0; // primary-modality cycle length, spread across nodes
    double ar_rho = 0.8;
    double noise_std = 0.5;     // stationary std of the AR(1) component

    double field_size = 100.0;  // coordinate extent for the generated layout
};

struct SynthResult {
    SensorSeries series;
    SensorGraph graph;
};

SynthResult synth_generate(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace gpad::data
