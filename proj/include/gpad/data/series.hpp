#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gpad/core/tensor.hpp"

namespace gpad::data {

// Multi-node multi-modal telemetry on a uniform epoch grid, no missing cells.
struct SensorSeries {
    Tensor values;  // [N, M, T]
    std::vector<int> node_ids;
    std::vector<std::string> modality_names;
    double sample_interval_s = 31.0;

    std::int64_t n_nodes() const { return values.dim(0); }
    std::int64_t n_modalities() const { return values.dim(1); }
    std::int64_t n_steps() const { return values.dim(2); }
};

// Static sensor topology: symmetric binary adjacency, zero diagonal.
struct SensorGraph {
    Tensor adjacency;  // [N, N], entries in {0,1}
    std::vector<std::array<double, 2>> coordinates;  // empty when unknown

    std::int64_t n_nodes() const { return adjacency.dim(0); }
};

void validate_adjacency(const Tensor& a);

}  // namespace gpad::data
