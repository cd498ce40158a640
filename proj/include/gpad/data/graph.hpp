#pragma once

#include <array>
#include <vector>

#include "gpad/data/series.hpp"

namespace gpad::data {

// Symmetric k-nearest-neighbour adjacency over Euclidean coordinates.
// Each node links to its k nearest neighbours (ties broken by lower index);
// the result is symmetrized by union and has a zero diagonal.
SensorGraph build_adjacency(const std::vector<std::array<double, 2>>& coordinates, int k);

std::vector<std::vector<std::int64_t>> neighbor_lists(const Tensor& adjacency);

}  // namespace gpad::data
