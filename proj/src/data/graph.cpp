#include "gpad/data/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpad::data {

void validate_adjacency(const Tensor& a) {
    if (a.rank() != 2 || a.dim(0) != a.dim(1)) throw std::invalid_argument("adjacency must be square");
    const std::int64_t n = a.dim(0);
    for (std::int64_t i = 0; i < n; ++i) {
        if (a.at2(i, i) != 0.0) throw std::invalid_argument("adjacency diagonal must be zero");
        for (std::int64_t j = 0; j < n; ++j) {
            const double v = a.at2(i, j);
            if (v != 0.0 && v != 1.0) throw std::invalid_argument("adjacency entries must be 0 or 1");
            if (v != a.at2(j, i)) throw std::invalid_argument("adjacency must be symmetric");
        }
    }
}

SensorGraph build_adjacency(const std::vector<std::array<double, 2>>& coordinates, int k) {
    const std::int64_t n = static_cast<std::int64_t>(coordinates.size());
    if (n < 2) throw std::invalid_argument("build_adjacency: need at least 2 nodes");
    if (k < 1 || k >= n) throw std::invalid_argument("build_adjacency: require 1 <= k < n_nodes");

    SensorGraph g;
    g.adjacency = Tensor({n, n});
    g.coordinates = coordinates;

    std::vector<std::pair<double, std::int64_t>> dist;
    for (std::int64_t i = 0; i < n; ++i) {
        dist.clear();
        for (std::int64_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = coordinates[static_cast<std::size_t>(i)][0] - coordinates[static_cast<std::size_t>(j)][0];
            const double dy = coordinates[static_cast<std::size_t>(i)][1] - coordinates[static_cast<std::size_t>(j)][1];
            dist.emplace_back(std::sqrt(dx * dx + dy * dy), j);
        }
        // pair ordering breaks distance ties by lower node index
        std::sort(dist.begin(), dist.end());
        for (int q = 0; q < k; ++q) {
            const std::int64_t j = dist[static_cast<std::size_t>(q)].second;
            g.adjacency.at2(i, j) = 1.0;
            g.adjacency.at2(j, i) = 1.0;
        }
    }
    return g;
}

std::vector<std::vector<std::int64_t>> neighbor_lists(const Tensor& adjacency) {
    const std::int64_t n = adjacency.dim(0);
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
            if (adjacency.at2(i, j) != 0.0) out[static_cast<std::size_t>(i)].push_back(j);
    return out;
}

}  // namespace gpad::data
