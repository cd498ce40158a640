#pragma once

// Versioned binary checkpoint container: a JSON metadata blob, named f64
// tensors, optional AdamW moments and optional RNG state. Little-endian,
// fixed field order, so save -> load -> save is byte-identical.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gpad/core/optim.hpp"
#include "gpad/core/tensor.hpp"

namespace gpad {

struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;
    bool has_cached = false;
    double cached = 0.0;
};

struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::string meta_json;  // model/run description, free-form JSON
    std::vector<std::pair<std::string, Tensor>> tensors;  // insertion order preserved
    std::optional<std::int64_t> opt_step;
    std::vector<std::pair<std::string, AdamW::Moments>> opt_moments;
    std::optional<RngState> rng;

    void add(const std::string& name, const Tensor& t) { tensors.emplace_back(name, t); }
    const Tensor* find(const std::string& name) const;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

}  // namespace gpad
