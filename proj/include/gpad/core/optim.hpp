#pragma once

// AdamW with decoupled weight decay. Moment buffers persist per parameter
// name so they survive checkpointing.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gpad/core/tape.hpp"

namespace gpad {

struct AdamWConfig {
    double lr = 0.005;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

class AdamW {
public:
    explicit AdamW(AdamWConfig cfg = {});

    // One update over the trainable parameters; non-trainable values are left
    // bit-identical. Increments the shared step index used for bias correction.
    void step(const std::vector<Parameter*>& params);

    std::int64_t step_count() const { return step_count_; }
    const AdamWConfig& config() const { return cfg_; }

    struct Moments {
        Tensor m;
        Tensor v;
    };
    std::map<std::string, Moments>& state() { return state_; }
    const std::map<std::string, Moments>& state() const { return state_; }
    void set_step_count(std::int64_t s) { step_count_ = s; }

private:
    AdamWConfig cfg_;
    std::int64_t step_count_ = 0;
    std::map<std::string, Moments> state_;
};

}  // namespace gpad
