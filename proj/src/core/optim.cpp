#include "gpad/core/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace gpad {

AdamW::AdamW(AdamWConfig cfg) : cfg_(cfg) {
    if (cfg_.lr <= 0.0) throw std::invalid_argument("AdamW: learning rate must be positive");
    if (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 || cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0)
        throw std::invalid_argument("AdamW: betas must lie in [0,1)");
}

void AdamW::step(const std::vector<Parameter*>& params) {
    ++step_count_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
    for (Parameter* p : params) {
        if (!p->trainable) continue;
        Tensor& val = p->value();
        Tensor& grad = p->grad();
        Moments& mom = state_[p->name];
        if (mom.m.size() == 0) {
            mom.m = Tensor(val.shape());
            mom.v = Tensor(val.shape());
        }
        for (std::int64_t i = 0; i < val.size(); ++i) {
            const double g = grad[i];
            mom.m[i] = cfg_.beta1 * mom.m[i] + (1.0 - cfg_.beta1) * g;
            mom.v[i] = cfg_.beta2 * mom.v[i] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = mom.m[i] / bc1;
            const double vhat = mom.v[i] / bc2;
            val[i] -= cfg_.lr * (mhat / (std::sqrt(vhat) + cfg_.eps) + cfg_.weight_decay * val[i]);
        }
    }
}

}  // namespace gpad
